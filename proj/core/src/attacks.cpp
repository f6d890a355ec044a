#include "lens/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "lens/error.hpp"
#include "lens/random.hpp"

namespace lens {

std::string to_string(AttackVariant variant) {
    switch (variant) {
        case AttackVariant::random_sign: return "random_sign";
        case AttackVariant::universal_random: return "universal_random";
        case AttackVariant::top_k: return "top_k";
        case AttackVariant::mass_center: return "mass_center";
        case AttackVariant::lens_objective: return "lens_objective";
    }
    return "unknown";
}

AttackVariant parse_attack_variant(const std::string& name) {
    for (auto v : {AttackVariant::random_sign, AttackVariant::universal_random, AttackVariant::top_k,
                   AttackVariant::mass_center, AttackVariant::lens_objective}) {
        if (to_string(v) == name) return v;
    }
    throw DomainError("unknown attack variant '" + name + "'");
}

void AttackConfig::validate(std::size_t image_size) const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be finite and non-negative");
    if (!(step_size > 0.0)) throw DomainError("step_size must be positive");
    if (epsilon > 0.0 && step_size > epsilon) throw DomainError("step_size must not exceed epsilon");
    if (t == 0 || t > image_size) throw DomainError("attack t must lie in [1, image size]");
    if (k_eval == 0 || k_eval > image_size) throw DomainError("k_eval must lie in [1, image size]");
    if (!(hvp_r > 0.0)) throw DomainError("hvp_r must be positive");
}

void project_linf(std::span<double> candidate, std::span<const double> x, double epsilon) {
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        candidate[i] = std::clamp(std::clamp(candidate[i], x[i] - epsilon, x[i] + epsilon), 0.0, 1.0);
    }
}

namespace {

double linf_distance(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool in_unit_range(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double p) { return p >= 0.0 && p <= 1.0; });
}

ImageTensor with_pixels(const ImageTensor& like, std::vector<double> pixels) {
    return ImageTensor(like.height(), like.width(), like.channels(), std::move(pixels));
}

// One-shot perturbations: x + delta clipped, prediction checked afterwards.
AttackResult one_shot(const ToyNetwork& net, const ImageTensor& x, std::span<const double> delta) {
    const auto px = x.pixels();
    std::vector<double> out(px.size());
    for (std::size_t i = 0; i < px.size(); ++i) out[i] = std::clamp(px[i] + delta[i], 0.0, 1.0);
    AttackResult result;
    result.delta_linf = linf_distance(out, px);
    result.max_iterate_linf = result.delta_linf;
    result.iterates_in_range = in_unit_range(out);
    result.prediction_preserved = predict(net, out) == predict(net, px);
    result.chosen_iteration = 0;
    result.perturbed = with_pixels(x, std::move(out));
    return result;
}

}  // namespace

AttackResult random_sign(const ToyNetwork& net, const ImageTensor& x, double epsilon, std::uint64_t seed) {
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
    Rng rng(seed);
    std::vector<double> delta(x.size());
    for (auto& d : delta) d = epsilon * rng.sign();
    return one_shot(net, x, delta);
}

std::vector<double> universal_random(std::size_t size, double epsilon, std::uint64_t seed) {
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
    Rng rng(seed);
    std::vector<double> delta(size);
    for (auto& d : delta) d = epsilon * rng.sign();
    return delta;
}

AttackResult apply_perturbation(const ToyNetwork& net, const ImageTensor& x, std::span<const double> delta,
                                double epsilon) {
    if (delta.size() != x.size()) throw DomainError("perturbation size mismatch");
    if (linf_distance(delta, std::vector<double>(delta.size(), 0.0)) > epsilon) {
        throw DomainError("perturbation exceeds the epsilon budget");
    }
    return one_shot(net, x, delta);
}

CenterOfMass center_of_mass(const AttributionMap& map) {
    double mass = 0.0, row = 0.0, col = 0.0;
    for (std::size_t r = 0; r < map.height(); ++r) {
        for (std::size_t c = 0; c < map.width(); ++c) {
            const double m = std::abs(map(r, c));
            mass += m;
            row += m * static_cast<double>(r);
            col += m * static_cast<double>(c);
        }
    }
    if (!(mass > 0.0)) throw DomainError("center of mass undefined for an all-zero map");
    return {row / mass, col / mass};
}

namespace {

double displacement(const CenterOfMass& a, const CenterOfMass& b) { return std::hypot(a.row - b.row, a.col - b.col); }

std::optional<CenterOfMass> try_center(const AttributionMap& map) {
    for (double v : map.values()) {
        if (v != 0.0) return center_of_mass(map);
    }
    return std::nullopt;
}

// Gradient with respect to the input of sum_p v_p a_p(x). Exact for simple
// gradients (a Hessian-vector product) and input x gradient (product rule).
// Integrated gradients reuse the input x gradient form at the current point,
// so the Hessian term is again one finite-difference HVP.
std::vector<double> attribution_gradient(const ToyNetwork& net, std::span<const double> x, std::span<const double> v,
                                         std::size_t cls, const AttackConfig& cfg) {
    if (cfg.attribution.kind == AttributionKind::simple_grad) return hvp_fd(net, x, v, cls, cfg.hvp_r);
    std::vector<double> xv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xv[i] = x[i] * v[i];
    auto out = hvp_fd(net, x, xv, cls, cfg.hvp_r);
    const auto g = input_gradient(net, x, cls);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += v[i] * g[i];
    return out;
}

enum class Goal { topk_mass, lens_mass, center };

// Shared signed-step loop. Each iteration steps against the gradient of
// sum_p v_p a_p (the per-pixel weights v come from `weights`), projects,
// then scores the new iterate.
AttackResult iterate_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg, Goal goal) {
    cfg.validate(x.size());
    const auto px = x.pixels();
    const Dims dims = x.dims();
    const std::size_t cls = predict(net, px);
    const auto attr0 = attribute(net, x, cls, cfg.attribution);

    // Target set for the mass objectives.
    std::vector<double> target(px.size(), 0.0);
    if (goal != Goal::center) {
        auto set = top_k_set(attr0, cfg.t, cfg.ranking);
        if (goal == Goal::lens_mass) set = neighborhood_union(set, cfg.w_eval);
        for (const auto& c : set) {
            const std::size_t i = c.row * dims.width + c.col;
            target[i] = cfg.ranking == Ranking::absolute ? (attr0[i] < 0.0 ? -1.0 : 1.0) : 1.0;
        }
    }
    const auto center0 = goal == Goal::center ? try_center(attr0) : std::nullopt;

    auto objective = [&](const AttributionMap& a) {
        if (goal == Goal::center) {
            const auto c = try_center(a);
            return (c && center0) ? displacement(*c, *center0) : 0.0;
        }
        double mass = 0.0;
        for (std::size_t i = 0; i < target.size(); ++i) mass += target[i] * a[i];
        return -mass;
    };
    // Larger is a stronger attack.
    auto strength = [&](const AttributionMap& a) {
        switch (goal) {
            case Goal::topk_mass: return -topk_intersection(attr0, a, cfg.k_eval, cfg.ranking);
            case Goal::lens_mass: return -lens_prec_at_k(attr0, a, cfg.k_eval, cfg.w_eval, cfg.ranking);
            case Goal::center: return objective(a);
        }
        return 0.0;
    };
    // Weights v such that stepping against grad(sum v a) increases the objective.
    auto weights = [&](const AttributionMap& a) {
        if (goal != Goal::center) return target;
        std::vector<double> v(px.size(), 0.0);
        const auto c = try_center(a);
        if (!c || !center0) return v;
        double dr = c->row - center0->row;
        double dc = c->col - center0->col;
        double norm = std::hypot(dr, dc);
        if (norm == 0.0) {
            // No displacement yet: push toward the grid center, or down-right if already there.
            dr = 0.5 * static_cast<double>(dims.height - 1) - center0->row;
            dc = 0.5 * static_cast<double>(dims.width - 1) - center0->col;
            norm = std::hypot(dr, dc);
            if (norm == 0.0) {
                dr = dc = 1.0;
                norm = std::sqrt(2.0);
            }
        }
        dr /= norm;
        dc /= norm;
        double mass = 0.0;
        for (double val : a.values()) mass += std::abs(val);
        for (std::size_t r = 0; r < dims.height; ++r) {
            for (std::size_t q = 0; q < dims.width; ++q) {
                const std::size_t i = r * dims.width + q;
                const double sgn = a[i] > 0.0 ? 1.0 : (a[i] < 0.0 ? -1.0 : 0.0);
                // d|C - C0| / d a_i, negated because the step descends.
                v[i] = -sgn * ((static_cast<double>(r) - c->row) * dr + (static_cast<double>(q) - c->col) * dc) / mass;
            }
        }
        return v;
    };

    AttackResult result;
    result.perturbed = x;
    double best = strength(attr0);
    bool any_preserved = cfg.steps == 0;
    Rng rng(cfg.seed);
    const std::size_t restarts = std::max<std::size_t>(1, cfg.restarts);

    for (std::size_t restart = 0; restart < restarts && cfg.steps > 0; ++restart) {
        std::vector<double> cur(px.begin(), px.end());
        if (restart > 0) {
            for (std::size_t i = 0; i < cur.size(); ++i) cur[i] += rng.uniform(-cfg.epsilon, cfg.epsilon);
            project_linf(cur, px, cfg.epsilon);
        }
        auto cur_attr = restart == 0 ? attr0 : attribute(net, cur, dims, x.channels(), cls, cfg.attribution);
        for (std::size_t step = 0; step < cfg.steps; ++step) {
            const auto v = weights(cur_attr);
            const auto grad = attribution_gradient(net, cur, v, cls, cfg);
            for (std::size_t i = 0; i < cur.size(); ++i) {
                const double s = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
                cur[i] -= cfg.step_size * s;
            }
            project_linf(cur, px, cfg.epsilon);
            result.max_iterate_linf = std::max(result.max_iterate_linf, linf_distance(cur, px));
            result.iterates_in_range = result.iterates_in_range && in_unit_range(cur);

            cur_attr = attribute(net, cur, dims, x.channels(), cls, cfg.attribution);
            result.objective_trace.push_back(objective(cur_attr));
            if (predict(net, cur) != cls) continue;
            any_preserved = true;
            const double s = strength(cur_attr);
            if (s > best) {
                best = s;
                result.perturbed = with_pixels(x, cur);
                result.chosen_iteration = static_cast<long>(result.objective_trace.size()) - 1;
            }
        }
    }
    result.prediction_preserved = any_preserved;
    result.delta_linf = linf_distance(result.perturbed.pixels(), px);
    return result;
}

}  // namespace

AttackResult topk_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg) {
    return iterate_attack(net, x, cfg, Goal::topk_mass);
}

AttackResult mass_center_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg) {
    return iterate_attack(net, x, cfg, Goal::center);
}

AttackResult lens_objective_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg) {
    return iterate_attack(net, x, cfg, Goal::lens_mass);
}

AttackResult run_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg,
                        std::span<const double> universal_delta) {
    switch (cfg.variant) {
        case AttackVariant::random_sign: return random_sign(net, x, cfg.epsilon, cfg.seed);
        case AttackVariant::universal_random:
            if (universal_delta.empty()) throw DomainError("universal_random needs a shared perturbation");
            return apply_perturbation(net, x, universal_delta, cfg.epsilon);
        case AttackVariant::top_k: return topk_attack(net, x, cfg);
        case AttackVariant::mass_center: return mass_center_attack(net, x, cfg);
        case AttackVariant::lens_objective: return lens_objective_attack(net, x, cfg);
    }
    throw DomainError("unknown attack variant");
}

}  // namespace lens
