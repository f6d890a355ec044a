#include "lens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lens/error.hpp"
#include "lens/io.hpp"

namespace lens {

namespace {

void require_same_dims(const AttributionMap& a, const AttributionMap& b) {
    if (a.dims() != b.dims()) throw DomainError("attribution maps differ in dimensions");
}

void require_k(std::size_t k, Dims dims) {
    if (k < 1 || k > dims.size()) {
        throw DomainError("k = " + std::to_string(k) + " outside [1, " + std::to_string(dims.size()) + "]");
    }
}

double score(double v, Ranking ranking) { return ranking == Ranking::absolute ? std::abs(v) : v; }

}  // namespace

PixelSet top_k_set(const AttributionMap& map, std::size_t k, Ranking ranking) {
    require_k(k, map.dims());
    std::vector<std::size_t> order(map.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto better = [&](std::size_t i, std::size_t j) {
        const double si = score(map[i], ranking);
        const double sj = score(map[j], ranking);
        return si > sj || (si == sj && i < j);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);

    std::vector<PixelCoord> coords;
    coords.reserve(k);
    for (std::size_t i = 0; i < k; ++i) coords.push_back({order[i] / map.width(), order[i] % map.width()});
    return PixelSet(map.dims(), std::move(coords));
}

PixelSet neighborhood_union(const PixelSet& set, std::size_t w, Dims dims) {
    if (set.dims() != dims) throw DomainError("pixel set does not belong to the given grid");
    if (w == 0) return set;
    std::vector<char> mask(dims.size(), 0);
    for (const auto& c : set) {
        const std::size_t r0 = c.row >= w ? c.row - w : 0;
        const std::size_t c0 = c.col >= w ? c.col - w : 0;
        const std::size_t r1 = std::min(dims.height - 1, c.row + w);
        const std::size_t c1 = std::min(dims.width - 1, c.col + w);
        for (std::size_t r = r0; r <= r1; ++r) {
            for (std::size_t q = c0; q <= c1; ++q) mask[r * dims.width + q] = 1;
        }
    }
    std::vector<PixelCoord> coords;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) coords.push_back({i / dims.width, i % dims.width});
    }
    return PixelSet(dims, std::move(coords));
}

PixelSet neighborhood_union(const PixelSet& set, std::size_t w) { return neighborhood_union(set, w, set.dims()); }

std::size_t intersection_size(const PixelSet& a, const PixelSet& b) {
    std::size_t n = 0;
    for (const auto& c : a) n += b.contains(c) ? 1 : 0;
    return n;
}

std::size_t difference_size(const PixelSet& a, const PixelSet& b) { return a.size() - intersection_size(a, b); }

std::size_t symmetric_difference_size(const PixelSet& a, const PixelSet& b) {
    return difference_size(a, b) + difference_size(b, a);
}

double topk_intersection(const AttributionMap& a, const AttributionMap& b, std::size_t k, Ranking ranking) {
    require_same_dims(a, b);
    const auto s = top_k_set(a, k, ranking);
    const auto t = top_k_set(b, k, ranking);
    return static_cast<double>(intersection_size(s, t)) / static_cast<double>(k);
}

double lens_prec(const PixelSet& s, const PixelSet& t, std::size_t w) {
    if (s.size() != t.size() || s.empty()) throw DomainError("selections must be non-empty and of equal size");
    const auto nt = neighborhood_union(t, w);
    // Same as 1 - |S \ N_w(T)| / k, written as a count so that w = 0 gives
    // exactly the top-k intersection value.
    return static_cast<double>(intersection_size(s, nt)) / static_cast<double>(s.size());
}

double lens_recall(const PixelSet& s, const PixelSet& t, std::size_t w) { return lens_prec(t, s, w); }

double lens_prec_at_k(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                      Ranking ranking) {
    require_same_dims(a, b);
    return lens_prec(top_k_set(a, k, ranking), top_k_set(b, k, ranking), w);
}

double lens_recall_at_k(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                        Ranking ranking) {
    require_same_dims(a, b);
    return lens_recall(top_k_set(a, k, ranking), top_k_set(b, k, ranking), w);
}

namespace {

// d_k^(w) from precomputed top-k sets, as an exact count over k.
std::size_t lens_distance_count(const PixelSet& s, const PixelSet& t, std::size_t w) {
    return difference_size(s, neighborhood_union(t, w)) + difference_size(t, neighborhood_union(s, w));
}

}  // namespace

double lens_distance(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                     Ranking ranking) {
    require_same_dims(a, b);
    const auto s = top_k_set(a, k, ranking);
    const auto t = top_k_set(b, k, ranking);
    return static_cast<double>(lens_distance_count(s, t, w)) / static_cast<double>(k);
}

// ---- weight schedules ----------------------------------------------------

WeightSchedule::WeightSchedule(std::vector<double> alpha, std::vector<double> beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
    auto check = [](const std::vector<double>& v, const char* name) {
        if (v.empty()) throw DomainError(std::string(name) + " schedule is empty");
        double sum = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isfinite(v[i]) || v[i] < 0.0) {
                throw DomainError(std::string(name) + " weights must be finite and non-negative");
            }
            if (i > 0 && v[i] > v[i - 1]) throw DomainError(std::string(name) + " weights must be non-increasing");
            sum += v[i];
        }
        if (!(sum > 0.0) || !std::isfinite(sum)) {
            throw DomainError(std::string(name) + " weights must have a positive finite sum");
        }
    };
    check(alpha_, "alpha");
    check(beta_, "beta");
}

WeightSchedule WeightSchedule::geometric(std::size_t k_max, std::size_t w_max) {
    if (k_max == 0) throw DomainError("k_max must be positive");
    std::vector<double> alpha(k_max), beta(w_max + 1);
    for (std::size_t k = 1; k <= k_max; ++k) alpha[k - 1] = std::ldexp(1.0, -static_cast<int>(k));
    for (std::size_t w = 0; w <= w_max; ++w) beta[w] = std::ldexp(1.0, -static_cast<int>(w + 1));
    return WeightSchedule(std::move(alpha), std::move(beta));
}

double truncation_remainder(const WeightSchedule& sched, double alpha_tail, double beta_tail) {
    if (alpha_tail < 0.0 || beta_tail < 0.0) throw DomainError("tail sums must be non-negative");
    const double a = std::accumulate(sched.alphas().begin(), sched.alphas().end(), 0.0);
    const double b = std::accumulate(sched.betas().begin(), sched.betas().end(), 0.0);
    return 2.0 * alpha_tail * (b + beta_tail) + 2.0 * (a + alpha_tail) * beta_tail;
}

double combined_distance(const AttributionMap& a, const AttributionMap& b, const WeightSchedule& sched,
                         Ranking ranking) {
    require_same_dims(a, b);
    const std::size_t k_top = std::min(sched.k_max(), a.size());
    double total = 0.0;
    for (std::size_t k = 1; k <= k_top; ++k) {
        if (sched.alpha(k) == 0.0) continue;
        const auto s = top_k_set(a, k, ranking);
        const auto t = top_k_set(b, k, ranking);
        double inner = 0.0;
        for (std::size_t w = 0; w <= sched.w_max(); ++w) {
            inner += sched.beta(w) * (static_cast<double>(lens_distance_count(s, t, w)) / static_cast<double>(k));
        }
        total += sched.alpha(k) * inner;
    }
    return total;
}

double upper_bound_u(const AttributionMap& a, const AttributionMap& b, const WeightSchedule& sched,
                     Ranking ranking) {
    require_same_dims(a, b);
    const std::size_t k_top = std::min(sched.k_max(), a.size());
    double total = 0.0;
    for (std::size_t k = 1; k <= k_top; ++k) {
        if (sched.alpha(k) == 0.0) continue;
        const double sym = static_cast<double>(symmetric_difference_size(top_k_set(a, k, ranking),
                                                                         top_k_set(b, k, ranking))) /
                           static_cast<double>(k);
        // Summed term by term in the same order as combined_distance so the
        // comparison d <= u is not disturbed by rounding.
        double inner = 0.0;
        for (std::size_t w = 0; w <= sched.w_max(); ++w) inner += sched.beta(w) * sym;
        total += sched.alpha(k) * inner;
    }
    return total;
}

// ---- smoothing -----------------------------------------------------------

AttributionMap smooth_map(const AttributionMap& map, std::size_t w) {
    if (w == 0) return map;
    const std::size_t h = map.height();
    const std::size_t wd = map.width();
    const double denom = static_cast<double>((2 * w + 1) * (2 * w + 1));
    std::vector<double> out(map.size());
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t r0 = r >= w ? r - w : 0;
        const std::size_t r1 = std::min(h - 1, r + w);
        for (std::size_t c = 0; c < wd; ++c) {
            const std::size_t c0 = c >= w ? c - w : 0;
            const std::size_t c1 = std::min(wd - 1, c + w);
            double sum = 0.0;
            for (std::size_t p = r0; p <= r1; ++p) {
                for (std::size_t q = c0; q <= c1; ++q) sum += map(p, q);
            }
            out[r * wd + c] = sum / denom;
        }
    }
    return AttributionMap(map.dims(), std::move(out));
}

// ---- CSV -----------------------------------------------------------------

std::string to_csv_row(const MetricRecord& r) {
    std::string row = r.image_id + "," + r.attack_id + "," + r.metric + "," + std::to_string(r.k) + "," +
                      std::to_string(r.w) + "," + format_double(r.epsilon) + ",";
    row += r.ok() ? format_double(r.value) : "NA:" + r.error;
    return row;
}

void write_metric_csv(std::ostream& out, const std::vector<MetricRecord>& records) {
    out << kMetricCsvHeader << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
}

}  // namespace lens
