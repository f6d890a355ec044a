#include "lens/harness/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <numeric>

#include "lens/attacks.hpp"
#include "lens/diversity.hpp"
#include "lens/error.hpp"
#include "lens/random.hpp"

namespace lens::harness {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    // splitmix64 finaliser applied to a running combination
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(seed);
    h = mix(h ^ a);
    h = mix(h ^ b);
    return mix(h ^ c);
}

namespace {

std::uint64_t hash_string(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<LabeledImage> load_images(const std::filesystem::path& manifest) {
    return load_dataset(load_manifest(manifest));
}

ToyNetwork load_model(const ExperimentConfig& cfg, Regime regime) {
    const auto path = cfg.model_path(regime);
    if (!std::filesystem::exists(path)) {
        throw IoError("missing " + to_string(regime) + " checkpoint " + path.string() + " (run `lens train` first)");
    }
    return load_network(path);
}

std::string error_code(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const CapacityError&) {
        return "capacity";
    } catch (const UndefinedCorrelationError&) {
        return "undefined_correlation";
    } catch (const DomainError&) {
        return "domain";
    }
}

double metric_value(MetricKind m, const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                    std::size_t w_div, Ranking ranking) {
    switch (m) {
        case MetricKind::topk: return topk_intersection(a, b, k, ranking);
        case MetricKind::lens_prec: return lens_prec_at_k(a, b, k, w, ranking);
        case MetricKind::lens_recall: return lens_recall_at_k(a, b, k, w, ranking);
        case MetricKind::topk_div: return topk_div_intersection(a, b, k, w_div, ranking);
        case MetricKind::lens_prec_div: return lens_prec_at_k_div(a, b, k, w, w_div, ranking);
        case MetricKind::lens_recall_div: return lens_recall_at_k_div(a, b, k, w, w_div, ranking);
        case MetricKind::spearman: return spearman_rho(a, b);
        case MetricKind::kendall: return kendall_tau(a, b);
        case MetricKind::lens_spearman: return lens_spearman(a, b, w);
        case MetricKind::lens_kendall: return lens_kendall(a, b, w);
    }
    throw DomainError("unknown metric");
}

std::string mean_text(const AggregateRow* row) {
    return row && row->n > 0 ? format_double(row->mean) : std::string("NA");
}

void write_regime_files(const ExperimentConfig& cfg, const RegimeResult& r, bool with_metrics) {
    const auto dir = cfg.out / to_string(r.regime);
    write_file(dir / "attacks.csv", render_attack_csv(r.attacks));
    if (with_metrics) write_file(dir / "metrics.csv", render_metric_csv(r.records));
}

void write_aggregates(const ExperimentConfig& cfg, const std::vector<RegimeResult>& results) {
    std::vector<AggregateRow> all;
    for (const auto& r : results) all.insert(all.end(), r.aggregates.begin(), r.aggregates.end());
    write_file(cfg.out / "aggregate.csv", render_aggregate_csv(all));
}

const AggregateRow* find_row(const std::vector<AggregateRow>& rows, const std::string& attack, const std::string& metric,
                             std::size_t k, std::size_t w, double eps) {
    for (const auto& row : rows) {
        if (row.attack_id == attack && row.metric == metric && row.k == k && row.w == w && row.epsilon == eps) {
            return &row;
        }
    }
    return nullptr;
}

void require_in_grid(const std::vector<std::size_t>& grid, std::size_t v, const char* what) {
    if (std::find(grid.begin(), grid.end(), v) == grid.end()) {
        throw ConfigError(std::string(what) + " = " + std::to_string(v) + " is not in the configured grid");
    }
}

}  // namespace

std::vector<LabeledImage> sample_images(const std::vector<LabeledImage>& all, std::size_t count, std::uint64_t seed) {
    if (count > all.size()) {
        throw ConfigError("samples = " + std::to_string(count) + " exceeds dataset size " + std::to_string(all.size()));
    }
    std::vector<std::size_t> idx(all.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(seed, hash_string("sample")));
    rng.shuffle(idx);
    std::vector<LabeledImage> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(all[idx[i]]);
    std::sort(out.begin(), out.end(), [](const LabeledImage& a, const LabeledImage& b) { return a.id < b.id; });
    return out;
}

RegimeResult evaluate_regime(const ExperimentConfig& cfg, Regime regime, const ToyNetwork& net,
                             const std::vector<LabeledImage>& images, bool with_metrics) {
    RegimeResult result;
    result.regime = regime;
    if (images.empty()) return result;
    const std::size_t size = images.front().image.size();

    std::vector<std::vector<double>> universal;
    for (double eps : cfg.epsilons) {
        universal.push_back(universal_random(size, eps, derive_seed(cfg.seed, hash_string("universal"),
                                                                    std::bit_cast<std::uint64_t>(eps))));
    }

    for (const auto& img : images) {
        if (img.image.size() != net.input_size()) throw DomainError("image " + img.id + " does not fit the network");
        const std::size_t cls = predict(net, img.image.pixels());
        const AttributionMap a0 = with_metrics ? attribute(net, img.image, cls, cfg.attribution) : AttributionMap();
        for (const auto& base : cfg.attacks) {
            const std::string attack_id = to_string(base.variant);
            for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
                const double eps = cfg.epsilons[e];
                AttackConfig ac = base;
                ac.epsilon = eps;
                if (eps > 0.0) ac.step_size = std::min(ac.step_size, eps);
                ac.seed = derive_seed(cfg.seed, hash_string(img.id), hash_string(attack_id),
                                      std::bit_cast<std::uint64_t>(eps));
                const auto res = run_attack(net, img.image, ac, universal[e]);
                result.attacks.push_back(
                    {img.id, attack_id, eps, res.delta_linf, res.prediction_preserved, res.chosen_iteration});
                if (!with_metrics) continue;

                const AttributionMap a1 = attribute(net, res.perturbed, cls, cfg.attribution);
                for (MetricKind m : cfg.metrics) {
                    for (std::size_t k : cfg.k_values) {
                        for (std::size_t w : cfg.w_values) {
                            MetricRecord rec{img.id, attack_id, to_string(m), k, w, eps, 0.0, {}};
                            if (!res.prediction_preserved) {
                                rec.error = "prediction_flipped";
                            } else {
                                try {
                                    rec.value = metric_value(m, a0, a1, k, w, cfg.w_div.value_or(w), cfg.ranking);
                                } catch (const Error&) {
                                    rec.error = error_code(std::current_exception());
                                }
                            }
                            result.records.push_back(std::move(rec));
                        }
                    }
                }
            }
        }
    }
    if (with_metrics) result.aggregates = aggregate(to_string(regime), result.records);
    return result;
}

std::string render_attack_csv(const std::vector<AttackSummary>& rows) {
    std::string out = std::string(kAttackCsvHeader) + "\n";
    for (const auto& r : rows) {
        out += r.image_id + "," + r.attack_id + "," + format_double(r.epsilon) + "," + format_double(r.delta_linf) + "," +
               (r.prediction_preserved ? "1" : "0") + "," + std::to_string(r.chosen_iteration) + "\n";
    }
    return out;
}

std::string render_metric_csv(const std::vector<MetricRecord>& records) {
    std::string out = std::string(kMetricCsvHeader) + "\n";
    for (const auto& r : records) out += to_csv_row(r) + "\n";
    return out;
}

std::vector<TrainOutput> cmd_train(const ExperimentConfig& cfg) {
    const auto data = load_images(cfg.train_dataset);
    const std::size_t input = data.front().image.size();
    int classes = 0;
    for (const auto& d : data) classes = std::max(classes, d.label + 1);

    std::vector<std::size_t> dims{input};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(static_cast<std::size_t>(classes));

    std::vector<TrainOutput> out;
    for (Regime regime : cfg.regimes) {
        TrainConfig tc = cfg.train;
        tc.seed = cfg.seed;
        if (regime == Regime::pgd) tc.adversarial = cfg.pgd;
        TrainOutput t;
        t.regime = regime;
        t.network = train(data, tc, dims, cfg.activation, &t.log);
        t.checkpoint = cfg.model_path(regime);
        save_network(t.network, t.checkpoint);

        std::string log = "epoch,loss,accuracy\n";
        for (const auto& e : t.log) {
            log += std::to_string(e.epoch) + "," + format_double(e.loss) + "," + format_double(e.accuracy) + "\n";
        }
        write_file(cfg.out / ("train_log_" + to_string(regime) + ".csv"), log);
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

std::vector<RegimeResult> run_all(const ExperimentConfig& cfg, bool with_metrics) {
    const auto images = sample_images(load_images(cfg.dataset), cfg.sample_count, cfg.seed);
    std::vector<RegimeResult> results;
    for (Regime regime : cfg.regimes) {
        const auto net = load_model(cfg, regime);
        results.push_back(evaluate_regime(cfg, regime, net, images, with_metrics));
        write_regime_files(cfg, results.back(), with_metrics);
    }
    if (with_metrics) write_aggregates(cfg, results);
    return results;
}

}  // namespace

std::vector<RegimeResult> cmd_attack(const ExperimentConfig& cfg) { return run_all(cfg, false); }

std::vector<RegimeResult> cmd_evaluate(const ExperimentConfig& cfg) { return run_all(cfg, true); }

std::vector<RegimeResult> cmd_sweep_w(const ExperimentConfig& cfg) {
    const std::size_t k = cfg.fixed_k();
    require_in_grid(cfg.k_values, k, "sweep_k");
    const double eps = cfg.fixed_epsilon();
    auto results = cmd_evaluate(cfg);
    for (const auto& r : results) {
        std::string csv = "w,metric,attack,mean\n";
        for (MetricKind m : cfg.metrics) {
            for (const auto& a : cfg.attacks) {
                for (std::size_t w : cfg.w_values) {
                    const auto* row = find_row(r.aggregates, to_string(a.variant), to_string(m), k, w, eps);
                    csv += std::to_string(w) + "," + to_string(m) + "," + to_string(a.variant) + "," + mean_text(row) + "\n";
                }
            }
        }
        write_file(cfg.out / to_string(r.regime) / "sweep_w.csv", csv);
    }
    return results;
}

std::vector<RegimeResult> cmd_sweep_k(const ExperimentConfig& cfg) {
    const std::size_t w = cfg.sweep_w;
    require_in_grid(cfg.w_values, w, "sweep_w");
    const double eps = cfg.fixed_epsilon();
    auto results = cmd_evaluate(cfg);
    for (const auto& r : results) {
        std::string csv = "k,metric,attack,mean,disparity\n";
        for (MetricKind m : cfg.metrics) {
            for (const auto& a : cfg.attacks) {
                const auto attack = to_string(a.variant);
                for (std::size_t k : cfg.k_values) {
                    const auto* row = find_row(r.aggregates, attack, to_string(m), k, w, eps);
                    const auto* base = find_row(r.aggregates, attack, "topk", k, w, eps);
                    std::string disparity = "NA";
                    if (row && base && row->n > 0 && base->n > 0) disparity = format_double(row->mean - base->mean);
                    csv += std::to_string(k) + "," + to_string(m) + "," + attack + "," + mean_text(row) + "," + disparity + "\n";
                }
            }
        }
        write_file(cfg.out / to_string(r.regime) / "sweep_k.csv", csv);
    }
    return results;
}

std::string cmd_report(const std::filesystem::path& out_dir) {
    const auto path = out_dir / "aggregate.csv";
    if (!std::filesystem::exists(path)) throw IoError("missing " + path.string() + " (run `lens evaluate` first)");
    const auto text = render_report(parse_aggregate_csv(read_file(path)));
    write_file(out_dir / "report.txt", text);
    return text;
}

}  // namespace lens::harness
