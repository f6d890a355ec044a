#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lens/attacks.hpp"
#include "lens/attribution.hpp"
#include "lens/metrics.hpp"
#include "lens/network.hpp"
#include "lens/train.hpp"

namespace lens::harness {

// Metric identifiers used in CSV output.
enum class MetricKind {
    topk,
    lens_prec,
    lens_recall,
    topk_div,
    lens_prec_div,
    lens_recall_div,
    spearman,
    kendall,
    lens_spearman,
    lens_kendall,
};

std::string to_string(MetricKind metric);
MetricKind parse_metric(const std::string& name);
bool is_rank_correlation(MetricKind metric);

enum class Regime { natural, pgd };
std::string to_string(Regime regime);
Regime parse_regime(const std::string& name);

struct ExperimentConfig {
    std::filesystem::path dataset;        // evaluation manifest
    std::filesystem::path train_dataset;  // defaults to dataset
    std::filesystem::path model_natural;  // defaults to <out>/models/natural.toynet
    std::filesystem::path model_pgd;      // defaults to <out>/models/pgd.toynet
    std::filesystem::path out = "out";
    std::vector<Regime> regimes{Regime::natural};

    std::vector<std::size_t> hidden{32};
    Activation activation = Activation::softplus(10.0);
    TrainConfig train;                    // train.adversarial is set for the pgd regime only
    AdversarialTraining pgd;

    std::vector<AttackConfig> attacks;    // one per attack id; epsilon/seed filled per run
    AttributionMethod attribution;
    Ranking ranking = Ranking::raw;

    std::vector<MetricKind> metrics;
    std::vector<std::size_t> k_values;
    std::vector<std::size_t> w_values;
    std::vector<double> epsilons;
    std::optional<std::size_t> w_div;     // unset: use the metric window w

    std::size_t sample_count = 200;
    std::uint64_t seed = 0;

    std::size_t sweep_k = 0;              // k used by sweep-w (default: first k)
    std::size_t sweep_w = 1;              // w used by sweep-k
    std::optional<double> sweep_epsilon;  // default: largest epsilon

    std::filesystem::path model_path(Regime regime) const;
    std::size_t fixed_k() const { return sweep_k ? sweep_k : k_values.front(); }
    double fixed_epsilon() const;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<std::size_t> samples;
};

// Flat `key = value` text, '#' starts a comment. Unknown keys, duplicate
// keys and malformed values raise ConfigError. Relative paths resolve
// against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const Overrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace lens::harness
