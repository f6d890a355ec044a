#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lens/harness/config.hpp"
#include "lens/harness/report.hpp"
#include "lens/io.hpp"
#include "lens/metrics.hpp"
#include "lens/train.hpp"

namespace lens::harness {

struct AttackSummary {
    std::string image_id;
    std::string attack_id;
    double epsilon = 0.0;
    double delta_linf = 0.0;
    bool prediction_preserved = true;
    long chosen_iteration = -1;
};

inline constexpr const char* kAttackCsvHeader =
    "image_id,attack_id,epsilon,delta_linf,prediction_preserved,chosen_iteration";

struct RegimeResult {
    Regime regime = Regime::natural;
    std::vector<AttackSummary> attacks;
    std::vector<MetricRecord> records;  // sorted by image, attack, epsilon, metric, k, w
    std::vector<AggregateRow> aggregates;
};

struct TrainOutput {
    Regime regime = Regime::natural;
    ToyNetwork network;
    std::vector<EpochStats> log;
    std::filesystem::path checkpoint;
};

// Draws `sample_count` images without replacement using the config seed,
// returned in image-id order.
std::vector<LabeledImage> sample_images(const std::vector<LabeledImage>& all, std::size_t count, std::uint64_t seed);

// Stable 64-bit mix of a seed and a tag, for per-image/per-attack seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Trains every configured regime and writes checkpoints plus
// <out>/train_log_<regime>.csv (epoch,loss,accuracy).
std::vector<TrainOutput> cmd_train(const ExperimentConfig& cfg);

// Runs the attacks only; writes <out>/<regime>/attacks.csv.
std::vector<RegimeResult> cmd_attack(const ExperimentConfig& cfg);

// Attack + metric sweep; writes <out>/<regime>/{attacks,metrics}.csv and
// <out>/aggregate.csv.
std::vector<RegimeResult> cmd_evaluate(const ExperimentConfig& cfg);

// cmd_evaluate followed by <out>/<regime>/sweep_w.csv (`w,metric,attack,mean`)
// at k = cfg.fixed_k() and epsilon = cfg.fixed_epsilon().
std::vector<RegimeResult> cmd_sweep_w(const ExperimentConfig& cfg);

// cmd_evaluate followed by <out>/<regime>/sweep_k.csv
// (`k,metric,attack,mean,disparity`) at w = cfg.sweep_w and the fixed
// epsilon; disparity is the metric mean minus the top-k intersection mean.
std::vector<RegimeResult> cmd_sweep_k(const ExperimentConfig& cfg);

// Renders <out>/aggregate.csv into <out>/report.txt and returns the text.
std::string cmd_report(const std::filesystem::path& out_dir);

// In-memory evaluation of one regime without touching the filesystem
// (apart from loading the dataset and checkpoint).
RegimeResult evaluate_regime(const ExperimentConfig& cfg, Regime regime, const ToyNetwork& net,
                             const std::vector<LabeledImage>& images, bool with_metrics = true);

std::string render_attack_csv(const std::vector<AttackSummary>& rows);
std::string render_metric_csv(const std::vector<MetricRecord>& records);

}  // namespace lens::harness
