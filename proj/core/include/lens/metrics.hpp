#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lens/types.hpp"

namespace lens {

// How pixels are ranked when building top-k sets. Integrated gradients can
// be negative, so an absolute-value ranking is available.
enum class Ranking { raw, absolute };

// Top-k pixels by score, descending; ties broken by row-major position.
PixelSet top_k_set(const AttributionMap& map, std::size_t k, Ranking ranking = Ranking::raw);

// Union of the clipped (2w+1)x(2w+1) windows around every pixel of `set`.
// Result is ordered row-major; w == 0 returns `set` unchanged.
PixelSet neighborhood_union(const PixelSet& set, std::size_t w, Dims dims);
PixelSet neighborhood_union(const PixelSet& set, std::size_t w);

std::size_t intersection_size(const PixelSet& a, const PixelSet& b);
std::size_t symmetric_difference_size(const PixelSet& a, const PixelSet& b);
// |a \ b|
std::size_t difference_size(const PixelSet& a, const PixelSet& b);

// |S_k(a) ∩ S_k(b)| / k
double topk_intersection(const AttributionMap& a, const AttributionMap& b, std::size_t k,
                         Ranking ranking = Ranking::raw);

// Similarity forms. `a` is the reference (original) attribution, `b` the
// perturbed one. prec = 1 - |S_k \ N_w(T_k)| / k, recall = 1 - |T_k \ N_w(S_k)| / k.
double lens_prec_at_k(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                      Ranking ranking = Ranking::raw);
double lens_recall_at_k(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                        Ranking ranking = Ranking::raw);

// Same measures on precomputed selections of equal size.
double lens_prec(const PixelSet& s, const PixelSet& t, std::size_t w);
double lens_recall(const PixelSet& s, const PixelSet& t, std::size_t w);

// Distance d_k^(w) = |S_k \ N_w(T_k)|/k + |T_k \ N_w(S_k)|/k, in [0, 2].
double lens_distance(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                     Ranking ranking = Ranking::raw);

// Weights alpha_k (k = 1..k_max) and beta_w (w = 0..w_max) for combining
// lens_distance over many k and w. Both must be non-negative and
// non-increasing with a positive partial sum.
class WeightSchedule {
public:
    // alpha[i] is alpha_{i+1}; beta[i] is beta_i.
    WeightSchedule(std::vector<double> alpha, std::vector<double> beta);

    // alpha_k = 2^-k, beta_w = 2^-(w+1), k_max = 64, w_max = 8.
    static WeightSchedule geometric(std::size_t k_max = 64, std::size_t w_max = 8);

    std::size_t k_max() const noexcept { return alpha_.size(); }
    std::size_t w_max() const noexcept { return beta_.size() - 1; }
    double alpha(std::size_t k) const { return alpha_.at(k - 1); }
    double beta(std::size_t w) const { return beta_.at(w); }
    const std::vector<double>& alphas() const noexcept { return alpha_; }
    const std::vector<double>& betas() const noexcept { return beta_; }

private:
    std::vector<double> alpha_;
    std::vector<double> beta_;
};

// Truncated sum over k <= min(k_max, pixel count) and w <= w_max of
// alpha_k beta_w d_k^(w)(a, b).
double combined_distance(const AttributionMap& a, const AttributionMap& b, const WeightSchedule& sched,
                         Ranking ranking = Ranking::raw);

// Truncated sum of alpha_k beta_w |S_k △ T_k| / k over the same range.
double upper_bound_u(const AttributionMap& a, const AttributionMap& b, const WeightSchedule& sched,
                     Ranking ranking = Ranking::raw);

// Bound on what truncation drops from the infinite double sum, given the
// tail sums of alpha beyond k_max and of beta beyond w_max. Uses
// d_k^(w) <= 2: 2 A_tail (B + B_tail) + 2 (A + A_tail) B_tail.
double truncation_remainder(const WeightSchedule& sched, double alpha_tail, double beta_tail);

// Box filter with the full (2w+1)^2 denominator, also at the border.
AttributionMap smooth_map(const AttributionMap& map, std::size_t w);

// Average ranks (1-based, ties share the mean rank).
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rho: Pearson correlation of average-rank vectors.
// Throws UndefinedCorrelationError when either map is constant.
double spearman_rho(const AttributionMap& a, const AttributionMap& b);
// Kendall tau-b, O(n log n).
double kendall_tau(const AttributionMap& a, const AttributionMap& b);

double lens_spearman(const AttributionMap& a, const AttributionMap& b, std::size_t w);
double lens_kendall(const AttributionMap& a, const AttributionMap& b, std::size_t w);

// One (image, attack, metric, k, w, epsilon) -> value row.
struct MetricRecord {
    std::string image_id;
    std::string attack_id;
    std::string metric;
    std::size_t k = 1;
    std::size_t w = 0;
    double epsilon = 0.0;
    double value = 0.0;
    // Empty when `value` is valid; otherwise the failure code and `value` is ignored.
    std::string error;

    bool ok() const noexcept { return error.empty(); }
};

inline constexpr const char* kMetricCsvHeader = "image_id,attack_id,metric,k,w,epsilon,value";

// Invalid rows render their value as `NA:<error>`.
std::string to_csv_row(const MetricRecord& record);
void write_metric_csv(std::ostream& out, const std::vector<MetricRecord>& records);

}  // namespace lens
