#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "lens/error.hpp"
#include "lens/metrics.hpp"

namespace lens {

namespace {

void require_pair(const AttributionMap& a, const AttributionMap& b) {
    if (a.dims() != b.dims()) throw DomainError("attribution maps differ in dimensions");
    if (a.size() < 2) throw DomainError("rank correlation needs at least two entries");
}

// Number of tied pairs summed over runs of equal values in a sorted range.
template <typename Eq>
std::int64_t tied_pairs(const std::vector<std::size_t>& order, Eq equal) {
    std::int64_t ties = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i <= order.size(); ++i) {
        if (i < order.size() && equal(order[i - 1], order[i])) {
            ++run;
        } else {
            ties += run * (run - 1) / 2;
            run = 1;
        }
    }
    return ties;
}

// Sorts `idx` by key, returning the number of inversions (swaps).
std::int64_t merge_count(std::vector<std::size_t>& idx, std::span<const double> key) {
    const std::size_t n = idx.size();
    std::vector<std::size_t> buf(n);
    std::int64_t swaps = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, n);
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, out = lo;
            while (i < mid && j < hi) {
                if (key[idx[j]] < key[idx[i]]) {
                    swaps += static_cast<std::int64_t>(mid - i);
                    buf[out++] = idx[j++];
                } else {
                    buf[out++] = idx[i++];
                }
            }
            while (i < mid) buf[out++] = idx[i++];
            while (j < hi) buf[out++] = idx[j++];
        }
        idx.swap(buf);
    }
    return swaps;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share ranks i+1..j+1
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t p = i; p <= j; ++p) ranks[order[p]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman_rho(const AttributionMap& a, const AttributionMap& b) {
    require_pair(a, b);
    const auto ra = average_ranks(a.values());
    const auto rb = average_ranks(b.values());
    const double n = static_cast<double>(ra.size());
    // Average ranks always have mean (n + 1) / 2.
    const double mean = 0.5 * (n + 1.0);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw UndefinedCorrelationError("Spearman rho undefined for a constant map");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double kendall_tau(const AttributionMap& a, const AttributionMap& b) {
    require_pair(a, b);
    const auto x = a.values();
    const auto y = b.values();
    const std::size_t n = x.size();

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return x[i] < x[j] || (x[i] == x[j] && y[i] < y[j]);
    });

    const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t tx = tied_pairs(idx, [&](std::size_t i, std::size_t j) { return x[i] == x[j]; });
    const std::int64_t txy =
        tied_pairs(idx, [&](std::size_t i, std::size_t j) { return x[i] == x[j] && y[i] == y[j]; });
    const std::int64_t swaps = merge_count(idx, y);
    const std::int64_t ty = tied_pairs(idx, [&](std::size_t i, std::size_t j) { return y[i] == y[j]; });

    if (tx == n0 || ty == n0) throw UndefinedCorrelationError("Kendall tau undefined for a constant map");
    // concordant - discordant = n0 - tx - ty + txy - 2 * swaps
    const double numer = static_cast<double>(n0 - tx - ty + txy - 2 * swaps);
    const double denom = std::sqrt(static_cast<double>(n0 - tx)) * std::sqrt(static_cast<double>(n0 - ty));
    return std::clamp(numer / denom, -1.0, 1.0);
}

double lens_spearman(const AttributionMap& a, const AttributionMap& b, std::size_t w) {
    return spearman_rho(smooth_map(a, w), smooth_map(b, w));
}

double lens_kendall(const AttributionMap& a, const AttributionMap& b, std::size_t w) {
    return kendall_tau(smooth_map(a, w), smooth_map(b, w));
}

}  // namespace lens
