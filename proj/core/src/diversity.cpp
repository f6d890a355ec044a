#include "lens/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lens/error.hpp"

namespace lens {

bool conflicts(PixelCoord a, PixelCoord b, std::size_t w_div) noexcept {
    const std::size_t dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    const std::size_t dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    return std::max(dr, dc) <= w_div;
}

DiverseSelection diverse_top_k(const AttributionMap& map, std::size_t k, std::size_t w_div, Ranking ranking) {
    if (k < 1 || k > map.size()) throw DomainError("k = " + std::to_string(k) + " outside the map");
    if (w_div == 0) {
        auto set = top_k_set(map, k, ranking);
        double total = 0.0;
        for (const auto& c : set) {
            const double v = map(c.row, c.col);
            total += ranking == Ranking::absolute ? std::abs(v) : v;
        }
        return {std::move(set), 0, total};
    }

    const Dims dims = map.dims();
    auto score = [&](std::size_t i) { return ranking == Ranking::absolute ? std::abs(map[i]) : map[i]; };
    std::vector<std::size_t> order(map.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return score(i) > score(j); });

    std::vector<char> blocked(map.size(), 0);
    std::vector<PixelCoord> chosen;
    double total = 0.0;
    for (std::size_t idx : order) {
        if (chosen.size() == k) break;
        if (blocked[idx]) continue;
        const PixelCoord c{idx / dims.width, idx % dims.width};
        chosen.push_back(c);
        total += score(idx);
        const std::size_t r0 = c.row >= w_div ? c.row - w_div : 0;
        const std::size_t c0 = c.col >= w_div ? c.col - w_div : 0;
        const std::size_t r1 = std::min(dims.height - 1, c.row + w_div);
        const std::size_t c1 = std::min(dims.width - 1, c.col + w_div);
        for (std::size_t r = r0; r <= r1; ++r) {
            for (std::size_t q = c0; q <= c1; ++q) blocked[r * dims.width + q] = 1;
        }
    }
    if (chosen.size() < k) {
        throw CapacityError("only " + std::to_string(chosen.size()) + " of " + std::to_string(k) +
                                " pixels placed with w_div = " + std::to_string(w_div),
                            chosen.size());
    }
    return {PixelSet(dims, std::move(chosen)), w_div, total};
}

double topk_div_intersection(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w_div,
                             Ranking ranking) {
    return lens_prec_at_k_div(a, b, k, 0, w_div, ranking);
}

double lens_prec_at_k_div(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                          std::size_t w_div, Ranking ranking) {
    if (a.dims() != b.dims()) throw DomainError("attribution maps differ in dimensions");
    const auto s = diverse_top_k(a, k, w_div, ranking);
    const auto t = diverse_top_k(b, k, w_div, ranking);
    return lens_prec(s.coords, t.coords, w);
}

double lens_recall_at_k_div(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                            std::size_t w_div, Ranking ranking) {
    if (a.dims() != b.dims()) throw DomainError("attribution maps differ in dimensions");
    const auto s = diverse_top_k(a, k, w_div, ranking);
    const auto t = diverse_top_k(b, k, w_div, ranking);
    return lens_recall(s.coords, t.coords, w);
}

}  // namespace lens
