#pragma once

#include <cstddef>

#include "lens/metrics.hpp"
#include "lens/types.hpp"

namespace lens {

struct DiverseSelection {
    PixelSet coords;       // in selection order
    std::size_t w_div = 0;
    double total_score = 0.0;
};

// Two pixels conflict when their Chebyshev distance is at most w_div.
bool conflicts(PixelCoord a, PixelCoord b, std::size_t w_div) noexcept;

// Greedy selection: repeatedly take the highest-ranked pixel that does not
// conflict with an already selected one (same order and tie-break as
// top_k_set). Throws CapacityError if the greedy pass runs out of
// admissible pixels before reaching k; achievable() reports how many it placed.
DiverseSelection diverse_top_k(const AttributionMap& map, std::size_t k, std::size_t w_div,
                               Ranking ranking = Ranking::raw);

double topk_div_intersection(const AttributionMap& a, const AttributionMap& b, std::size_t k,
                             std::size_t w_div, Ranking ranking = Ranking::raw);
double lens_prec_at_k_div(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                          std::size_t w_div, Ranking ranking = Ranking::raw);
double lens_recall_at_k_div(const AttributionMap& a, const AttributionMap& b, std::size_t k, std::size_t w,
                            std::size_t w_div, Ranking ranking = Ranking::raw);

}  // namespace lens
