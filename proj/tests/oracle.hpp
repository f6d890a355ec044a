#pragma once

// Slow, definition-level reference implementations used by the tests.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "lens/types.hpp"

namespace lens::oracle {

using Coord = std::pair<std::size_t, std::size_t>;
using CoordSet = std::set<Coord>;

inline double score(double v, bool absolute) { return absolute ? std::fabs(v) : v; }

// Full stable sort of all pixels by descending score, row-major on ties.
inline std::vector<Coord> ranking(const AttributionMap& m, bool absolute = false) {
    std::vector<Coord> all;
    for (std::size_t r = 0; r < m.height(); ++r)
        for (std::size_t c = 0; c < m.width(); ++c) all.emplace_back(r, c);
    std::stable_sort(all.begin(), all.end(), [&](const Coord& x, const Coord& y) {
        return score(m(x.first, x.second), absolute) > score(m(y.first, y.second), absolute);
    });
    return all;
}

inline CoordSet top_k(const AttributionMap& m, std::size_t k, bool absolute = false) {
    auto r = ranking(m, absolute);
    return CoordSet(r.begin(), r.begin() + static_cast<long>(k));
}

inline CoordSet to_set(const PixelSet& s) {
    CoordSet out;
    for (auto c : s) out.emplace(c.row, c.col);
    return out;
}

inline CoordSet neighborhood(const CoordSet& s, std::size_t w, Dims dims) {
    CoordSet out;
    for (std::size_t r = 0; r < dims.height; ++r)
        for (std::size_t c = 0; c < dims.width; ++c)
            for (const auto& p : s) {
                const auto dr = static_cast<long>(r) - static_cast<long>(p.first);
                const auto dc = static_cast<long>(c) - static_cast<long>(p.second);
                if (std::labs(dr) <= static_cast<long>(w) && std::labs(dc) <= static_cast<long>(w)) {
                    out.emplace(r, c);
                    break;
                }
            }
    return out;
}

inline std::size_t minus_size(const CoordSet& a, const CoordSet& b) {
    std::size_t n = 0;
    for (const auto& x : a) n += b.count(x) == 0;
    return n;
}

inline double prec(const CoordSet& s, const CoordSet& t, std::size_t k, std::size_t w, Dims dims) {
    return static_cast<double>(k - minus_size(s, neighborhood(t, w, dims))) / static_cast<double>(k);
}

inline double intersection(const CoordSet& s, const CoordSet& t, std::size_t k) {
    return static_cast<double>(k - minus_size(s, t)) / static_cast<double>(k);
}

inline std::vector<double> smooth(const AttributionMap& m, std::size_t w) {
    const long h = static_cast<long>(m.height()), wd = static_cast<long>(m.width()), ww = static_cast<long>(w);
    const double denom = static_cast<double>((2 * w + 1) * (2 * w + 1));
    std::vector<double> out;
    for (long r = 0; r < h; ++r)
        for (long c = 0; c < wd; ++c) {
            double s = 0.0;
            for (long dr = -ww; dr <= ww; ++dr)
                for (long dc = -ww; dc <= ww; ++dc) {
                    const long rr = r + dr, cc = c + dc;
                    if (rr >= 0 && rr < h && cc >= 0 && cc < wd) s += m(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                }
            out.push_back(s / denom);
        }
    return out;
}

// Ranks by full sort; tied values get the mean of their positions.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    for (double x : v) {
        const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        out.push_back((static_cast<double>(lo + 1) + static_cast<double>(hi)) / 2.0);
    }
    return out;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(ranks(x), ranks(y));
}

// tau-b by enumerating all pairs.
inline double kendall(const std::vector<double>& x, const std::vector<double>& y) {
    double concordant = 0, discordant = 0, tie_x_only = 0, tie_y_only = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) tie_x_only += 1;
            else if (dy == 0) tie_y_only += 1;
            else if ((dx > 0) == (dy > 0)) concordant += 1;
            else discordant += 1;
        }
    return (concordant - discordant) /
           std::sqrt((concordant + discordant + tie_x_only) * (concordant + discordant + tie_y_only));
}

inline std::vector<double> values(const AttributionMap& m) { return {m.values().begin(), m.values().end()}; }

}  // namespace lens::oracle

namespace lens::oracle {

inline bool separated(const Coord& a, const Coord& b, std::size_t w_div) {
    const auto dr = static_cast<std::size_t>(std::labs(static_cast<long>(a.first) - static_cast<long>(b.first)));
    const auto dc = static_cast<std::size_t>(std::labs(static_cast<long>(a.second) - static_cast<long>(b.second)));
    return std::max(dr, dc) > w_div;
}

// Greedy over the full-sort ranking; empty result if fewer than k fit.
inline std::vector<Coord> greedy_diverse(const AttributionMap& m, std::size_t k, std::size_t w_div) {
    std::vector<Coord> chosen;
    for (const auto& c : ranking(m)) {
        if (chosen.size() == k) break;
        if (std::all_of(chosen.begin(), chosen.end(), [&](const Coord& x) { return separated(x, c, w_div); }))
            chosen.push_back(c);
    }
    if (chosen.size() < k) chosen.clear();
    return chosen;
}

// Best total score over all pairwise separated k-subsets; -inf if none exists.
inline double best_diverse_total(const AttributionMap& m, std::size_t k, std::size_t w_div) {
    std::vector<Coord> all;
    for (std::size_t r = 0; r < m.height(); ++r)
        for (std::size_t c = 0; c < m.width(); ++c) all.emplace_back(r, c);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick;
    auto rec = [&](auto&& self, std::size_t start, double total) -> void {
        if (pick.size() == k) {
            best = std::max(best, total);
            return;
        }
        for (std::size_t i = start; i < all.size(); ++i) {
            bool ok = true;
            for (std::size_t j : pick) ok = ok && separated(all[j], all[i], w_div);
            if (!ok) continue;
            pick.push_back(i);
            self(self, i + 1, total + m(all[i].first, all[i].second));
            pick.pop_back();
        }
    };
    rec(rec, 0, 0.0);
    return best;
}

}  // namespace lens::oracle
