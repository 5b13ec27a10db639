#pragma once

// Items whose success probability exceeds 1 - eps^2 are "big". Their
// probabilities are rounded down onto a geometric grid so that a near
// optimal set of big items is determined by how many items it takes from
// each grid class, and within a class the cheapest items are always best.

#include <bvu/reductions.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace bvu {

struct ItemSplit {
    std::vector<std::size_t> big;    ///< positions with p > 1 - eps^2
    std::vector<std::size_t> small;  ///< the rest
};

inline bool is_big(double p, double epsilon) { return p > 1.0 - epsilon * epsilon; }

inline ItemSplit classify_items(std::span<const MkuItem> items, double epsilon) {
    ItemSplit out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        (is_big(items[i].prob, epsilon) ? out.big : out.small).push_back(i);
    }
    return out;
}

/// Levels (1-eps^2)(1+delta)^s for s = 0..beta, beta the largest s with the
/// level still below 1.
struct BigItemGrid {
    double base = 0.0;
    double delta = 0.0;
    std::vector<double> levels;
    bool coarsened = false;  ///< delta was widened to respect a level cap

    /// Largest level <= p. Throws for probabilities below the base.
    std::size_t class_of(double p) const {
        auto it = std::upper_bound(levels.begin(), levels.end(), p);
        if (it == levels.begin()) throw std::invalid_argument("BigItemGrid: probability below the big-item threshold");
        return static_cast<std::size_t>(it - levels.begin()) - 1;
    }
    double rounded(double p) const { return levels[class_of(p)]; }
};

inline BigItemGrid make_big_item_grid(double epsilon, double delta, std::size_t max_levels) {
    if (!(delta > 0.0)) throw std::invalid_argument("BigItemGrid: delta must be positive");
    if (max_levels < 1) throw std::invalid_argument("BigItemGrid: max_levels must be >= 1");
    BigItemGrid g;
    g.base = 1.0 - epsilon * epsilon;
    g.delta = delta;
    const double needed = std::ceil(-std::log(g.base) / std::log1p(delta)) + 1;
    if (needed > static_cast<double>(max_levels)) {
        g.delta = std::expm1(-std::log(g.base) / static_cast<double>(max_levels));
        g.coarsened = true;
    }
    for (double level = g.base; level < 1.0; level *= 1.0 + g.delta) {
        g.levels.push_back(level);
        if (g.levels.size() > max_levels) {
            g.levels.pop_back();
            g.coarsened = true;
            break;
        }
    }
    return g;
}

struct BigSelection {
    std::vector<std::vector<std::size_t>> subsets;  ///< positions into the block, ascending
    bool truncated = false;
};

/// One subset per way of spreading target_count over the grid classes:
/// within each class the cheapest items are taken (ties by id). Stops and
/// flags truncation after `max_compositions` subsets.
inline BigSelection select_big_items(std::span<const MkuItem> block, std::size_t target_count,
                                     const BigItemGrid& grid, std::size_t max_compositions) {
    BigSelection out;
    if (target_count > block.size()) return out;

    std::vector<std::vector<std::size_t>> classes(grid.levels.size());
    for (std::size_t i = 0; i < block.size(); ++i) classes[grid.class_of(block[i].prob)].push_back(i);
    std::vector<std::vector<std::size_t>> occupied;
    for (auto& c : classes) {
        if (c.empty()) continue;
        std::sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) {
            if (block[a].size != block[b].size) return block[a].size < block[b].size;
            return block[a].id < block[b].id;
        });
        occupied.push_back(std::move(c));
    }

    std::vector<std::size_t> counts(occupied.size(), 0);
    std::vector<std::size_t> suffix_room(occupied.size() + 1, 0);
    for (std::size_t c = occupied.size(); c-- > 0;) suffix_room[c] = suffix_room[c + 1] + occupied[c].size();

    auto rec = [&](auto&& self, std::size_t cls, std::size_t remaining) -> void {
        if (out.truncated) return;
        if (cls == occupied.size()) {
            if (remaining != 0) return;
            if (out.subsets.size() >= max_compositions) {
                out.truncated = true;
                return;
            }
            std::vector<std::size_t> subset;
            for (std::size_t c = 0; c < occupied.size(); ++c) {
                subset.insert(subset.end(), occupied[c].begin(), occupied[c].begin() + counts[c]);
            }
            std::sort(subset.begin(), subset.end());
            out.subsets.push_back(std::move(subset));
            return;
        }
        const std::size_t hi = std::min(remaining, occupied[cls].size());
        for (std::size_t take = hi + 1; take-- > 0;) {
            if (remaining - take > suffix_room[cls + 1]) break;
            counts[cls] = take;
            self(self, cls + 1, remaining - take);
        }
        counts[cls] = 0;
    };
    rec(rec, 0, target_count);
    return out;
}

}  // namespace bvu
