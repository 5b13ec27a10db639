#pragma once

// Two dynamic programs over the small items of one group. Both compute, for
// every reachable rounded "signature" of a subset, the cheapest subset with
// that signature:
//
//   distribution DP  signature = (count, first zeta pmf entries rounded UP
//                    to multiples of eta). Rounding up only overestimates
//                    lower-tail mass, so a witness's true tail is never
//                    worse than its signature promises.
//   moment DP        signature = (count, sum p, sum p(1-p)) bucketed to the
//                    nearest grid cell. Sets with matching count and moments
//                    have close normal approximations.
//
// Witness sets are rebuilt from back-pointers into a shared node arena.

#include <bvu/errors.hpp>
#include <bvu/reductions.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace bvu {

struct DpLimits {
    std::size_t max_states = 50'000;  ///< live states per layer
    bool strict = false;              ///< throw state_space_overflow instead of truncating
};

namespace detail {

/// Back-pointer arena: each node adds one item to its parent's set.
class WitnessArena {
public:
    static constexpr std::int64_t kEmpty = -1;

    std::int64_t extend(std::int64_t parent, std::size_t item) {
        nodes_.push_back(Node{parent, item});
        return static_cast<std::int64_t>(nodes_.size()) - 1;
    }
    std::vector<std::size_t> materialize(std::int64_t node) const {
        std::vector<std::size_t> out;
        for (; node != kEmpty; node = nodes_[static_cast<std::size_t>(node)].parent) {
            out.push_back(nodes_[static_cast<std::size_t>(node)].item);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    struct Node {
        std::int64_t parent;
        std::size_t item;
    };
    std::vector<Node> nodes_;
};

template <class Key, class Entry>
void enforce_state_cap(std::map<Key, Entry>& layer, const DpLimits& limits, bool& truncated, const char* who) {
    if (layer.size() <= limits.max_states) return;
    if (limits.strict) {
        throw state_space_overflow(std::string(who) + ": " + std::to_string(layer.size()) +
                                   " states exceed the limit of " + std::to_string(limits.max_states));
    }
    // Keep the cheapest states; ties resolved by key order.
    std::vector<typename std::map<Key, Entry>::iterator> its;
    its.reserve(layer.size());
    for (auto it = layer.begin(); it != layer.end(); ++it) its.push_back(it);
    std::stable_sort(its.begin(), its.end(), [](auto a, auto b) { return a->second.cost < b->second.cost; });
    std::map<Key, Entry> kept;
    for (std::size_t i = 0; i < limits.max_states; ++i) kept.insert(*its[i]);
    layer.swap(kept);
    truncated = true;
}

}  // namespace detail

struct DistCandidate {
    std::vector<std::size_t> items;  ///< positions into the block
    std::vector<double> rounded_pmf; ///< the state's u_0..u_{zeta-1}
    double cost = 0.0;
};

struct DistDpResult {
    std::vector<DistCandidate> candidates;  ///< undominated terminal states
    bool truncated = false;
};

/// Distribution DP over `block`, reporting undominated states for every
/// count in [0, max_count]. `cells` = 1/eta. States costing more than
/// `capacity` are dropped.
inline DistDpResult dist_dp_frontier(std::span<const MkuItem> block, std::size_t max_count, std::size_t zeta,
                                     std::size_t cells, double capacity, const DpLimits& limits = {}) {
    if (zeta < 1) throw std::invalid_argument("distribution DP: zeta must be >= 1");
    if (cells < 1) throw std::invalid_argument("distribution DP: eta must be positive");

    using Key = std::pair<std::size_t, std::vector<std::uint32_t>>;
    struct Entry {
        double cost;
        std::int64_t node;
    };
    detail::WitnessArena arena;
    DistDpResult out;

    std::map<Key, Entry> layer;
    {
        std::vector<std::uint32_t> u(zeta, 0);
        u[0] = static_cast<std::uint32_t>(cells);
        layer.emplace(Key{0, std::move(u)}, Entry{0.0, detail::WitnessArena::kEmpty});
    }

    const auto full = static_cast<double>(cells);
    for (std::size_t i = 0; i < block.size(); ++i) {
        const double p = block[i].prob;
        const double q = 1.0 - p;
        std::map<Key, Entry> next = layer;
        for (const auto& [key, entry] : layer) {
            if (key.first >= max_count) continue;
            const double cost = entry.cost + block[i].size;
            if (cost > capacity) continue;
            std::vector<std::uint32_t> u(zeta);
            for (std::size_t h = 0; h < zeta; ++h) {
                double v = static_cast<double>(key.second[h]) * q;
                if (h > 0) v += static_cast<double>(key.second[h - 1]) * p;
                // round up to the grid; the slack absorbs float noise on exact grid points
                v = std::ceil(v - 1e-7);
                u[h] = static_cast<std::uint32_t>(std::clamp(v, 0.0, full));
            }
            Key nk{key.first + 1, std::move(u)};
            auto it = next.find(nk);
            if (it == next.end()) {
                next.emplace(std::move(nk), Entry{cost, arena.extend(entry.node, i)});
            } else if (cost < it->second.cost) {
                it->second = Entry{cost, arena.extend(entry.node, i)};
            }
        }

        // Pareto pruning within each count: a state is dropped when another
        // costs no more and has componentwise no larger rounded pmf. Skipped
        // for very large buckets, where it would dominate the runtime.
        std::map<std::size_t, std::vector<std::map<Key, Entry>::iterator>> buckets;
        for (auto it = next.begin(); it != next.end(); ++it) buckets[it->first.first].push_back(it);
        for (auto& [count, its] : buckets) {
            if (its.size() < 2 || its.size() > 5000) continue;
            std::stable_sort(its.begin(), its.end(), [](auto a, auto b) { return a->second.cost < b->second.cost; });
            std::vector<std::map<Key, Entry>::iterator> kept;
            for (auto it : its) {
                const bool dominated = std::any_of(kept.begin(), kept.end(), [&](auto k) {
                    for (std::size_t h = 0; h < zeta; ++h) {
                        if (k->first.second[h] > it->first.second[h]) return false;
                    }
                    return true;
                });
                if (dominated) {
                    next.erase(it);
                } else {
                    kept.push_back(it);
                }
            }
        }
        detail::enforce_state_cap(next, limits, out.truncated, "distribution DP");
        layer = std::move(next);
    }

    for (const auto& [key, entry] : layer) {
        DistCandidate c;
        c.items = arena.materialize(entry.node);
        c.cost = entry.cost;
        c.rounded_pmf.reserve(zeta);
        for (auto v : key.second) c.rounded_pmf.push_back(static_cast<double>(v) / full);
        out.candidates.push_back(std::move(c));
    }
    return out;
}

/// Candidates of exactly `target_count` small items from the distribution
/// DP with pmf length `zeta` and grid step `eta` (refined to 1/ceil(1/eta)).
inline DistDpResult small_items_dist_dp(std::span<const MkuItem> block, std::size_t target_count, std::size_t zeta,
                                        double eta, double capacity_hint, const DpLimits& limits = {}) {
    if (!(eta > 0.0)) throw std::invalid_argument("distribution DP: eta must be positive");
    const auto cells = static_cast<std::size_t>(std::ceil(1.0 / eta - 1e-9));
    auto all = dist_dp_frontier(block, target_count, zeta, cells, capacity_hint, limits);
    std::erase_if(all.candidates, [&](const DistCandidate& c) { return c.items.size() != target_count; });
    return all;
}

struct MomentCandidate {
    std::vector<std::size_t> items;
    double sum_p = 0.0;    ///< exact moments of `items`
    double sum_var = 0.0;
    double cost = 0.0;
};

struct MomentDpResult {
    std::vector<MomentCandidate> candidates;
    bool truncated = false;
};

struct MomentGrid {
    double width_p = 0.0;
    double width_var = 0.0;
};

/// Moment DP over `block`, reporting the cheapest set per (count, sum p
/// cell, sum p(1-p) cell) for every count in [0, max_count].
inline MomentDpResult moment_dp_frontier(std::span<const MkuItem> block, std::size_t max_count, MomentGrid grid,
                                         double capacity, const DpLimits& limits = {}) {
    if (!(grid.width_p > 0.0) || !(grid.width_var > 0.0)) {
        throw std::invalid_argument("moment DP: grid widths must be positive");
    }
    using Key = std::tuple<std::size_t, long long, long long>;
    struct Entry {
        double cost;
        double sum_p;
        double sum_var;
        std::int64_t node;
    };
    detail::WitnessArena arena;
    MomentDpResult out;

    std::map<Key, Entry> layer;
    layer.emplace(Key{0, 0, 0}, Entry{0.0, 0.0, 0.0, detail::WitnessArena::kEmpty});
    for (std::size_t i = 0; i < block.size(); ++i) {
        const double p = block[i].prob;
        std::map<Key, Entry> next = layer;
        for (const auto& [key, e] : layer) {
            if (std::get<0>(key) >= max_count) continue;
            const double cost = e.cost + block[i].size;
            if (cost > capacity) continue;
            const double sp = e.sum_p + p;
            const double sv = e.sum_var + p * (1.0 - p);
            Key nk{std::get<0>(key) + 1, std::llround(sp / grid.width_p), std::llround(sv / grid.width_var)};
            auto it = next.find(nk);
            if (it == next.end()) {
                next.emplace(nk, Entry{cost, sp, sv, arena.extend(e.node, i)});
            } else if (cost < it->second.cost) {
                it->second = Entry{cost, sp, sv, arena.extend(e.node, i)};
            }
        }
        detail::enforce_state_cap(next, limits, out.truncated, "moment DP");
        layer = std::move(next);
    }
    for (const auto& [key, e] : layer) {
        out.candidates.push_back(MomentCandidate{arena.materialize(e.node), e.sum_p, e.sum_var, e.cost});
    }
    return out;
}

inline MomentDpResult small_items_moment_dp(std::span<const MkuItem> block, std::size_t target_count,
                                            MomentGrid grid, double capacity_hint = HUGE_VAL,
                                            const DpLimits& limits = {}) {
    auto all = moment_dp_frontier(block, target_count, grid, capacity_hint, limits);
    std::erase_if(all.candidates, [&](const MomentCandidate& c) { return c.items.size() != target_count; });
    return all;
}

}  // namespace bvu
