#pragma once

// Additive-epsilon approximation for MKU and, through the (alpha, j0)
// guesses, for BVU.
//
// The solver builds a pool of candidate item sets and returns the one with
// the best *exact* objective:
//   Case 1  some group contributes >= 2k big items: one greedy candidate per
//           group (Markov's inequality puts it within eps of certain success).
//   Case 2  every group contributes <= 2k-1 big items: for each group and
//           each (big count, small count) pair, big items come from the
//           rounded-probability compositions and small items from both DPs.
//           Per-group candidates are pruned by (tail dominance, cost) and
//           assembled across groups.
// Objectives are always recomputed exactly, so truncated enumerations can
// weaken the guarantee but never misreport a value.

#include <bvu/approx/big_items.hpp>
#include <bvu/approx/config.hpp>
#include <bvu/approx/small_items.hpp>
#include <bvu/errors.hpp>
#include <bvu/model.hpp>
#include <bvu/probdist.hpp>
#include <bvu/reductions.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace bvu {

namespace detail {

inline void sort_by_size_then_id(std::vector<std::size_t>& idx, std::span<const MkuItem> items) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (items[a].size != items[b].size) return items[a].size < items[b].size;
        return items[a].id < items[b].id;
    });
}

/// Exact objective and cost of a chosen (group, position) set.
inline BribeSolution make_mku_solution(const MkuInstance& mku,
                                       const std::vector<std::vector<std::size_t>>& picks, std::string tag) {
    BribeSolution sol;
    std::vector<std::pair<VoterId, std::pair<double, double>>> chosen;
    for (std::size_t j = 0; j < picks.size(); ++j) {
        for (auto i : picks[j]) {
            const auto& it = mku.groups[j][i];
            chosen.push_back({it.id, {it.size, it.prob}});
        }
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<double> probs;
    for (const auto& [id, sp] : chosen) {
        sol.chosen.push_back(id);
        sol.cost += sp.first;
        probs.push_back(sp.second);
    }
    sol.win_prob = pb_tail(probs, mku.k);
    sol.branch_tag = std::move(tag);
    return sol;
}

/// Tracks the best solution under the global tie-break.
struct SolutionPool {
    std::optional<BribeSolution> best;
    bool truncated = false;

    void offer(BribeSolution s) {
        if (!best || better_solution(s, *best)) best = std::move(s);
    }
};

/// Cheapest way to meet every quota with exactly the quota in each group
/// (k <= 0 makes any feasible set optimal).
inline std::optional<BribeSolution> quota_greedy(const MkuInstance& mku) {
    std::vector<std::vector<std::size_t>> picks(mku.groups.size());
    for (std::size_t j = 0; j < mku.quotas.size(); ++j) {
        std::vector<std::size_t> idx(mku.groups[j].size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        sort_by_size_then_id(idx, mku.groups[j]);
        const auto need = static_cast<std::size_t>(mku.quotas[j]);
        if (need > idx.size()) return std::nullopt;
        picks[j].assign(idx.begin(), idx.begin() + need);
    }
    auto sol = make_mku_solution(mku, picks, "quota-greedy");
    if (sol.cost > mku.capacity) return std::nullopt;
    return sol;
}

}  // namespace detail

/// Case-1 candidate for group `j_star`: its 2k cheapest big items, then the
/// cheapest remaining items of each group until every quota is met (exactly
/// for j0). Empty when the group has fewer than 2k big items, when j_star is
/// j0 and 2k exceeds its exact quota, or when the result is over capacity.
inline std::optional<BribeSolution> case1_greedy(const MkuInstance& mku, std::size_t j_star, double epsilon) {
    check_mku(mku);
    if (j_star >= mku.groups.size()) throw std::out_of_range("case1_greedy: group index out of range");
    if (!mku_quotas_attainable(mku)) return std::nullopt;

    const auto need_big = static_cast<std::size_t>(std::max<long long>(0, 2 * mku.k));
    if (j_star == mku.j0 && static_cast<long long>(need_big) > mku.quotas[mku.j0]) return std::nullopt;

    std::vector<std::vector<std::size_t>> picks(mku.groups.size());
    {
        const auto& g = mku.groups[j_star];
        std::vector<std::size_t> big;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (is_big(g[i].prob, epsilon)) big.push_back(i);
        }
        if (big.size() < need_big) return std::nullopt;
        detail::sort_by_size_then_id(big, g);
        picks[j_star].assign(big.begin(), big.begin() + need_big);
    }
    for (std::size_t j = 0; j < mku.quotas.size(); ++j) {
        const auto quota = static_cast<std::size_t>(mku.quotas[j]);
        if (picks[j].size() >= quota) continue;
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < mku.groups[j].size(); ++i) {
            if (std::find(picks[j].begin(), picks[j].end(), i) == picks[j].end()) rest.push_back(i);
        }
        detail::sort_by_size_then_id(rest, mku.groups[j]);
        const std::size_t add = quota - picks[j].size();
        if (add > rest.size()) return std::nullopt;
        picks[j].insert(picks[j].end(), rest.begin(), rest.begin() + add);
    }
    auto sol = detail::make_mku_solution(mku, picks, "case1-greedy(j*=" + std::to_string(j_star + 1) + ")");
    if (sol.cost > mku.capacity) return std::nullopt;
    return sol;
}

/// Concrete parameters the Case-2 machinery runs with for one instance.
struct Case2Params {
    double epsilon = 0.25;
    double delta = 0.0;          ///< big-item grid ratio
    std::size_t eta_cells = 1;   ///< 1/eta
    std::size_t zeta = 1;        ///< pmf entries tracked (<= k: only Pr(sum >= h), h <= k, matter)
    std::size_t grid_levels = 0; ///< cap on big-item grid levels
    DpLimits limits;
    std::size_t max_enumerations = 0;
    double moment_width_scale = 0.0;  ///< per-block cell width = scale / |block|
};

inline Case2Params case2_params(const MkuInstance& mku, const ApproxConfig& cfg) {
    Case2Params p;
    p.epsilon = effective_epsilon(cfg);
    const auto m = static_cast<double>(mku.groups.size());
    const auto n = static_cast<double>(std::max<std::size_t>(1, mku.num_items()));
    const auto k = static_cast<double>(std::max<long long>(1, mku.k));
    p.delta = p.epsilon / (m * k);
    const double cells = std::ceil(m * n * n / p.epsilon);
    const double zeta_formula = std::pow(m / p.epsilon, 5.0);
    p.moment_width_scale = p.epsilon / (4.0 * m);
    if (cfg.theoretical_mode) {
        p.eta_cells = static_cast<std::size_t>(cells);
        p.zeta = static_cast<std::size_t>(std::min(zeta_formula, k));
        p.grid_levels = std::numeric_limits<std::size_t>::max();
        p.limits = DpLimits{kTheoreticalStateLimit, true};
        p.max_enumerations = std::numeric_limits<std::size_t>::max();
    } else {
        p.eta_cells = static_cast<std::size_t>(std::min(cells, static_cast<double>(cfg.grid_cells)));
        p.zeta = static_cast<std::size_t>(std::min({zeta_formula, k, static_cast<double>(cfg.zeta_cap)}));
        p.grid_levels = cfg.grid_cells;
        p.limits = DpLimits{cfg.max_dp_states, false};
        p.max_enumerations = cfg.max_branch_enumerations;
    }
    p.zeta = std::max<std::size_t>(1, p.zeta);
    return p;
}

namespace detail {

struct GroupCandidate {
    std::vector<std::size_t> items;   ///< positions in the group, ascending
    double cost = 0.0;
    std::vector<double> tails;        ///< Pr(sum >= h), h = 1..k
    std::size_t big_count = 0;
    std::size_t small_count = 0;
};

inline bool dominates(const GroupCandidate& a, const GroupCandidate& b) {
    if (a.cost > b.cost) return false;
    for (std::size_t h = 0; h < a.tails.size(); ++h) {
        if (a.tails[h] < b.tails[h]) return false;
    }
    return true;
}

/// All Case-2 candidates for group j, pruned to the (tail, cost) frontier.
inline std::vector<GroupCandidate> case2_group_frontier(const MkuInstance& mku, std::size_t j,
                                                        const Case2Params& par, const BigItemGrid& grid,
                                                        bool& truncated) {
    const auto& items = mku.groups[j];
    const auto k = static_cast<std::size_t>(mku.k);
    const ItemSplit split = classify_items(items, par.epsilon);

    std::vector<MkuItem> big_block, small_block;
    for (auto i : split.big) big_block.push_back(items[i]);
    for (auto i : split.small) small_block.push_back(items[i]);

    const std::size_t max_big = std::min(2 * k - 1, big_block.size());
    const bool is_j0 = j == mku.j0;
    const bool has_quota = j < mku.quotas.size();
    const auto quota = static_cast<std::size_t>(mku.quota(j));
    auto count_allowed = [&](std::size_t total) {
        if (!has_quota) return true;
        return is_j0 ? total == quota : total >= quota;
    };

    // Small-item candidates by count, union of both DPs, deduplicated.
    const std::size_t max_small = small_block.size();
    std::vector<std::set<std::vector<std::size_t>>> small_by_count(max_small + 1);
    if (!small_block.empty()) {
        auto dist = dist_dp_frontier(small_block, max_small, par.zeta, par.eta_cells, mku.capacity, par.limits);
        truncated = truncated || dist.truncated;
        for (auto& c : dist.candidates) small_by_count[c.items.size()].insert(std::move(c.items));

        const double width = par.moment_width_scale / static_cast<double>(small_block.size());
        const double floor_width = static_cast<double>(small_block.size()) / static_cast<double>(par.eta_cells);
        MomentGrid mg{std::max(width, floor_width), std::max(width, floor_width)};
        if (par.limits.strict) mg = MomentGrid{width, width};
        auto mom = moment_dp_frontier(small_block, max_small, mg, mku.capacity, par.limits);
        truncated = truncated || mom.truncated;
        for (auto& c : mom.candidates) small_by_count[c.items.size()].insert(std::move(c.items));
    } else {
        small_by_count[0].insert(std::vector<std::size_t>{});
    }

    std::vector<GroupCandidate> all;
    std::size_t budget = par.max_enumerations;
    for (std::size_t b = 0; b <= max_big; ++b) {
        bool any_s = false;
        for (std::size_t s = 0; s <= max_small; ++s) any_s = any_s || count_allowed(b + s);
        if (!any_s) continue;
        auto bigs = select_big_items(big_block, b, grid, budget);
        truncated = truncated || bigs.truncated;
        budget -= std::min(budget, bigs.subsets.size());
        for (std::size_t s = 0; s <= max_small; ++s) {
            if (!count_allowed(b + s)) continue;
            for (const auto& bs : bigs.subsets) {
                for (const auto& ss : small_by_count[s]) {
                    GroupCandidate c;
                    c.big_count = b;
                    c.small_count = s;
                    std::vector<double> probs;
                    for (auto i : bs) c.items.push_back(split.big[i]);
                    for (auto i : ss) c.items.push_back(split.small[i]);
                    std::sort(c.items.begin(), c.items.end());
                    for (auto i : c.items) {
                        c.cost += items[i].size;
                        probs.push_back(items[i].prob);
                    }
                    if (c.cost > mku.capacity) continue;
                    const auto pmf = pb_pmf_prefix(probs, k);
                    double below = 0.0;
                    c.tails.resize(k);
                    for (std::size_t h = 1; h <= k; ++h) {
                        below += pmf[h - 1];
                        c.tails[h - 1] = 1.0 - below;
                    }
                    all.push_back(std::move(c));
                }
            }
        }
    }

    std::stable_sort(all.begin(), all.end(), [](const GroupCandidate& a, const GroupCandidate& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.tails != b.tails) return a.tails > b.tails;
        return a.items < b.items;
    });
    std::vector<GroupCandidate> frontier;
    for (auto& c : all) {
        const bool dominated =
            std::any_of(frontier.begin(), frontier.end(), [&](const GroupCandidate& f) { return dominates(f, c); });
        if (!dominated) frontier.push_back(std::move(c));
    }
    return frontier;
}

}  // namespace detail

/// Best candidate by exact objective, or nullopt when no candidate meets
/// capacity and quotas. `chosen` holds item ids; `win_prob` is the exact
/// MKU objective Pr(sum >= k).
inline std::optional<BribeSolution> solve_mku_approx(const MkuInstance& mku, const ApproxConfig& cfg = {}) {
    check_mku(mku);
    const double eps = effective_epsilon(cfg);
    if (!mku_quotas_attainable(mku)) return std::nullopt;

    if (mku.k <= 0) return detail::quota_greedy(mku);

    detail::SolutionPool pool;
    for (std::size_t j = 0; j < mku.groups.size(); ++j) {
        if (auto c = case1_greedy(mku, j, eps)) pool.offer(std::move(*c));
    }

    const Case2Params par = case2_params(mku, cfg);
    const BigItemGrid grid = make_big_item_grid(eps, par.delta, par.grid_levels);
    pool.truncated = pool.truncated || grid.coarsened;

    std::vector<std::vector<detail::GroupCandidate>> frontiers;
    for (std::size_t j = 0; j < mku.groups.size(); ++j) {
        frontiers.push_back(detail::case2_group_frontier(mku, j, par, grid, pool.truncated));
        if (frontiers.back().empty()) {
            frontiers.clear();
            break;
        }
    }

    if (!frontiers.empty()) {
        std::size_t assemblies = 0;
        std::vector<const detail::GroupCandidate*> pick(frontiers.size(), nullptr);
        auto rec = [&](auto&& self, std::size_t j, double cost) -> void {
            if (pool.truncated && assemblies >= par.max_enumerations) return;
            if (j == frontiers.size()) {
                if (assemblies >= par.max_enumerations) {
                    pool.truncated = true;
                    return;
                }
                ++assemblies;
                std::vector<std::vector<std::size_t>> picks(frontiers.size());
                std::ostringstream tag;
                tag << "case2(b=[";
                for (std::size_t g = 0; g < pick.size(); ++g) tag << (g ? "," : "") << pick[g]->big_count;
                tag << "],s=[";
                for (std::size_t g = 0; g < pick.size(); ++g) tag << (g ? "," : "") << pick[g]->small_count;
                tag << "])";
                for (std::size_t g = 0; g < pick.size(); ++g) picks[g] = pick[g]->items;
                pool.offer(detail::make_mku_solution(mku, picks, tag.str()));
                return;
            }
            for (const auto& c : frontiers[j]) {
                // frontiers are sorted by cost
                if (cost + c.cost > mku.capacity) break;
                pick[j] = &c;
                self(self, j + 1, cost + c.cost);
            }
        };
        rec(rec, 0, 0.0);
    }

    if (!pool.best) return std::nullopt;
    pool.best->truncated = pool.truncated;
    return pool.best;
}

/// Additive-epsilon BVU solver: one MKU instance per (alpha, j0) guess,
/// mapped back to voter ids and re-evaluated exactly.
inline BribeSolution solve_bvu_approx(const ElectionInstance& inst, const ApproxConfig& cfg = {}) {
    require_valid(inst);
    check_config(cfg);

    std::optional<BribeSolution> best;
    bool truncated = false;
    for (const auto& guess : enumerate_guesses(inst)) {
        const MkuInstance mku = bvu_to_mku(inst, guess);
        if (mku.infeasibility) continue;
        auto sol = solve_mku_approx(mku, cfg);
        if (!sol) continue;
        truncated = truncated || sol->truncated;
        BribeSolution s;
        s.chosen = sol->chosen;
        s.cost = bribe_cost(inst, s.chosen);
        s.win_prob = evaluate_win_prob(inst, s.chosen);
        s.branch_tag = "alpha=" + std::to_string(guess.alpha) + ",j0=" + std::to_string(guess.j0 + 1) + ":" +
                       sol->branch_tag;
        if (!best || detail::better_solution(s, *best)) best = std::move(s);
    }
    if (!best) {
        // The empty set is always feasible (alpha = r, j0 = 1 admits it).
        best = BribeSolution{{}, 0.0, evaluate_win_prob(inst, {}), "empty", false};
    }
    best->truncated = truncated;
    return *best;
}

}  // namespace bvu
