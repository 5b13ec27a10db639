#pragma once

// Exhaustive solvers for BVU, KU and MKU. These are the ground truth the
// approximation is measured against, so they stay deliberately simple:
// depth-first enumeration in ascending item order, one incremental
// Poisson-binomial convolution per tree edge, and budget pruning.

#include <bvu/errors.hpp>
#include <bvu/model.hpp>
#include <bvu/probdist.hpp>
#include <bvu/reductions.hpp>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bvu {

struct ExactConfig {
    std::size_t max_items = 22;
    bool prune_by_budget = true;
};

namespace detail {

struct EnumItem {
    double size = 0.0;
    double prob = 0.0;
    std::size_t group = 0;
    VoterId id = 0;
};

/// State handed to the visitor for one subset.
struct SubsetView {
    std::span<const std::size_t> chosen;       ///< positions into the item list, ascending
    std::span<const double> pmf;                ///< length chosen.size() + 1
    std::span<const std::size_t> group_counts;
    double cost = 0.0;

    double tail(long long k) const {
        if (k <= 0) return 1.0;
        double t = 0.0;
        for (auto h = static_cast<std::size_t>(k); h < pmf.size(); ++h) t += pmf[h];
        return t;
    }
};

/// Calls visit(SubsetView) once for every subset with cost <= capacity, in
/// lexicographic order of position sets. `descend(group_counts)` may veto
/// extending the current subset further.
template <class Visit, class Descend>
void enumerate_subsets(std::span<const EnumItem> items, std::size_t num_groups, double capacity, bool prune,
                       Visit&& visit, Descend&& descend) {
    const std::size_t n = items.size();
    std::vector<std::vector<double>> pmfs(n + 1, std::vector<double>(n + 1, 0.0));
    pmfs[0][0] = 1.0;
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    std::vector<std::size_t> counts(num_groups, 0);

    auto rec = [&](auto&& self, std::size_t start, double cost) -> void {
        const std::size_t depth = chosen.size();
        if (cost <= capacity) {
            visit(SubsetView{chosen, std::span<const double>(pmfs[depth]).first(depth + 1), counts, cost});
        }
        if (!descend(std::span<const std::size_t>(counts))) return;
        for (std::size_t i = start; i < n; ++i) {
            const double next_cost = cost + items[i].size;
            if (prune && next_cost > capacity) continue;
            auto& next = pmfs[depth + 1];
            const auto& cur = pmfs[depth];
            const double p = items[i].prob;
            next[0] = cur[0] * (1.0 - p);
            for (std::size_t h = 1; h <= depth; ++h) next[h] = cur[h] * (1.0 - p) + cur[h - 1] * p;
            next[depth + 1] = cur[depth] * p;
            chosen.push_back(i);
            ++counts[items[i].group];
            self(self, i + 1, next_cost);
            --counts[items[i].group];
            chosen.pop_back();
        }
    };
    rec(rec, 0, 0.0);
}

inline void check_size(std::size_t n, const ExactConfig& cfg) {
    if (cfg.max_items < 1) throw std::invalid_argument("ExactConfig.max_items must be >= 1");
    if (n > cfg.max_items) {
        throw size_limit_exceeded("exact solver: " + std::to_string(n) + " bribable items exceed the cap of " +
                                  std::to_string(cfg.max_items));
    }
}

/// Keeps the best subset seen under the global tie-break.
class BestTracker {
public:
    void offer(double value, double cost, std::vector<VoterId> ids) {
        std::sort(ids.begin(), ids.end());
        if (!have_ || better_candidate(value, cost, ids, value_, cost_, ids_)) {
            have_ = true;
            value_ = value;
            cost_ = cost;
            ids_ = std::move(ids);
        }
    }
    bool has_value() const { return have_; }
    const std::vector<VoterId>& ids() const { return ids_; }
    double value() const { return value_; }
    double cost() const { return cost_; }

private:
    bool have_ = false;
    double value_ = 0.0;
    double cost_ = 0.0;
    std::vector<VoterId> ids_;
};

inline std::vector<VoterId> ids_of(std::span<const EnumItem> items, std::span<const std::size_t> chosen) {
    std::vector<VoterId> out;
    out.reserve(chosen.size());
    for (auto i : chosen) out.push_back(items[i].id);
    return out;
}

}  // namespace detail

/// Budget-feasible bribe set maximizing the exact win probability; ties go
/// to lower cost, then the lexicographically smallest id set.
inline BribeSolution solve_bvu_exact(const ElectionInstance& inst, const ExactConfig& cfg = {}) {
    require_valid(inst);
    std::vector<detail::EnumItem> items;
    for (const auto& v : inst.voters()) {
        if (inst.bribable(v.id)) items.push_back({v.price, v.success_prob, v.group, v.id});
    }
    detail::check_size(items.size(), cfg);

    detail::BestTracker best;
    detail::enumerate_subsets(
        items, inst.num_candidates(), inst.budget(), cfg.prune_by_budget,
        [&](const detail::SubsetView& s) {
            const long long need = detail::xi_from_counts(inst, s.group_counts) + 1;
            best.offer(s.tail(need), s.cost, detail::ids_of(items, s.chosen));
        },
        [](std::span<const std::size_t>) { return true; });

    BribeSolution sol;
    sol.chosen = best.ids();
    sol.cost = bribe_cost(inst, sol.chosen);
    sol.win_prob = evaluate_win_prob(inst, sol.chosen);
    sol.branch_tag = "exact";
    return sol;
}

/// KU optimum; `chosen` holds item indices and `win_prob` the KU objective.
inline BribeSolution solve_ku_exact(const KuInstance& ku, const ExactConfig& cfg = {}) {
    std::vector<detail::EnumItem> items;
    for (std::size_t i = 0; i < ku.items.size(); ++i) {
        detail::check_prob(ku.items[i].prob, i);
        items.push_back({ku.items[i].size, ku.items[i].prob, 0, i});
    }
    detail::check_size(items.size(), cfg);

    detail::BestTracker best;
    detail::enumerate_subsets(
        items, 1, ku.capacity, cfg.prune_by_budget,
        [&](const detail::SubsetView& s) {
            const long long need = ku.r + 1 - static_cast<long long>(s.chosen.size());
            best.offer(s.tail(need), s.cost, detail::ids_of(items, s.chosen));
        },
        [](std::span<const std::size_t>) { return true; });

    BribeSolution sol;
    sol.chosen = best.ids();
    sol.cost = 0.0;
    for (auto i : sol.chosen) sol.cost += ku.items[i].size;
    sol.win_prob = ku_value(ku, sol.chosen);
    sol.branch_tag = "exact";
    return sol;
}

/// MKU optimum, or nullopt when no subset meets capacity and quotas.
/// `chosen` holds item ids and `win_prob` the MKU objective Pr(sum >= k).
inline std::optional<BribeSolution> solve_mku_exact(const MkuInstance& mku, const ExactConfig& cfg = {}) {
    check_mku(mku);
    if (!mku_quotas_attainable(mku)) return std::nullopt;
    std::vector<detail::EnumItem> items;
    for (std::size_t j = 0; j < mku.groups.size(); ++j) {
        for (const auto& it : mku.groups[j]) items.push_back({it.size, it.prob, j, it.id});
    }
    detail::check_size(items.size(), cfg);

    const auto j0_quota = static_cast<std::size_t>(mku.quotas[mku.j0]);
    detail::BestTracker best;
    detail::enumerate_subsets(
        items, mku.groups.size(), mku.capacity, cfg.prune_by_budget,
        [&](const detail::SubsetView& s) {
            if (!mku_counts_ok(mku, s.group_counts)) return;
            best.offer(s.tail(mku.k), s.cost, detail::ids_of(items, s.chosen));
        },
        [&](std::span<const std::size_t> counts) { return counts[mku.j0] <= j0_quota; });

    if (!best.has_value()) return std::nullopt;
    BribeSolution sol;
    sol.chosen = best.ids();
    std::vector<double> probs;
    for (const auto& it : items) {
        if (std::binary_search(sol.chosen.begin(), sol.chosen.end(), it.id)) {
            sol.cost += it.size;
            probs.push_back(it.prob);
        }
    }
    sol.win_prob = pb_tail(probs, mku.k);
    sol.branch_tag = "exact";
    return sol;
}

}  // namespace bvu
