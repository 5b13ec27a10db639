#pragma once

// Election model: voters split into groups V_1..V_m by the candidate they
// vote for absent bribery. Group 0 holds the unbribed winner c_1, group m-1
// the designated candidate c_m. Only voters outside V_m can be bribed.

#include <bvu/errors.hpp>
#include <bvu/probdist.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvu {

using VoterId = std::size_t;

/// Price and success probability of one voter, before ids are assigned.
struct VoterSpec {
    double price = 0.0;
    double prob = 0.0;

    friend bool operator==(const VoterSpec&, const VoterSpec&) = default;
};

struct Voter {
    VoterId id = 0;
    std::size_t group = 0;  ///< 0-based candidate index this voter supports unbribed
    double price = 0.0;
    double success_prob = 0.0;
};

/// Immutable election. Ids are assigned in group order, V_1 first, so the
/// voters of group j occupy one contiguous id range.
class ElectionInstance {
public:
    ElectionInstance() = default;

    ElectionInstance(const std::vector<std::vector<VoterSpec>>& groups, double budget)
        : budget_(budget) {
        offsets_.reserve(groups.size() + 1);
        offsets_.push_back(0);
        for (std::size_t j = 0; j < groups.size(); ++j) {
            for (const auto& v : groups[j]) {
                voters_.push_back(Voter{voters_.size(), j, v.price, v.prob});
            }
            offsets_.push_back(voters_.size());
        }
    }

    std::size_t num_candidates() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_voters() const noexcept { return voters_.size(); }
    std::size_t designated_group() const noexcept { return num_candidates() - 1; }
    double budget() const noexcept { return budget_; }

    const std::vector<Voter>& voters() const noexcept { return voters_; }
    const Voter& voter(VoterId id) const { return voters_.at(id); }

    std::span<const Voter> group(std::size_t j) const {
        return std::span<const Voter>(voters_).subspan(offsets_.at(j), offsets_.at(j + 1) - offsets_.at(j));
    }
    std::size_t group_size(std::size_t j) const { return offsets_.at(j + 1) - offsets_.at(j); }

    /// r = |V_1| - |V_m|.
    long long vote_gap() const {
        return static_cast<long long>(group_size(0)) - static_cast<long long>(group_size(designated_group()));
    }

    bool bribable(VoterId id) const { return id < voters_.size() && voters_[id].group != designated_group(); }

    std::vector<std::vector<VoterSpec>> group_specs() const {
        std::vector<std::vector<VoterSpec>> out(num_candidates());
        for (const auto& v : voters_) out[v.group].push_back(VoterSpec{v.price, v.success_prob});
        return out;
    }

    friend bool operator==(const ElectionInstance& a, const ElectionInstance& b) {
        return a.budget_ == b.budget_ && a.group_specs() == b.group_specs();
    }

private:
    std::vector<Voter> voters_;
    std::vector<std::size_t> offsets_;
    double budget_ = 0.0;
};

/// Every invariant violation, in a stable order. Empty means valid.
inline std::vector<std::string> validate(const ElectionInstance& inst) {
    std::vector<std::string> out;
    const std::size_t m = inst.num_candidates();
    if (m < 2) {
        out.push_back("fewer than 2 candidates (m=" + std::to_string(m) + ")");
        return out;
    }
    for (std::size_t j = 1; j < m; ++j) {
        if (inst.group_size(0) <= inst.group_size(j)) {
            std::ostringstream s;
            s << "c1 not strict winner: |V1|=" << inst.group_size(0) << " <= |V" << j + 1
              << "|=" << inst.group_size(j);
            out.push_back(s.str());
        }
    }
    if (!(inst.budget() >= 0.0) || !std::isfinite(inst.budget())) {
        out.push_back("budget must be finite and non-negative");
    }
    for (const auto& v : inst.voters()) {
        if (!(v.success_prob >= 0.0 && v.success_prob <= 1.0)) {
            out.push_back("success_prob out of [0,1] at voter " + std::to_string(v.id));
        }
        if (!(v.price >= 0.0) || !std::isfinite(v.price)) {
            out.push_back("price negative or non-finite at voter " + std::to_string(v.id));
        }
    }
    return out;
}

inline void require_valid(const ElectionInstance& inst) {
    auto v = validate(inst);
    if (!v.empty()) throw invalid_instance(std::move(v));
}

/// Rejects ids that are out of range, repeated, or belong to V_m.
inline void check_bribe_set(const ElectionInstance& inst, std::span<const VoterId> bribed) {
    std::vector<char> seen(inst.num_voters(), 0);
    for (VoterId id : bribed) {
        if (id >= inst.num_voters()) throw std::invalid_argument("voter id " + std::to_string(id) + " out of range");
        if (!inst.bribable(id)) {
            throw std::invalid_argument("voter " + std::to_string(id) + " belongs to the designated candidate's group");
        }
        if (seen[id]++) throw std::invalid_argument("voter " + std::to_string(id) + " listed twice");
    }
}

inline double bribe_cost(const ElectionInstance& inst, std::span<const VoterId> bribed) {
    double cost = 0.0;
    for (VoterId id : bribed) cost += inst.voter(id).price;
    return cost;
}

namespace detail {

inline long long xi_from_counts(const ElectionInstance& inst, std::span<const std::size_t> bribed_per_group) {
    const std::size_t m = inst.num_candidates();
    const auto designated = static_cast<long long>(inst.group_size(m - 1));
    long long best = -1;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const long long deficit = static_cast<long long>(inst.group_size(j)) -
                                  static_cast<long long>(bribed_per_group[j]) - designated;
        best = std::max(best, deficit);
    }
    return best;
}

}  // namespace detail

/// Largest remaining vote deficit max_j(|V_j| - |V_j'| - |V_m|), clamped
/// at -1. The designated candidate needs xi + 1 counted bribed votes.
inline long long xi(const ElectionInstance& inst, std::span<const VoterId> bribed) {
    check_bribe_set(inst, bribed);
    std::vector<std::size_t> counts(inst.num_candidates(), 0);
    for (VoterId id : bribed) ++counts[inst.voter(id).group];
    return detail::xi_from_counts(inst, counts);
}

/// Exact probability that c_m strictly beats every rival after bribing
/// `bribed`. Ties go against c_m.
inline double evaluate_win_prob(const ElectionInstance& inst, std::span<const VoterId> bribed) {
    const long long need = xi(inst, bribed) + 1;
    std::vector<double> probs;
    probs.reserve(bribed.size());
    for (VoterId id : bribed) probs.push_back(inst.voter(id).success_prob);
    return pb_tail(probs, need);
}

struct BribeSolution {
    std::vector<VoterId> chosen;  ///< sorted ascending
    double cost = 0.0;
    /// Exact objective of `chosen`: the win probability for election
    /// solvers, the knapsack objective for KU/MKU solvers.
    double win_prob = 0.0;
    std::string branch_tag;
    bool truncated = false;  ///< some enumeration hit a cap; the additive guarantee may not hold
};

namespace detail {

/// Objective values within this relative distance are treated as equal
/// before tie-breaks. Relative so that tiny objectives (gadget values go
/// down to 2^-1022) are never merged with 0.
inline constexpr double kObjectiveTieBand = 1e-12;

inline bool objectives_tie(double a, double b) {
    return std::abs(a - b) <= kObjectiveTieBand * std::max(std::abs(a), std::abs(b));
}

/// Higher value, then lower cost, then lexicographically smaller id set.
inline bool better_candidate(double value_a, double cost_a, std::span<const VoterId> ids_a,
                             double value_b, double cost_b, std::span<const VoterId> ids_b) {
    if (!objectives_tie(value_a, value_b)) return value_a > value_b;
    if (cost_a != cost_b) return cost_a < cost_b;
    return std::lexicographical_compare(ids_a.begin(), ids_a.end(), ids_b.begin(), ids_b.end());
}

inline bool better_solution(const BribeSolution& a, const BribeSolution& b) {
    return better_candidate(a.win_prob, a.cost, a.chosen, b.win_prob, b.cost, b.chosen);
}

}  // namespace detail

}  // namespace bvu
