#pragma once

// Instance transformations:
//   * two-candidate elections  -> knapsack with uncertainty (KU)
//   * any election + a guess    -> multi-block KU (MKU) with cardinality quotas
//   * d-sum                     -> KU gadget with a YES/NO objective gap

#include <bvu/errors.hpp>
#include <bvu/model.hpp>
#include <bvu/probdist.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvu {

struct KuItem {
    double size = 0.0;
    double prob = 0.0;

    friend bool operator==(const KuItem&, const KuItem&) = default;
};

/// Maximize Pr(sum_{i in I} P_i >= r + 1 - |I|) subject to sum q_i <= capacity.
struct KuInstance {
    double capacity = 0.0;
    std::vector<KuItem> items;
    long long r = 1;

    friend bool operator==(const KuInstance&, const KuInstance&) = default;
};

/// KU objective of an index set (indices into items).
inline double ku_value(const KuInstance& ku, std::span<const std::size_t> chosen) {
    std::vector<double> probs;
    probs.reserve(chosen.size());
    for (auto i : chosen) probs.push_back(ku.items.at(i).prob);
    return pb_tail(probs, ku.r + 1 - static_cast<long long>(chosen.size()));
}

struct MkuItem {
    VoterId id = 0;  ///< voter id for reduced instances, position otherwise
    double size = 0.0;
    double prob = 0.0;

    friend bool operator==(const MkuItem&, const MkuItem&) = default;
};

/// Multi-block KU. Group j < m-1 must contribute at least quotas[j] items,
/// group j0 exactly quotas[j0]; the last group has no quota.
struct MkuInstance {
    double capacity = 0.0;
    std::vector<std::vector<MkuItem>> groups;
    std::vector<long long> quotas;  ///< size m-1
    std::size_t j0 = 0;             ///< 0-based, < m-1
    long long k = 0;                ///< success threshold; k <= 0 is certain
    /// Set when the reduction already knows no item set can meet the
    /// quotas; solvers report infeasible without searching.
    std::optional<std::string> infeasibility;

    std::size_t num_groups() const noexcept { return groups.size(); }
    std::size_t num_items() const noexcept {
        std::size_t n = 0;
        for (const auto& g : groups) n += g.size();
        return n;
    }
    /// Quota of group j (0 for the unconstrained last group).
    long long quota(std::size_t j) const { return j < quotas.size() ? quotas[j] : 0; }

    friend bool operator==(const MkuInstance&, const MkuInstance&) = default;
};

/// Structural checks on an MKU instance; throws std::invalid_argument.
inline void check_mku(const MkuInstance& mku) {
    if (mku.groups.size() < 2) throw std::invalid_argument("MKU needs at least 2 groups");
    if (mku.quotas.size() != mku.groups.size() - 1) {
        throw std::invalid_argument("MKU needs exactly m-1 quotas");
    }
    if (mku.j0 + 1 >= mku.groups.size()) throw std::invalid_argument("MKU j0 out of range");
    if (!(mku.capacity >= 0.0)) throw std::invalid_argument("MKU capacity must be non-negative");
    for (const auto& g : mku.groups) {
        for (const auto& it : g) {
            if (!(it.prob >= 0.0 && it.prob <= 1.0)) throw std::invalid_argument("MKU item probability out of [0,1]");
            if (!(it.size >= 0.0)) throw std::invalid_argument("MKU item size must be non-negative");
        }
    }
}

/// Quotas can be met at all (ignoring capacity).
inline bool mku_quotas_attainable(const MkuInstance& mku) {
    if (mku.infeasibility) return false;
    for (std::size_t j = 0; j < mku.quotas.size(); ++j) {
        if (mku.quotas[j] < 0 || mku.quotas[j] > static_cast<long long>(mku.groups[j].size())) return false;
    }
    return true;
}

/// Quota check for per-group counts.
inline bool mku_counts_ok(const MkuInstance& mku, std::span<const std::size_t> counts) {
    for (std::size_t j = 0; j < mku.quotas.size(); ++j) {
        const auto c = static_cast<long long>(counts[j]);
        if (j == mku.j0 ? c != mku.quotas[j] : c < mku.quotas[j]) return false;
    }
    return true;
}

/// Two-candidate election to KU: the items are the voters of V_1.
inline KuInstance bvu_to_ku(const ElectionInstance& inst) {
    if (inst.num_candidates() != 2) {
        throw std::invalid_argument("bvu_to_ku needs exactly 2 candidates, got " +
                                    std::to_string(inst.num_candidates()));
    }
    KuInstance ku;
    ku.capacity = inst.budget();
    ku.r = inst.vote_gap();
    for (const auto& v : inst.group(0)) ku.items.push_back(KuItem{v.price, v.success_prob});
    return ku;
}

/// A guess of xi(I*) (alpha in -1..r) and of the group j0 attaining it.
struct MkuGuess {
    long long alpha = 0;
    std::size_t j0 = 0;  ///< 0-based

    friend bool operator==(const MkuGuess&, const MkuGuess&) = default;
};

inline void check_guess(const ElectionInstance& inst, const MkuGuess& g) {
    const long long r = inst.vote_gap();
    if (g.alpha < -1 || g.alpha > r) {
        throw std::out_of_range("alpha " + std::to_string(g.alpha) + " outside [-1, " + std::to_string(r) + "]");
    }
    if (g.j0 + 1 >= inst.num_candidates()) {
        throw std::out_of_range("j0 " + std::to_string(g.j0 + 1) + " outside [1, " +
                                std::to_string(inst.num_candidates() - 1) + "]");
    }
}

/// MKU instance for one (alpha, j0) guess. Quota
/// Delta_j = max(0, |V_j| - |V_m| - alpha), threshold k = alpha + 1.
/// A set meets the quotas exactly when its xi equals alpha with j0 attaining
/// the maximum. When |V_j0| - |V_m| - alpha < 0 no set can attain it, and the
/// instance is marked infeasible rather than clamped.
inline MkuInstance bvu_to_mku(const ElectionInstance& inst, const MkuGuess& guess) {
    require_valid(inst);
    check_guess(inst, guess);
    const std::size_t m = inst.num_candidates();
    const auto designated = static_cast<long long>(inst.group_size(m - 1));

    MkuInstance mku;
    mku.capacity = inst.budget();
    mku.j0 = guess.j0;
    mku.k = guess.alpha + 1;
    mku.groups.resize(m);
    for (std::size_t j = 0; j + 1 < m; ++j) {
        for (const auto& v : inst.group(j)) mku.groups[j].push_back(MkuItem{v.id, v.price, v.success_prob});
    }
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const long long raw = static_cast<long long>(inst.group_size(j)) - designated - guess.alpha;
        mku.quotas.push_back(raw >= 0 ? raw : 0);
        if (j == guess.j0 && raw < 0) {
            mku.infeasibility = "group " + std::to_string(j + 1) + " cannot attain deficit " +
                                std::to_string(guess.alpha);
        }
    }
    if (!mku.infeasibility) {
        for (std::size_t j = 0; j + 1 < m; ++j) {
            if (mku.quotas[j] > static_cast<long long>(inst.group_size(j))) {
                mku.infeasibility = "quota of group " + std::to_string(j + 1) + " exceeds its size";
                break;
            }
        }
    }
    return mku;
}

/// All (alpha, j0) guesses, alpha-major: (r + 2)(m - 1) entries.
inline std::vector<MkuGuess> enumerate_guesses(const ElectionInstance& inst) {
    require_valid(inst);
    std::vector<MkuGuess> out;
    const long long r = inst.vote_gap();
    for (long long a = -1; a <= r; ++a) {
        for (std::size_t j = 0; j + 1 < inst.num_candidates(); ++j) out.push_back(MkuGuess{a, j});
    }
    return out;
}

/// Does some d-subset of xs sum to t?
struct DSumInstance {
    std::vector<long long> xs;
    long long t = 0;
    long long d = 1;

    friend bool operator==(const DSumInstance&, const DSumInstance&) = default;
};

inline void check_dsum(const DSumInstance& ds) {
    if (ds.d < 1) throw std::invalid_argument("d-sum: d must be >= 1");
    if (static_cast<long long>(ds.xs.size()) < ds.d) throw std::invalid_argument("d-sum: need s >= d");
    for (auto x : ds.xs) {
        if (x < 1) throw std::invalid_argument("d-sum: all x_i must be >= 1");
    }
    if (ds.t < 0) throw std::invalid_argument("d-sum: t must be non-negative");
}

struct DSumGadget {
    KuInstance ku;
    long long omega = 1;
    double big_m = 0.0;   ///< M = s * omega * sum x_i
    double yes_lower = 0; ///< 2^(-omega t): some solution reaches this on YES instances
    double no_upper = 0;  ///< 2^(-omega (t+1)): every solution stays below on NO instances
};

/// Gadget with p_i = 2^(-omega x_i), q_i = M - omega x_i, Q = d M - omega t,
/// r = 2d - 1, omega = ceil(log2 alpha) + 1. Any feasible set has at most d
/// items, and a d-set reaches 2^(-omega t) iff its x's sum to exactly t.
inline DSumGadget dsum_to_ku(const DSumInstance& ds, double alpha_target) {
    check_dsum(ds);
    if (!(alpha_target >= 1.0) || !std::isfinite(alpha_target)) {
        throw std::invalid_argument("dsum_to_ku: alpha_target must be a finite real >= 1");
    }
    DSumGadget g;
    g.omega = static_cast<long long>(std::ceil(std::log2(alpha_target))) + 1;

    // Powers of two stay exact (and normal) down to 2^-1022.
    constexpr long long kMaxExponent = 1022;
    long long sum = 0;
    for (auto x : ds.xs) {
        if (x > kMaxExponent / g.omega) {
            throw precision_loss("dsum_to_ku: 2^-(omega*x) underflows for x=" + std::to_string(x) +
                                 " (omega=" + std::to_string(g.omega) + "); use smaller inputs");
        }
        sum += x;
    }
    if (ds.t + 1 > kMaxExponent / g.omega) {
        throw precision_loss("dsum_to_ku: gap certificate 2^-(omega*(t+1)) underflows; use a smaller t");
    }
    const auto s = static_cast<long long>(ds.xs.size());
    const long long big_m = s * g.omega * sum;
    if (big_m * ds.d > (1LL << 52)) throw precision_loss("dsum_to_ku: sizes exceed exact double range");

    g.big_m = static_cast<double>(big_m);
    g.ku.r = 2 * ds.d - 1;
    g.ku.capacity = static_cast<double>(ds.d * big_m - g.omega * ds.t);
    for (auto x : ds.xs) {
        g.ku.items.push_back(KuItem{static_cast<double>(big_m - g.omega * x),
                                    std::ldexp(1.0, static_cast<int>(-g.omega * x))});
    }
    g.yes_lower = std::ldexp(1.0, static_cast<int>(-g.omega * ds.t));
    g.no_upper = std::ldexp(1.0, static_cast<int>(-g.omega * (ds.t + 1)));
    return g;
}

}  // namespace bvu
