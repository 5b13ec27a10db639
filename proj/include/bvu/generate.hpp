#pragma once

// Seeded instance generators behind `bvu generate`.

#include <bvu/model.hpp>
#include <bvu/monte_carlo.hpp>
#include <bvu/reductions.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvu {

struct RandomInstanceParams {
    std::vector<std::size_t> sizes;  ///< |V_1|, ..., |V_m|; V_1 must be the strict maximum
    double price_min = 1.0;
    double price_max = 10.0;
    bool integer_prices = true;
    double prob_min = 0.05;
    double prob_max = 0.95;
    /// Fraction of bribable voters whose probability is drawn from
    /// (1 - big_margin, 1] instead of [prob_min, prob_max].
    double big_fraction = 0.0;
    double big_margin = 0.06;
    /// Budget as a fraction of the total bribable price (floored for
    /// integer prices).
    double budget_fraction = 0.5;
};

namespace detail {

inline double uniform(std::mt19937_64& eng, double lo, double hi) { return lo + (hi - lo) * uniform01(eng); }

inline long long uniform_int(std::mt19937_64& eng, long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long long>(eng() % span);
}

}  // namespace detail

inline ElectionInstance random_instance(const RandomInstanceParams& p, std::uint64_t seed) {
    if (p.sizes.size() < 2) throw std::invalid_argument("random instance needs at least 2 groups");
    for (std::size_t j = 1; j < p.sizes.size(); ++j) {
        if (p.sizes[j] >= p.sizes[0]) throw std::invalid_argument("random instance: |V1| must exceed every other group");
    }
    if (!(p.price_min >= 0.0 && p.price_min <= p.price_max)) throw std::invalid_argument("bad price range");
    if (!(p.prob_min >= 0.0 && p.prob_min <= p.prob_max && p.prob_max <= 1.0)) throw std::invalid_argument("bad prob range");
    if (!(p.big_fraction >= 0.0 && p.big_fraction <= 1.0)) throw std::invalid_argument("bad big fraction");
    if (!(p.big_margin > 0.0 && p.big_margin <= 1.0)) throw std::invalid_argument("bad big margin");
    if (!(p.budget_fraction >= 0.0)) throw std::invalid_argument("bad budget fraction");

    std::mt19937_64 eng(stream_seed(seed, 1));
    std::vector<std::vector<VoterSpec>> groups(p.sizes.size());
    double bribable_total = 0.0;
    for (std::size_t j = 0; j < p.sizes.size(); ++j) {
        for (std::size_t i = 0; i < p.sizes[j]; ++i) {
            VoterSpec v;
            v.price = p.integer_prices
                          ? static_cast<double>(detail::uniform_int(eng, static_cast<long long>(std::ceil(p.price_min)),
                                                                    static_cast<long long>(std::floor(p.price_max))))
                          : detail::uniform(eng, p.price_min, p.price_max);
            const bool big = uniform01(eng) < p.big_fraction;
            v.prob = big ? 1.0 - p.big_margin * uniform01(eng) : detail::uniform(eng, p.prob_min, p.prob_max);
            if (j + 1 < p.sizes.size()) bribable_total += v.price;
            groups[j].push_back(v);
        }
    }
    double budget = p.budget_fraction * bribable_total;
    if (p.integer_prices) budget = std::floor(budget);
    return ElectionInstance(groups, budget);
}

/// Two-candidate election wrapping a d-sum gadget: V_1 holds the gadget
/// items, V_2 is sized so that r = 2d - 1. When s < 2d - 1, V_1 is padded
/// with voters priced above the budget (never bribable in practice) and
/// V_2 is empty.
struct GadgetInstance {
    ElectionInstance election;
    DSumInstance dsum;
    DSumGadget gadget;
    double alpha_target = 1.0;
};

inline GadgetInstance dsum_gadget_instance(const DSumInstance& ds, double alpha_target) {
    GadgetInstance out;
    out.dsum = ds;
    out.alpha_target = alpha_target;
    out.gadget = dsum_to_ku(ds, alpha_target);
    const auto& ku = out.gadget.ku;
    std::vector<std::vector<VoterSpec>> groups(2);
    for (const auto& it : ku.items) groups[0].push_back(VoterSpec{it.size, it.prob});
    const auto want_gap = static_cast<std::size_t>(ku.r);
    while (groups[0].size() < want_gap) groups[0].push_back(VoterSpec{ku.capacity + 1.0, 0.0});
    groups[1].assign(groups[0].size() - want_gap, VoterSpec{0.0, 0.0});
    out.election = ElectionInstance(groups, ku.capacity);
    return out;
}

struct Case1FriendlyParams {
    long long k = 2;              ///< counted votes the natural bribe set needs
    std::size_t big_count = 4;    ///< >= 2k voters of V_1 with p > 1 - eps^2
    std::size_t small_count = 2;  ///< extra V_1 voters with moderate p
    double epsilon = 0.25;
};

/// Two-candidate election with r = 3k - 1, so bribing 2k voters of V_1
/// leaves a threshold of k counted votes. The budget buys exactly the 2k
/// cheapest big voters, the setting in which the Case-1 greedy is within
/// eps of certain success.
inline ElectionInstance case1_friendly_instance(const Case1FriendlyParams& p, std::uint64_t seed) {
    if (p.k < 1) throw std::invalid_argument("case1-friendly: k must be >= 1");
    if (p.big_count < static_cast<std::size_t>(2 * p.k)) throw std::invalid_argument("case1-friendly: need >= 2k big voters");
    if (!(p.epsilon > 0.0 && p.epsilon <= 0.25)) throw std::invalid_argument("case1-friendly: epsilon must lie in (0, 0.25]");

    std::mt19937_64 eng(stream_seed(seed, 2));
    const double margin = p.epsilon * p.epsilon;
    std::vector<std::vector<VoterSpec>> groups(2);
    std::vector<double> big_prices;
    for (std::size_t i = 0; i < p.big_count; ++i) {
        VoterSpec v;
        v.price = static_cast<double>(detail::uniform_int(eng, 1, 5));
        // strictly above 1 - eps^2
        v.prob = 1.0 - 0.5 * margin * uniform01(eng);
        big_prices.push_back(v.price);
        groups[0].push_back(v);
    }
    for (std::size_t i = 0; i < p.small_count; ++i) {
        groups[0].push_back(VoterSpec{static_cast<double>(detail::uniform_int(eng, 1, 5)), detail::uniform(eng, 0.1, 0.6)});
    }
    const auto gap = static_cast<std::size_t>(3 * p.k - 1);
    while (groups[0].size() < gap) groups[0].push_back(VoterSpec{1e9, 0.0});
    groups[1].assign(groups[0].size() - gap, VoterSpec{1.0, 0.5});

    std::sort(big_prices.begin(), big_prices.end());
    double budget = 0.0;
    for (long long i = 0; i < 2 * p.k; ++i) budget += big_prices[static_cast<std::size_t>(i)];
    return ElectionInstance(groups, budget);
}

}  // namespace bvu
