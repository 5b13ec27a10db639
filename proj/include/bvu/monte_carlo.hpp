#pragma once

// Seeded Monte Carlo estimate of the win probability, used as an
// independent check on the exact evaluator.
//
// Reproducibility: the engine is std::mt19937_64, whose output sequence is
// fixed by the standard, and uniforms are formed from the top 53 bits of
// each draw, so no library distribution is involved. Independent streams
// for parallel callers come from stream_seed(seed, k), which mixes the
// stream index through SplitMix64.

#include <bvu/model.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace bvu {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

struct McEstimate {
    double estimate = 0.0;
    double half_width = 0.0;  ///< 95% normal-approximation CI half-width
};

inline McEstimate mc_estimate_win_prob(const ElectionInstance& inst, std::span<const VoterId> bribed,
                                       std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("mc_estimate_win_prob: samples must be >= 1");
    const long long need = xi(inst, bribed) + 1;

    std::vector<double> probs;
    probs.reserve(bribed.size());
    for (VoterId id : bribed) probs.push_back(inst.voter(id).success_prob);

    std::mt19937_64 eng(stream_seed(seed, 0));
    std::uint64_t wins = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        long long counted = 0;
        for (double p : probs) counted += uniform01(eng) < p ? 1 : 0;
        if (counted >= need) ++wins;
    }
    McEstimate out;
    const double n = static_cast<double>(samples);
    out.estimate = static_cast<double>(wins) / n;
    out.half_width = 1.96 * std::sqrt(out.estimate * (1.0 - out.estimate) / n);
    return out;
}

}  // namespace bvu
