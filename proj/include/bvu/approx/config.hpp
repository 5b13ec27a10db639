#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace bvu {

struct ApproxConfig {
    /// Additive error target. Normalized to 1/ceil(1/epsilon), so it must
    /// lie in (0, 0.25].
    double epsilon = 0.25;
    /// Cap on Case-2 enumerations (big-item compositions and cross-group
    /// assemblies).
    std::size_t max_branch_enumerations = 1'000'000;
    /// Cap on the truncated pmf length of the distribution DP.
    std::size_t zeta_cap = 64;
    /// Cap on per-axis grid resolution (probability grid, big-item levels,
    /// moment cells).
    std::size_t grid_cells = 4096;
    /// Cap on live states per DP layer.
    std::size_t max_dp_states = 50'000;
    /// Use the uncapped parameter formulas delta = eps/(mk),
    /// eta = eps/(mn^2), zeta = (m/eps)^5 and throw state_space_overflow
    /// instead of truncating.
    bool theoretical_mode = false;
};

/// Hard state limit in theoretical mode, where nothing is truncated.
inline constexpr std::size_t kTheoreticalStateLimit = 4'000'000;

inline void check_config(const ApproxConfig& cfg) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 0.25)) {
        throw std::invalid_argument("epsilon must lie in (0, 0.25]");
    }
    if (cfg.max_branch_enumerations < 1 || cfg.zeta_cap < 1 || cfg.grid_cells < 1 || cfg.max_dp_states < 1) {
        throw std::invalid_argument("approximation caps must be >= 1");
    }
}

/// 1/epsilon rounded up to an integer, i.e. the largest admissible
/// epsilon not above the requested one.
inline double effective_epsilon(const ApproxConfig& cfg) {
    check_config(cfg);
    const double inv = std::ceil(1.0 / cfg.epsilon - 1e-9);
    return 1.0 / inv;
}

}  // namespace bvu
