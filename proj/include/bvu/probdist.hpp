#pragma once

// Probability kernels shared by the solvers: Poisson-binomial pmf/tail,
// the standard normal CDF, and the Berry-Esseen and Markov bounds.

#include <bvu/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvu {

/// Universal constant of the non-identically-distributed Berry-Esseen
/// theorem. 0.56 is the smallest published value (Shevtsova, 2010).
inline constexpr double kBerryEsseenC0 = 0.56;

namespace detail {

inline void check_prob(double p, std::size_t index) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("probability out of [0,1] at index " + std::to_string(index));
    }
}

}  // namespace detail

/// Folds one Bernoulli(p) into a pmf in place. The pmf keeps its length, so
/// a pmf truncated to its first L entries stays exact on those entries.
inline void pb_convolve_in_place(std::vector<double>& pmf, double p) {
    const double q = 1.0 - p;
    for (std::size_t h = pmf.size(); h-- > 1;) {
        pmf[h] = pmf[h] * q + pmf[h - 1] * p;
    }
    if (!pmf.empty()) pmf[0] *= q;
}

/// Pr(sum of independent Bernoulli(p_i) == h) for h = 0..n.
inline std::vector<double> pb_pmf(std::span<const double> probs) {
    std::vector<double> pmf(probs.size() + 1, 0.0);
    pmf[0] = 1.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        detail::check_prob(probs[i], i);
        const double p = probs[i];
        // entries above i+1 are still zero
        for (std::size_t h = i + 1; h >= 1; --h) {
            pmf[h] = pmf[h] * (1.0 - p) + pmf[h - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    return pmf;
}

/// First `length` entries of the pmf (entries beyond n are zero).
inline std::vector<double> pb_pmf_prefix(std::span<const double> probs, std::size_t length) {
    std::vector<double> pmf(length, 0.0);
    if (length == 0) return pmf;
    pmf[0] = 1.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        detail::check_prob(probs[i], i);
        pb_convolve_in_place(pmf, probs[i]);
    }
    return pmf;
}

/// Pr(sum >= k). Certain for k <= 0, impossible for k > n.
inline double pb_tail(std::span<const double> probs, long long k) {
    if (k <= 0) {
        for (std::size_t i = 0; i < probs.size(); ++i) detail::check_prob(probs[i], i);
        return 1.0;
    }
    const auto n = static_cast<long long>(probs.size());
    if (k > n) {
        for (std::size_t i = 0; i < probs.size(); ++i) detail::check_prob(probs[i], i);
        return 0.0;
    }
    const auto pmf = pb_pmf(probs);
    double tail = 0.0;
    for (auto h = static_cast<std::size_t>(k); h < pmf.size(); ++h) tail += pmf[h];
    return tail;
}

/// Standard normal CDF, Phi(x) = erfc(-x / sqrt 2) / 2. std::erfc is the
/// fdlibm rational approximation (error below one ulp), far inside the 1e-10
/// budget the solvers need.
inline double normal_cdf(double x) {
    if (std::isnan(x)) return x;
    if (x >= 40.0) return 1.0;
    if (x <= -40.0) return 0.0;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

struct BerryEsseenTerms {
    std::vector<double> sigma2;  ///< p(1-p)
    std::vector<double> rho;     ///< E|X - p|^3 = p(1-p)(p^2 + (1-p)^2)
    double psi0 = 0.0;           ///< (sum sigma2)^(-3/2) * sum rho
    double c0 = kBerryEsseenC0;

    double bound() const { return c0 * psi0; }
};

/// Moment terms of a Bernoulli family. Throws degenerate_input when every
/// p is 0 or 1 (zero total variance).
inline BerryEsseenTerms berry_esseen_terms(std::span<const double> probs, double c0 = kBerryEsseenC0) {
    BerryEsseenTerms t;
    t.c0 = c0;
    t.sigma2.reserve(probs.size());
    t.rho.reserve(probs.size());
    double var = 0.0;
    double third = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        detail::check_prob(probs[i], i);
        const double p = probs[i];
        const double s2 = p * (1.0 - p);
        const double r = s2 * (p * p + (1.0 - p) * (1.0 - p));
        t.sigma2.push_back(s2);
        t.rho.push_back(r);
        var += s2;
        third += r;
    }
    if (!(var > 0.0)) throw degenerate_input("Berry-Esseen bound needs positive total variance");
    t.psi0 = third / (var * std::sqrt(var));
    return t;
}

/// C0 * psi0: uniform bound on |Pr(standardized sum <= x) - Phi(x)|.
inline double berry_esseen_bound(std::span<const double> probs, double c0 = kBerryEsseenC0) {
    return berry_esseen_terms(probs, c0).bound();
}

/// Standardized threshold (h - sum p) / sqrt(sum p(1-p)).
inline double standardized_threshold(std::span<const double> probs, double h) {
    double mean = 0.0;
    double var = 0.0;
    for (double p : probs) {
        mean += p;
        var += p * (1.0 - p);
    }
    if (!(var > 0.0)) throw degenerate_input("standardized threshold needs positive variance");
    return (h - mean) / std::sqrt(var);
}

/// Markov: Pr(Z >= a) <= E[Z] / a for non-negative Z, capped at 1.
inline double markov_tail_bound(double mean, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("markov_tail_bound: a must be positive");
    if (!(mean >= 0.0)) throw std::invalid_argument("markov_tail_bound: mean must be non-negative");
    return std::min(mean / a, 1.0);
}

}  // namespace bvu
