#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Path-length model for a trie of n uniformly random 40-nibble keys.
//
// Let q(k) = (1 - (15/16) * 16^-k)^n. The model assigns
//
//     P(path length = k) = q(k) - q(k - 1),   k >= 1,
//
// and every power is evaluated as exp(n * log1p(-x)); x falls to 16^-41 at the
// longest keys, where direct powering would round the base to 1.

namespace pathlab::model {

inline constexpr std::size_t max_path_length = 41;

namespace detail {

inline void require_n(std::uint64_t n, const char* op) {
    if (n < 1)
        throw std::domain_error(std::string(op) + ": n must be >= 1");
}

inline void require_k(long long k, const char* op) {
    if (k < 1)
        throw std::domain_error(std::string(op) + ": path length must be >= 1");
}

/// (1 - (15/16) * 16^-k)^n for k >= 0.
inline double no_match_power(long long k, std::uint64_t n) {
    const double x = 0.9375 * std::pow(16.0, -static_cast<double>(k));
    return std::exp(static_cast<double>(n) * std::log1p(-x));
}

} // namespace detail

/// 16^-k: chance that a random key matches a fixed k-nibble prefix (and,
/// equivalently, any fixed k-nibble sequence).
inline double prefix_share_probability(long long k) {
    if (k < 0)
        throw std::domain_error("prefix_share_probability: k must be >= 0");
    return std::pow(16.0, -static_cast<double>(k));
}

inline double pmf(long long k, std::uint64_t n) {
    detail::require_k(k, "pmf");
    detail::require_n(n, "pmf");
    const double p = detail::no_match_power(k, n) - detail::no_match_power(k - 1, n);
    return std::clamp(p, 0.0, 1.0);
}

/// Telescoped partial sum of pmf over [1, k]: q(k) - 16^-n.
inline double cdf(long long k, std::uint64_t n) {
    detail::require_k(k, "cdf");
    detail::require_n(n, "cdf");
    return detail::no_match_power(k, n) - detail::no_match_power(0, n);
}

/// 1 - q(k), transcribed literally from the published closed form. It falls
/// as k grows, so it is not a distribution function; exposed for comparison
/// only. Use cdf() for cumulative probabilities.
inline double cdf_paper_literal(long long k, std::uint64_t n) {
    detail::require_k(k, "cdf_paper_literal");
    detail::require_n(n, "cdf_paper_literal");
    const double x = 0.9375 * std::pow(16.0, -static_cast<double>(k));
    return -std::expm1(static_cast<double>(n) * std::log1p(-x));
}

/// Sum of k * pmf(k, n) over k in [1, 41]. Truncation drops less than
/// n * 16^-41 of mass.
inline double expected_path_length(std::uint64_t n) {
    detail::require_n(n, "expected_path_length");
    double e = 0.0;
    for (std::size_t k = 1; k <= max_path_length; ++k)
        e += static_cast<double>(k) * pmf(static_cast<long long>(k), n);
    return e;
}

/// expected_path_length(n) / log16(n); tends to 1 from above as n grows.
inline double asymptotic_ratio(std::uint64_t n) {
    if (n < 2)
        throw std::domain_error("asymptotic_ratio: n must be >= 2");
    return expected_path_length(n) / (std::log(static_cast<double>(n)) / std::log(16.0));
}

struct ModelParams {
    std::uint64_t n = 1;
    std::size_t k_max = max_path_length;
};

struct ModelDistribution {
    std::uint64_t n = 0;
    /// probabilities[i] is P(path length = i + 1).
    std::vector<double> probabilities;

    std::size_t k_max() const noexcept { return probabilities.size(); }

    double at(std::size_t k) const {
        return k >= 1 && k <= probabilities.size() ? probabilities[k - 1] : 0.0;
    }

    std::size_t mode() const {
        if (probabilities.empty())
            return 0;
        return static_cast<std::size_t>(std::max_element(probabilities.begin(), probabilities.end()) -
                                        probabilities.begin()) +
               1;
    }

    double sum() const {
        double s = 0.0;
        for (double p : probabilities)
            s += p;
        return s;
    }
};

inline ModelDistribution distribution(const ModelParams& params) {
    detail::require_n(params.n, "distribution");
    if (params.k_max < 1 || params.k_max > max_path_length)
        throw std::domain_error("distribution: k_max must lie in [1, 41]");
    ModelDistribution d;
    d.n = params.n;
    d.probabilities.reserve(params.k_max);
    for (std::size_t k = 1; k <= params.k_max; ++k)
        d.probabilities.push_back(pmf(static_cast<long long>(k), params.n));
    return d;
}

} // namespace pathlab::model
