#pragma once

#include <pathlab/model.hpp>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathlab::stats {

/// Leaf counts per path length.
class PathLengthHistogram {
public:
    void add(std::size_t path_length, std::uint64_t count = 1) {
        if (count == 0)
            return;
        counts_[path_length] += count;
        total_ += count;
    }

    std::uint64_t count(std::size_t path_length) const {
        auto it = counts_.find(path_length);
        return it == counts_.end() ? 0 : it->second;
    }

    double probability(std::size_t path_length) const {
        return total_ == 0 ? 0.0 : static_cast<double>(count(path_length)) / static_cast<double>(total_);
    }

    /// Count-weighted mean path length; 0 for an empty histogram.
    double mean() const {
        if (total_ == 0)
            return 0.0;
        double s = 0.0;
        for (const auto& [k, c] : counts_)
            s += static_cast<double>(k) * static_cast<double>(c);
        return s / static_cast<double>(total_);
    }

    const std::map<std::size_t, std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept { return total_; }
    bool empty() const noexcept { return total_ == 0; }

    PathLengthHistogram& operator+=(const PathLengthHistogram& other) {
        for (const auto& [k, c] : other.counts_)
            add(k, c);
        return *this;
    }

    friend bool operator==(const PathLengthHistogram&, const PathLengthHistogram&) = default;

private:
    std::map<std::size_t, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

inline PathLengthHistogram histogram_from_depths(std::span<const std::size_t> depths) {
    PathLengthHistogram h;
    for (auto d : depths)
        h.add(d);
    return h;
}

inline PathLengthHistogram merge(PathLengthHistogram a, const PathLengthHistogram& b) {
    a += b;
    return a;
}

class division_by_zero_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class insufficient_bins_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Chi-square upper tail Q(dof/2, statistic/2).
inline double p_value(double statistic, unsigned dof) {
    if (!(statistic >= 0.0))
        throw std::domain_error("p_value: statistic must be non-negative");
    if (dof < 1)
        throw std::domain_error("p_value: dof must be >= 1");
    if (statistic == 0.0)
        return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

/// Sum of (p_obs - p_theo)^2 / p_theo over aligned probability vectors.
/// This is the probability-space statistic, not the standard count-based
/// test; its scale does not follow a chi-square law.
inline double chi_square_paper(std::span<const double> observed, std::span<const double> theoretical) {
    if (observed.size() != theoretical.size())
        throw std::invalid_argument("chi_square_paper: vectors must be aligned");
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (theoretical[i] == 0.0)
            throw division_by_zero_error("chi_square_paper: theoretical probability is zero at index " +
                                         std::to_string(i));
        const double d = observed[i] - theoretical[i];
        s += d * d / theoretical[i];
    }
    return s;
}

/// Contiguous run of path lengths [first, last] after tail merging.
struct ChiSquareBin {
    std::size_t first = 0;
    std::size_t last = 0;
    double observed = 0.0;
    double expected = 0.0;
};

struct ChiSquareResult {
    double statistic = 0.0;
    unsigned dof = 0;
    double p_value = 1.0;
    std::string merged_bins;
    std::vector<ChiSquareBin> bins;
};

namespace detail {

inline std::string describe(const std::vector<ChiSquareBin>& bins) {
    std::string out;
    for (const auto& b : bins) {
        if (!out.empty())
            out += ' ';
        out += std::to_string(b.first);
        if (b.last != b.first)
            out += '-' + std::to_string(b.last);
    }
    return out;
}

inline void absorb(ChiSquareBin& into, const ChiSquareBin& from) {
    into.first = std::min(into.first, from.first);
    into.last = std::max(into.last, from.last);
    into.observed += from.observed;
    into.expected += from.expected;
}

} // namespace detail

/// Standard count-based goodness-of-fit test. theoretical[i] is the
/// probability of path length i + 1; it is renormalised to sum to one.
/// Bins whose expected count is below min_expected are folded inward from
/// both tails first, then any remaining interior bin joins its smaller
/// neighbour.
inline ChiSquareResult chi_square_counts(const PathLengthHistogram& observed, std::span<const double> theoretical,
                                         double min_expected = 5.0) {
    if (observed.total() == 0)
        throw std::invalid_argument("chi_square_counts: empty histogram");
    if (!(min_expected > 0.0))
        throw std::invalid_argument("chi_square_counts: min_expected must be positive");
    for (const auto& [k, c] : observed.counts())
        if (k < 1 || k > theoretical.size())
            throw std::invalid_argument("chi_square_counts: observed path length " + std::to_string(k) +
                                        " outside the theoretical support");

    double mass = 0.0;
    for (double p : theoretical) {
        if (!(p >= 0.0))
            throw std::invalid_argument("chi_square_counts: negative theoretical probability");
        mass += p;
    }
    if (!(mass > 0.0))
        throw std::invalid_argument("chi_square_counts: theoretical probabilities sum to zero");

    const double total = static_cast<double>(observed.total());
    std::vector<ChiSquareBin> bins;
    bins.reserve(theoretical.size());
    for (std::size_t i = 0; i < theoretical.size(); ++i)
        bins.push_back({i + 1, i + 1, static_cast<double>(observed.count(i + 1)), total * theoretical[i] / mass});

    while (bins.size() > 1 && bins.front().expected < min_expected) {
        detail::absorb(bins[1], bins.front());
        bins.erase(bins.begin());
    }
    while (bins.size() > 1 && bins.back().expected < min_expected) {
        detail::absorb(bins[bins.size() - 2], bins.back());
        bins.pop_back();
    }
    for (bool merged = true; merged && bins.size() > 1;) {
        merged = false;
        for (std::size_t i = 1; i + 1 < bins.size(); ++i) {
            if (bins[i].expected >= min_expected)
                continue;
            const std::size_t into = bins[i - 1].expected <= bins[i + 1].expected ? i - 1 : i + 1;
            detail::absorb(bins[into], bins[i]);
            bins.erase(bins.begin() + static_cast<std::ptrdiff_t>(i));
            merged = true;
            break;
        }
    }
    if (bins.size() < 2 || bins.front().expected < min_expected)
        throw insufficient_bins_error("chi_square_counts: fewer than 2 bins meet the expected-count threshold");

    ChiSquareResult r;
    for (const auto& b : bins) {
        const double d = b.observed - b.expected;
        r.statistic += d * d / b.expected;
    }
    r.dof = static_cast<unsigned>(bins.size() - 1);
    r.p_value = p_value(r.statistic, r.dof);
    r.merged_bins = detail::describe(bins);
    r.bins = std::move(bins);
    return r;
}

inline ChiSquareResult chi_square_counts(const PathLengthHistogram& observed, const model::ModelDistribution& model,
                                         double min_expected = 5.0) {
    return chi_square_counts(observed, std::span<const double>(model.probabilities), min_expected);
}

struct ComparisonRow {
    std::size_t path_length = 0;
    double theoretical_prob = 0.0;
    double experimental_prob = 0.0;
    double difference = 0.0;
};

/// Smallest probability that shows as non-zero at six decimals.
inline constexpr double display_threshold = 5e-7;

/// Rows over the union of both supports where either probability reaches
/// min_probability, ascending by path length.
inline std::vector<ComparisonRow> compare(const model::ModelDistribution& model, const PathLengthHistogram& observed,
                                          double min_probability = display_threshold) {
    if (observed.total() == 0)
        throw std::invalid_argument("compare: empty histogram");
    std::size_t last = model.k_max();
    if (!observed.counts().empty())
        last = std::max(last, observed.counts().rbegin()->first);

    std::vector<ComparisonRow> rows;
    for (std::size_t k = 0; k <= last; ++k) {
        const double theo = model.at(k);
        const double expt = observed.probability(k);
        if (theo < min_probability && expt < min_probability)
            continue;
        rows.push_back({k, theo, expt, std::abs(theo - expt)});
    }
    return rows;
}

} // namespace pathlab::stats
