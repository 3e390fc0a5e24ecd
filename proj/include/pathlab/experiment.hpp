#pragma once

#include <pathlab/addrgen.hpp>
#include <pathlab/model.hpp>
#include <pathlab/stats.hpp>
#include <pathlab/trie.hpp>

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace pathlab {

inline constexpr std::string_view version = "1.0.0";

enum class OutputFormat { markdown, csv, json };

class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline OutputFormat parse_output_format(std::string_view s) {
    if (s == "md" || s == "markdown")
        return OutputFormat::markdown;
    if (s == "csv")
        return OutputFormat::csv;
    if (s == "json")
        return OutputFormat::json;
    throw config_error("unknown output format '" + std::string(s) + "' (expected md, csv or json)");
}

inline std::string_view to_string(OutputFormat f) noexcept {
    switch (f) {
    case OutputFormat::markdown: return "md";
    case OutputFormat::csv: return "csv";
    default: return "json";
    }
}

/// Distribution tables list the path lengths whose model probability reaches
/// 1e-5 (0.000010 at six decimals). Observed mass elsewhere is reported as a
/// single remainder figure.
inline constexpr double table_row_threshold = 1e-5;

inline constexpr std::uint64_t desk_scale_limit = 100'000;
inline constexpr std::uint64_t large_size_limit = 1'000'000;

struct ExperimentConfig {
    std::vector<std::uint64_t> sizes{100, 1'000, 10'000, 100'000};
    unsigned trials = 10;
    std::uint64_t master_seed = 1;
    GeneratorMode mode = GeneratorMode::uniform;
    std::size_t k_max = model::max_path_length;
    OutputFormat output_format = OutputFormat::markdown;
    double min_expected = 5.0;
    bool allow_large = false;
};

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.sizes.empty())
        throw config_error("at least one size is required");
    for (auto n : cfg.sizes) {
        if (n < 2)
            throw config_error("sizes must be >= 2, got " + std::to_string(n));
        if (n > large_size_limit)
            throw config_error("sizes above " + std::to_string(large_size_limit) + " are not supported");
        if (n > desk_scale_limit && !cfg.allow_large)
            throw config_error("size " + std::to_string(n) + " exceeds " + std::to_string(desk_scale_limit) +
                               "; pass --allow-large to run it");
    }
    if (cfg.trials < 1)
        throw config_error("trials must be >= 1");
    if (cfg.k_max < 1 || cfg.k_max > model::max_path_length)
        throw config_error("k_max must lie in [1, 41]");
    if (!(cfg.min_expected > 0.0))
        throw config_error("min_expected must be positive");
}

/// Seed of trial `trial` at trie size `size`:
///   mix64(mix64(mix64(master) ^ size) ^ trial)
/// Each (size, trial) stream is independent of which other sizes are run.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t size, std::uint64_t trial) noexcept {
    return mix64(mix64(mix64(master) ^ size) ^ trial);
}

struct TrialResult {
    stats::PathLengthHistogram divergence;
    stats::PathLengthHistogram node_count;
    LevelCensus census;
    std::size_t keys = 0;
};

inline TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t size, unsigned trial) {
    const auto addresses = generate({cfg.mode, trial_seed(cfg.master_seed, size, trial), size});
    Trie trie;
    for (const auto& a : addresses)
        trie.insert(a);

    TrialResult r;
    r.keys = trie.size();
    trie.for_each_leaf([&](const NibblePath&, const Value&, const LeafMetrics& m) {
        r.divergence.add(m.divergence_depth);
        r.node_count.add(m.node_count);
    });
    r.census = trie.level_census();
    return r;
}

struct ProbabilityChiSquare {
    double statistic = 0.0;
    unsigned dof = 0;
    double p_value = 1.0;
};

struct SizeReport {
    std::uint64_t size = 0;
    unsigned trials = 0;
    stats::PathLengthHistogram histogram;
    stats::PathLengthHistogram node_count_histogram;
    std::vector<double> trial_avg_divergence_depth;
    double avg_divergence_depth = 0.0;
    double avg_node_count = 0.0;
    model::ModelDistribution model;
    double model_expected_path_length = 0.0;
    /// Union of model and observed supports at the six-decimal display threshold.
    std::vector<stats::ComparisonRow> comparison_rows;
    std::vector<stats::ComparisonRow> table_rows;
    /// Observed probability at path lengths outside table_rows.
    double untabulated_mass = 0.0;
    /// Largest |model - observed| over every path length, not only table rows.
    double max_abs_difference = 0.0;
    std::optional<ProbabilityChiSquare> chi_square_paper;
    std::string chi_square_paper_error;
    std::optional<stats::ChiSquareResult> chi_square_counts;
    std::string chi_square_counts_error;
    LevelCensus level_census;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string artifact_version{version};
    std::vector<SizeReport> sizes;
};

inline std::vector<stats::ComparisonRow> table_rows(const model::ModelDistribution& model,
                                                   const stats::PathLengthHistogram& observed) {
    std::vector<stats::ComparisonRow> rows;
    for (const auto& row : stats::compare(model, observed))
        if (row.theoretical_prob >= table_row_threshold)
            rows.push_back(row);
    return rows;
}

/// Probability-space chi-square over the rendered table rows, with
/// dof = rows - 1.
inline ProbabilityChiSquare probability_chi_square(const std::vector<stats::ComparisonRow>& rows) {
    std::vector<double> obs, theo;
    for (const auto& r : rows) {
        obs.push_back(r.experimental_prob);
        theo.push_back(r.theoretical_prob);
    }
    ProbabilityChiSquare c;
    c.statistic = stats::chi_square_paper(obs, theo);
    c.dof = rows.size() > 1 ? static_cast<unsigned>(rows.size() - 1) : 1;
    c.p_value = stats::p_value(c.statistic, c.dof);
    return c;
}

inline SizeReport summarize(const ExperimentConfig& cfg, std::uint64_t size, const std::vector<TrialResult>& trials) {
    SizeReport s;
    s.size = size;
    s.trials = static_cast<unsigned>(trials.size());
    for (const auto& t : trials) {
        s.histogram += t.divergence;
        s.node_count_histogram += t.node_count;
        s.trial_avg_divergence_depth.push_back(t.divergence.mean());
        for (const auto& [depth, counts] : t.census)
            s.level_census[depth] += counts;
    }
    double sum = 0.0;
    for (double a : s.trial_avg_divergence_depth)
        sum += a;
    s.avg_divergence_depth = sum / static_cast<double>(trials.size());
    s.avg_node_count = s.node_count_histogram.mean();

    s.model = model::distribution({size, cfg.k_max});
    s.model_expected_path_length = model::expected_path_length(size);
    s.comparison_rows = stats::compare(s.model, s.histogram);
    s.table_rows = table_rows(s.model, s.histogram);
    std::uint64_t tabulated = 0;
    for (const auto& row : s.table_rows)
        tabulated += s.histogram.count(row.path_length);
    s.untabulated_mass =
        static_cast<double>(s.histogram.total() - tabulated) / static_cast<double>(s.histogram.total());
    for (const auto& row : stats::compare(s.model, s.histogram, 0.0))
        s.max_abs_difference = std::max(s.max_abs_difference, row.difference);

    try {
        s.chi_square_paper = probability_chi_square(s.table_rows);
    } catch (const std::exception& e) {
        s.chi_square_paper_error = e.what();
    }
    try {
        s.chi_square_counts = stats::chi_square_counts(s.histogram, s.model, cfg.min_expected);
    } catch (const std::exception& e) {
        s.chi_square_counts_error = e.what();
    }
    return s;
}

/// Runs every (size, trial) unit on up to `workers` threads. The report does
/// not depend on the worker count: units land in fixed slots and are reduced
/// in (size, trial) order.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned workers = 1) {
    validate(cfg);
    const std::size_t per_size = cfg.trials;
    const std::size_t units = cfg.sizes.size() * per_size;
    std::vector<TrialResult> results(units);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t u = next++; u < units; u = next++) {
            try {
                results[u] = run_trial(cfg, cfg.sizes[u / per_size], static_cast<unsigned>(u % per_size));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(units)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);

    ExperimentReport report;
    report.config = cfg;
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
        std::vector<TrialResult> slice(std::make_move_iterator(results.begin() + i * per_size),
                                       std::make_move_iterator(results.begin() + (i + 1) * per_size));
        report.sizes.push_back(summarize(cfg, cfg.sizes[i], slice));
    }
    return report;
}

struct ValidationCheck {
    std::uint64_t size = 0;
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

struct ValidationTolerances {
    double average = 0.05;
    double per_bin = 0.05;
    double alpha = 0.01;
};

/// Per size: pooled average vs model expectation, worst per-bin probability
/// gap, and the count-based chi-square p-value.
inline std::vector<ValidationCheck> validation_checks(const ExperimentReport& report,
                                                      const ValidationTolerances& tol = {}) {
    std::vector<ValidationCheck> out;
    for (const auto& s : report.sizes) {
        const double avg_gap = std::abs(s.avg_divergence_depth - s.model_expected_path_length);
        out.push_back({s.size, "average_divergence_depth", avg_gap, tol.average, avg_gap <= tol.average});
        out.push_back({s.size, "max_bin_difference", s.max_abs_difference, tol.per_bin,
                       s.max_abs_difference <= tol.per_bin});
        const double p = s.chi_square_counts ? s.chi_square_counts->p_value : 0.0;
        out.push_back({s.size, "chi_square_counts_p_value", p, tol.alpha,
                       s.chi_square_counts.has_value() && p >= tol.alpha});
    }
    return out;
}

} // namespace pathlab
