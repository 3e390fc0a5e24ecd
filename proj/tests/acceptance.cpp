// Acceptance runner. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any selected criterion fails.
//
//   acceptance            run criteria 1-8
//   acceptance 3 5        run only criteria 3 and 5

#include <pathlab/pathlab.hpp>

#include "trie_properties.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace {

using namespace pathlab;
namespace fs = std::filesystem;

// Tolerances.
constexpr double golden_tolerance = 5e-7;
constexpr double model_runtime_limit_s = 1.0;
constexpr double chi_square_tolerance = 1e-5;
constexpr double chi_square_min_p = 0.9999;
constexpr double average_tolerance = 0.05;
constexpr double bin_difference_limit = 0.05;
constexpr double validate_runtime_limit_s = 120.0;
constexpr double seed_alpha = 0.01;
constexpr int seed_runs = 20;
constexpr int seed_runs_required = 18;
constexpr double normalization_tolerance = 1e-9;
constexpr double cdf_tolerance = 1e-12;
constexpr std::uint64_t trie_cases = 10'000;

const std::vector<std::uint64_t> reference_sizes{100, 1'000, 10'000, 100'000};
// Theoretical averages as printed, two decimals.
const std::vector<std::string> printed_averages{"2.33", "3.19", "4.04", "4.85"};
const std::vector<double> printed_average_values{2.33, 3.19, 4.04, 4.85};

struct Outcome {
    bool passed = true;
    std::string detail;

    void fail(const std::string& why) {
        if (passed)
            detail.clear();
        passed = false;
        if (!detail.empty())
            detail += "; ";
        detail += why;
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// First two cells of every markdown data row.
std::vector<std::pair<std::string, std::string>> table_cells(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.size() < 3 || line[0] != '|' || !std::isdigit(static_cast<unsigned char>(line[2])))
            continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream row(line.substr(1));
        while (std::getline(row, cell, '|')) {
            const auto b = cell.find_first_not_of(' ');
            const auto e = cell.find_last_not_of(' ');
            cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        if (cells.size() >= 2)
            out.emplace_back(cells[0], cells[1]);
    }
    return out;
}

struct GoldenRow {
    std::uint64_t n;
    long long k;
    double p;
};

Outcome criterion1() {
    static const std::vector<GoldenRow> pmf_rows = {
        {100, 1, 0.002386},         {100, 2, 0.690504},         {100, 3, 0.284479},
        {100, 4, 0.021201},         {100, 5, 0.001340},         {100, 6, 0.000084},
        {100, 7, 0.000005},         {10'000, 3, 0.101360},      {10'000, 4, 0.765349},
        {10'000, 5, 0.124390},      {10'000, 6, 0.008342},      {10'000, 7, 0.000524},
        {10'000, 8, 0.000033},      {10'000, 9, 0.000002},      {1'000'000, 4, 0.000001},
        {1'000'000, 5, 0.408987},   {1'000'000, 6, 0.536665},   {1'000'000, 7, 0.050860},
        {1'000'000, 8, 0.003268},   {1'000'000, 9, 0.000205},   {1'000'000, 10, 0.000013},
        {1'000'000, 11, 0.000001},  {300'000'000, 7, 0.350730}, {300'000'000, 8, 0.585884},
        {300'000'000, 9, 0.059301}, {300'000'000, 10, 0.003829}, {300'000'000, 11, 0.000240},
        {300'000'000, 12, 0.000015}, {300'000'000, 13, 0.000001},
    };
    static const std::vector<std::pair<std::uint64_t, double>> expected = {
        {100, 2.328879}, {10'000, 4.041428}, {1'000'000, 5.649078}, {300'000'000, 7.717012}};

    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const auto& r : pmf_rows) {
        const auto summary = summarize_model(r.n, model::max_path_length);
        const double diff = std::abs(summary.distribution.at(static_cast<std::size_t>(r.k)) - r.p);
        worst = std::max(worst, diff);
        if (diff > golden_tolerance)
            o.fail(fmt::format("pmf({}, {}) off by {:.2e}", r.k, r.n, diff));
    }
    for (const auto& [n, e] : expected) {
        const double diff = std::abs(summarize_model(n, model::max_path_length).expected_path_length - e);
        worst = std::max(worst, diff);
        if (diff > golden_tolerance)
            o.fail(fmt::format("E[PL] at n={} off by {:.2e}", n, diff));
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= model_runtime_limit_s)
        o.fail(fmt::format("took {:.3f} s", elapsed));
    if (o.passed)
        o.detail = fmt::format("{} pmf values and 4 expectations, worst error {:.2e}, {:.4f} s", pmf_rows.size(),
                               worst, elapsed);
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < reference_sizes.size(); ++i) {
        const auto m = model::distribution({reference_sizes[i], model::max_path_length});
        std::vector<std::size_t> ks;
        for (std::size_t k = 1; k <= m.k_max(); ++k)
            if (m.at(k) >= table_row_threshold)
                ks.push_back(k);
        const auto& ref = reference::published[i].rows;
        if (ks.size() != ref.size()) {
            o.fail(fmt::format("n={}: {} analytic rows, expected {}", reference_sizes[i], ks.size(), ref.size()));
            continue;
        }
        for (std::size_t j = 0; j < ref.size(); ++j)
            if (ks[j] != ref[j].path_length || fixed6(m.at(ks[j])) != fixed6(ref[j].theoretical))
                o.fail(fmt::format("n={} row {}: {} {} vs {} {}", reference_sizes[i], j, ks[j], fixed6(m.at(ks[j])),
                                   ref[j].path_length, fixed6(ref[j].theoretical)));
        if (fixed2(model::expected_path_length(reference_sizes[i])) != printed_averages[i])
            o.fail(fmt::format("average at n={} renders as {}", reference_sizes[i],
                               fixed2(model::expected_path_length(reference_sizes[i]))));
    }
    const double analytic_elapsed = seconds_since(start);
    if (analytic_elapsed >= model_runtime_limit_s)
        o.fail(fmt::format("analytic tables took {:.3f} s", analytic_elapsed));

    // The files written by the table command must carry the same columns.
    const auto dir = fs::temp_directory_path() / fmt::format("pathlab_acceptance_tables_{}", ::getpid());
    fs::remove_all(dir);
    const auto files = reproduce_tables(dir, ExperimentConfig{}, 1);
    if (files.size() != 6)
        o.fail(fmt::format("{} table files written", files.size()));
    for (std::size_t i = 0; i < reference_sizes.size() && i < files.size(); ++i) {
        const auto cells = table_cells(read_file(files[i]));
        const auto& ref = reference::published[i].rows;
        if (cells.size() != ref.size()) {
            o.fail(fmt::format("{} has {} rows", files[i].filename().string(), cells.size()));
            continue;
        }
        for (std::size_t j = 0; j < ref.size(); ++j)
            if (cells[j].first != std::to_string(ref[j].path_length) || cells[j].second != fixed6(ref[j].theoretical))
                o.fail(fmt::format("{} row {}: {} {}", files[i].filename().string(), j, cells[j].first,
                                   cells[j].second));
    }
    if (files.size() == 6) {
        const auto cells = table_cells(read_file(files[4]));
        if (cells.size() != reference_sizes.size())
            o.fail(fmt::format("table5.md has {} rows", cells.size()));
        for (std::size_t i = 0; i < cells.size() && i < reference_sizes.size(); ++i)
            if (cells[i].first != grouped(reference_sizes[i]) || cells[i].second != printed_averages[i])
                o.fail(fmt::format("table5.md row {}: {} {}", i, cells[i].first, cells[i].second));
    }
    fs::remove_all(dir);
    if (o.passed)
        o.detail = fmt::format("tables 1-5 theoretical columns match, analytic part {:.4f} s", analytic_elapsed);
    return o;
}

Outcome criterion3() {
    const double published[] = {0.011423, 0.014662, 0.009664};
    Outcome o;
    std::string values;
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> obs, theo;
        for (const auto& r : reference::published[i].rows) {
            obs.push_back(r.experimental);
            theo.push_back(r.theoretical);
        }
        const double stat = stats::chi_square_paper(obs, theo);
        const double p = stats::p_value(stat, static_cast<unsigned>(obs.size() - 1));
        values += fmt::format("{}{:.6f} (p={:.7f})", i ? ", " : "", stat, p);
        if (std::abs(stat - published[i]) > chi_square_tolerance)
            o.fail(fmt::format("n={}: statistic {:.6f} vs {:.6f}", reference::published[i].size, stat, published[i]));
        if (p < chi_square_min_p)
            o.fail(fmt::format("n={}: p-value {:.6f}", reference::published[i].size, p));
    }
    if (o.passed)
        o.detail = values;
    return o;
}

Outcome criterion4() {
    ExperimentConfig cfg;
    cfg.sizes = reference_sizes;
    cfg.trials = 10;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const auto report = run_experiment(cfg, 1);
    const double elapsed = seconds_since(start);
    std::string summary;
    for (std::size_t i = 0; i < report.sizes.size(); ++i) {
        const auto& s = report.sizes[i];
        const double gap = std::abs(s.avg_divergence_depth - printed_average_values[i]);
        summary += fmt::format("{}n={}: avg {:.4f} max bin diff {:.4f}", i ? ", " : "", s.size,
                               s.avg_divergence_depth, s.max_abs_difference);
        if (gap > average_tolerance)
            o.fail(fmt::format("n={}: average {:.4f} vs {}", s.size, s.avg_divergence_depth, printed_averages[i]));
        if (s.max_abs_difference > bin_difference_limit)
            o.fail(fmt::format("n={}: max bin difference {:.4f}", s.size, s.max_abs_difference));
    }
    if (elapsed > validate_runtime_limit_s)
        o.fail(fmt::format("took {:.1f} s", elapsed));
    if (o.passed)
        o.detail = fmt::format("{} ({:.1f} s)", summary, elapsed);
    return o;
}

Outcome criterion5() {
    Outcome o;
    int good = 0;
    std::string first;
    double lowest = 1.0, highest = 0.0;
    for (int seed = 1; seed <= seed_runs; ++seed) {
        ExperimentConfig cfg;
        cfg.sizes = {100'000};
        cfg.trials = 10;
        cfg.master_seed = static_cast<std::uint64_t>(seed);
        const auto report = run_experiment(cfg, 1);
        const auto& s = report.sizes[0];
        if (!s.chi_square_counts) {
            o.fail(fmt::format("seed {}: no statistic ({})", seed, s.chi_square_counts_error));
            continue;
        }
        const auto& r = *s.chi_square_counts;
        if (!std::isfinite(r.statistic) || !(r.p_value >= 0.0 && r.p_value <= 1.0) || r.dof < 1)
            o.fail(fmt::format("seed {}: statistic {} p {} dof {}", seed, r.statistic, r.p_value, r.dof));
        if (r.p_value >= seed_alpha)
            ++good;
        lowest = std::min(lowest, r.p_value);
        highest = std::max(highest, r.p_value);
        if (seed == 1)
            first = fmt::format("seed 1: statistic {:.2f}, dof {}, bins {}", r.statistic, r.dof, r.merged_bins);
    }
    const std::string tally =
        fmt::format("p >= {} in {}/{} seeds (need {}), p range [{:.3g}, {:.3g}]", seed_alpha, good, seed_runs,
                    seed_runs_required, lowest, highest);
    if (good < seed_runs_required)
        o.fail(tally + "; " + first);
    else if (o.passed)
        o.detail = first + "; " + tally;
    return o;
}

Outcome criterion6() {
    Outcome o;
    std::size_t checked = 0;
    for (std::uint64_t n = 1; n <= 10'000'000'000ULL; n = n * 3 + 1)
        for (long long k = 1; k <= static_cast<long long>(model::max_path_length); ++k, ++checked)
            if (!(model::pmf(k, n) >= 0.0))
                o.fail(fmt::format("pmf({}, {}) negative", k, n));
    for (std::uint64_t n : {100ULL, 10'000ULL, 1'000'000ULL, 300'000'000ULL}) {
        const double s = model::distribution({n, model::max_path_length}).sum();
        if (std::abs(s - 1.0) > normalization_tolerance)
            o.fail(fmt::format("sum at n={} is {:.12f}", n, s));
        double running = 0.0;
        for (long long k = 1; k <= static_cast<long long>(model::max_path_length); ++k) {
            running += model::pmf(k, n);
            if (std::abs(model::cdf(k, n) - running) > cdf_tolerance)
                o.fail(fmt::format("cdf({}, {}) differs from cumulative pmf", k, n));
        }
    }
    std::size_t prev_mode = 0;
    for (std::uint64_t n = 10; n <= 1'000'000'000'000ULL; n *= 10) {
        const auto mode = model::distribution({n, model::max_path_length}).mode();
        if (mode < prev_mode)
            o.fail(fmt::format("mode drops to {} at n={}", mode, n));
        prev_mode = mode;
    }
    double prev_ratio = model::asymptotic_ratio(100);
    for (std::uint64_t n = 1'000; n <= 1'000'000'000'000ULL; n *= 10) {
        const double r = model::asymptotic_ratio(n);
        if (r >= prev_ratio)
            o.fail(fmt::format("asymptotic ratio rises at n={}", n));
        prev_ratio = r;
    }
    if (o.passed)
        o.detail = fmt::format("{} grid points non-negative, normalization, cdf, mode and ratio trend hold", checked);
    return o;
}

Outcome criterion7() {
    Outcome o;
    for (std::uint64_t seed = 0; seed < trie_cases; ++seed)
        if (auto err = testkit::run_trie_case(seed)) {
            o.fail(fmt::format("case {}: {}", seed, *err));
            return o;
        }
    o.detail = fmt::format("{} randomized cases", trie_cases);
    return o;
}

Outcome criterion8() {
    Outcome o;
    for (auto mode : {GeneratorMode::uniform, GeneratorMode::crypto}) {
        ExperimentConfig cfg;
        cfg.mode = mode;
        cfg.master_seed = 20'240'501;
        if (mode == GeneratorMode::uniform) {
            cfg.sizes = {100, 1'000, 10'000};
            cfg.trials = 5;
        } else {
            cfg.sizes = {100, 500};
            cfg.trials = 3;
        }
        const auto first = render(run_experiment(cfg, 1), OutputFormat::json);
        const auto second = render(run_experiment(cfg, 1), OutputFormat::json);
        const auto parallel = render(run_experiment(cfg, 4), OutputFormat::json);
        if (first != second)
            o.fail(fmt::format("{} mode: repeated runs differ", to_string(mode)));
        if (first != parallel)
            o.fail(fmt::format("{} mode: parallel run differs", to_string(mode)));
    }
    if (o.passed)
        o.detail = "uniform and crypto reports identical across reruns and 1 vs 4 workers";
    return o;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "analytic golden values", criterion1},
        {2, "table reproduction", criterion2},
        {3, "chi-square fidelity on published columns", criterion3},
        {4, "Monte-Carlo validation", criterion4},
        {5, "count-based chi-square across 20 seeds", criterion5},
        {6, "model self-consistency", criterion6},
        {7, "trie property suite", criterion7},
        {8, "determinism", criterion8},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::cerr << "unknown criterion '" << argv[i] << "'\n";
            return 2;
        }
        selected.insert(id);
    }

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id))
            continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failures += o.passed ? 0 : 1;
        std::cout << fmt::format("[{}] criterion {}: {}: {}\n", o.passed ? "PASS" : "FAIL", c.id, c.title, o.detail)
                  << std::flush;
    }
    return failures == 0 ? 0 : 1;
}
