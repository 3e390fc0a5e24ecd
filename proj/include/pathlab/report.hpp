#pragma once

#include <pathlab/addrgen.hpp>
#include <pathlab/experiment.hpp>
#include <pathlab/model.hpp>
#include <pathlab/reference.hpp>
#include <pathlab/stats.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathlab {

using json = nlohmann::json;

inline constexpr int schema_version = 1;
inline constexpr std::string_view distribution_csv_header = "path_length,theoretical_prob,experimental_prob,difference";

inline std::string fixed6(double v) { return fmt::format("{:.6f}", v); }
inline std::string fixed2(double v) { return fmt::format("{:.2f}", v); }

/// 100000 -> "100,000"
inline std::string grouped(std::uint64_t n) {
    std::string digits = std::to_string(n);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (digits.size() - i) % 3 == 0)
            out += ',';
        out += digits[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// distribution tables

inline json rows_to_json(std::span<const stats::ComparisonRow> rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"path_length", r.path_length},
                       {"theoretical_prob", r.theoretical_prob},
                       {"experimental_prob", r.experimental_prob},
                       {"difference", r.difference}});
    return out;
}

inline std::string render_distribution(std::span<const stats::ComparisonRow> rows, OutputFormat format) {
    std::string out;
    switch (format) {
    case OutputFormat::markdown:
        out += "| Path Length | Theoretical Prob. | Experimental Prob. | Difference |\n";
        out += "|---:|---:|---:|---:|\n";
        for (const auto& r : rows)
            out += fmt::format("| {} | {} | {} | {} |\n", r.path_length, fixed6(r.theoretical_prob),
                               fixed6(r.experimental_prob), fixed6(r.difference));
        break;
    case OutputFormat::csv:
        out += distribution_csv_header;
        out += '\n';
        for (const auto& r : rows)
            out += fmt::format("{},{},{},{}\n", r.path_length, fixed6(r.theoretical_prob),
                               fixed6(r.experimental_prob), fixed6(r.difference));
        break;
    case OutputFormat::json:
        out = rows_to_json(rows).dump(2) + '\n';
        break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// model query

struct ModelSummary {
    std::uint64_t n = 1;
    model::ModelDistribution distribution;
    double expected_path_length = 0.0;
    std::size_t mode = 0;
    std::optional<double> asymptotic_ratio;
    double collision_probability = 0.0;
};

inline ModelSummary summarize_model(std::uint64_t n, std::size_t k_max = model::max_path_length) {
    ModelSummary s;
    s.n = n;
    s.distribution = model::distribution({n, k_max});
    s.expected_path_length = model::expected_path_length(n);
    s.mode = s.distribution.mode();
    if (n >= 2)
        s.asymptotic_ratio = model::asymptotic_ratio(n);
    s.collision_probability = collision_probability(static_cast<double>(n));
    return s;
}

inline constexpr std::string_view small_n_note =
    "n < 2: a lone key sits in a root leaf (path length 0), which the model does not represent; "
    "the pmf and expected value above are the formula evaluated as written.";

inline std::string render_model(const ModelSummary& s, OutputFormat format,
                                double min_probability = table_row_threshold) {
    std::string out;
    const auto ratio = s.asymptotic_ratio ? fmt::format("{:.6f}", *s.asymptotic_ratio) : std::string("n/a");
    switch (format) {
    case OutputFormat::markdown:
        out += fmt::format("## Path-length model, n = {}\n\n", grouped(s.n));
        out += "| Path Length | Theoretical Prob. |\n|---:|---:|\n";
        for (std::size_t k = 1; k <= s.distribution.k_max(); ++k)
            if (s.distribution.at(k) >= min_probability)
                out += fmt::format("| {} | {} |\n", k, fixed6(s.distribution.at(k)));
        out += fmt::format("\n- expected path length: {}\n", fixed6(s.expected_path_length));
        out += fmt::format("- mode: {}\n", s.mode);
        out += fmt::format("- asymptotic ratio E/log16(n): {}\n", ratio);
        out += fmt::format("- collision probability: {:.6e}\n", s.collision_probability);
        if (s.n < 2)
            out += fmt::format("\n> {}\n", small_n_note);
        break;
    case OutputFormat::csv:
        out += "path_length,theoretical_prob\n";
        for (std::size_t k = 1; k <= s.distribution.k_max(); ++k)
            if (s.distribution.at(k) >= min_probability)
                out += fmt::format("{},{}\n", k, fixed6(s.distribution.at(k)));
        out += "\nmetric,value\n";
        out += fmt::format("expected_path_length,{}\n", fixed6(s.expected_path_length));
        out += fmt::format("mode,{}\n", s.mode);
        out += fmt::format("asymptotic_ratio,{}\n", ratio);
        out += fmt::format("collision_probability,{:.6e}\n", s.collision_probability);
        break;
    case OutputFormat::json: {
        json j = {{"schema_version", schema_version},
                  {"n", s.n},
                  {"k_max", s.distribution.k_max()},
                  {"pmf", s.distribution.probabilities},
                  {"expected_path_length", s.expected_path_length},
                  {"mode", s.mode},
                  {"asymptotic_ratio", s.asymptotic_ratio ? json(*s.asymptotic_ratio) : json(nullptr)},
                  {"collision_probability", s.collision_probability}};
        if (s.n < 2)
            j["note"] = small_n_note;
        out = j.dump(2) + '\n';
        break;
    }
    }
    return out;
}

inline std::string model_query(std::uint64_t n, std::size_t k_max, OutputFormat format) {
    return render_model(summarize_model(n, k_max), format);
}

// ---------------------------------------------------------------------------
// experiment reports

inline json histogram_to_json(const stats::PathLengthHistogram& h) {
    json out = json::object();
    for (const auto& [k, c] : h.counts())
        out[std::to_string(k)] = c;
    return out;
}

inline json to_json(const ExperimentReport& report) {
    const auto& cfg = report.config;
    json sizes = json::array();
    for (const auto& s : report.sizes) {
        json census = json::array();
        for (const auto& [depth, c] : s.level_census)
            census.push_back({{"depth", depth}, {"branch", c.branch}, {"extension", c.extension}, {"leaf", c.leaf}});

        json prob;
        if (s.chi_square_paper)
            prob = {{"statistic", s.chi_square_paper->statistic},
                    {"dof", s.chi_square_paper->dof},
                    {"p_value", s.chi_square_paper->p_value}};
        else
            prob = {{"error", s.chi_square_paper_error}};

        json counts;
        if (s.chi_square_counts) {
            json bins = json::array();
            for (const auto& b : s.chi_square_counts->bins)
                bins.push_back(
                    {{"first", b.first}, {"last", b.last}, {"observed", b.observed}, {"expected", b.expected}});
            counts = {{"statistic", s.chi_square_counts->statistic},
                      {"dof", s.chi_square_counts->dof},
                      {"p_value", s.chi_square_counts->p_value},
                      {"merged_bins", s.chi_square_counts->merged_bins},
                      {"bins", bins}};
        } else {
            counts = {{"error", s.chi_square_counts_error}};
        }

        sizes.push_back({{"size", s.size},
                         {"trials", s.trials},
                         {"histogram", histogram_to_json(s.histogram)},
                         {"node_count_histogram", histogram_to_json(s.node_count_histogram)},
                         {"trial_avg_divergence_depth", s.trial_avg_divergence_depth},
                         {"avg_divergence_depth", s.avg_divergence_depth},
                         {"avg_node_count", s.avg_node_count},
                         {"model_expected_path_length", s.model_expected_path_length},
                         {"model_pmf", s.model.probabilities},
                         {"comparison_rows", rows_to_json(s.comparison_rows)},
                         {"max_abs_difference", s.max_abs_difference},
                         {"chi_square_paper", prob},
                         {"chi_square_counts", counts},
                         {"level_census", census}});
    }
    return {{"schema_version", schema_version},
            {"artifact_version", report.artifact_version},
            {"config",
             {{"sizes", cfg.sizes},
              {"trials", cfg.trials},
              {"master_seed", cfg.master_seed},
              {"mode", to_string(cfg.mode)},
              {"k_max", cfg.k_max},
              {"min_expected", cfg.min_expected},
              {"allow_large", cfg.allow_large}}},
            {"sizes", sizes}};
}

inline std::string render_averages(const ExperimentReport& report) {
    std::string out = "| Number of Addresses | Theoretical Avg. | Experimental Avg. | Difference |\n"
                      "|---:|---:|---:|---:|\n";
    for (const auto& s : report.sizes)
        out += fmt::format("| {} | {} | {} | {} |\n", grouped(s.size), fixed2(s.model_expected_path_length),
                           fixed2(s.avg_divergence_depth),
                           fixed2(std::abs(s.model_expected_path_length - s.avg_divergence_depth)));
    return out;
}

inline std::string render_chi_square(const ExperimentReport& report) {
    std::string out = "| Number of Addresses | Chi-square (probability basis) | p-value | "
                      "Chi-square (counts) | dof | p-value | Bins |\n"
                      "|---:|---:|---:|---:|---:|---:|:---|\n";
    for (const auto& s : report.sizes) {
        std::string prob = "N/A | N/A";
        if (s.chi_square_paper)
            prob = fmt::format("{} | {:.6f}", fixed6(s.chi_square_paper->statistic), s.chi_square_paper->p_value);
        std::string counts = "N/A | N/A | N/A | " + s.chi_square_counts_error;
        if (s.chi_square_counts)
            counts = fmt::format("{:.4f} | {} | {:.6f} | {}", s.chi_square_counts->statistic,
                                 s.chi_square_counts->dof, s.chi_square_counts->p_value,
                                 s.chi_square_counts->merged_bins);
        out += fmt::format("| {} | {} | {} |\n", grouped(s.size), prob, counts);
    }
    return out;
}

struct ReferenceChiSquare {
    std::uint64_t size = 0;
    double statistic = 0.0;
    unsigned dof = 0;
    double p_value = 1.0;
};

/// Probability-basis statistic over the published observed and model columns.
inline std::vector<ReferenceChiSquare> reference_chi_square() {
    std::vector<ReferenceChiSquare> out;
    for (const auto& d : reference::published) {
        std::vector<double> obs, theo;
        for (const auto& r : d.rows) {
            obs.push_back(r.experimental);
            theo.push_back(r.theoretical);
        }
        ReferenceChiSquare c;
        c.size = d.size;
        c.statistic = stats::chi_square_paper(obs, theo);
        c.dof = static_cast<unsigned>(d.rows.size() - 1);
        c.p_value = stats::p_value(c.statistic, c.dof);
        out.push_back(c);
    }
    return out;
}

inline std::string render_reference_chi_square() {
    std::string out = "| Number of Addresses | Chi-square Statistic | p-value |\n|---:|---:|---:|\n";
    for (const auto& c : reference_chi_square())
        out += fmt::format("| {} | {} | {:.6f} |\n", grouped(c.size), fixed6(c.statistic), c.p_value);
    return out;
}

inline std::string render_size_markdown(const SizeReport& s) {
    std::string out = fmt::format("## Path length distribution for {} addresses ({} trials)\n\n", grouped(s.size),
                                  s.trials);
    out += render_distribution(s.table_rows, OutputFormat::markdown);
    out += fmt::format("\nObserved mass outside the tabulated path lengths: {}\n", fixed6(s.untabulated_mass));
    out += fmt::format("Average divergence depth: theoretical {}, experimental {}; average node count {}\n",
                       fixed6(s.model_expected_path_length), fixed6(s.avg_divergence_depth),
                       fixed6(s.avg_node_count));
    return out;
}

inline std::string render(const ExperimentReport& report, OutputFormat format) {
    std::string out;
    switch (format) {
    case OutputFormat::markdown:
        out += fmt::format("# Path-length experiment (seed {}, {} trials, {} mode)\n\n", report.config.master_seed,
                           report.config.trials, to_string(report.config.mode));
        for (const auto& s : report.sizes)
            out += render_size_markdown(s) + '\n';
        out += "## Average path lengths\n\n" + render_averages(report);
        out += "\n## Chi-square goodness of fit\n\n" + render_chi_square(report);
        break;
    case OutputFormat::csv:
        for (std::size_t i = 0; i < report.sizes.size(); ++i) {
            if (i != 0)
                out += '\n';
            out += fmt::format("# size={} trials={}\n", report.sizes[i].size, report.sizes[i].trials);
            out += render_distribution(report.sizes[i].table_rows, OutputFormat::csv);
        }
        break;
    case OutputFormat::json:
        out = to_json(report).dump(2) + '\n';
        break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// table reproduction

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    f.close();
    if (!f)
        throw std::runtime_error("failed writing " + path.string());
}

/// Writes table1.md .. table6.md into `directory` and returns their paths.
inline std::vector<std::filesystem::path> reproduce_tables(const std::filesystem::path& directory,
                                                           const ExperimentConfig& cfg = {}, unsigned workers = 1) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec)
        throw std::runtime_error("cannot create " + directory.string() + ": " + ec.message());

    const ExperimentReport report = run_experiment(cfg, workers);
    std::vector<std::filesystem::path> written;
    for (std::size_t i = 0; i < report.sizes.size(); ++i) {
        const auto path = directory / fmt::format("table{}.md", i + 1);
        write_file(path, render_size_markdown(report.sizes[i]));
        written.push_back(path);
    }
    const auto averages = directory / fmt::format("table{}.md", report.sizes.size() + 1);
    write_file(averages, "## Theoretical and experimental average path lengths\n\n" + render_averages(report));
    written.push_back(averages);

    const auto chi = directory / fmt::format("table{}.md", report.sizes.size() + 2);
    write_file(chi, "## Chi-square goodness-of-fit\n\n### Simulated observations\n\n" + render_chi_square(report) +
                        "\n### Published observations (probability basis)\n\n" + render_reference_chi_square());
    written.push_back(chi);
    return written;
}

} // namespace pathlab
