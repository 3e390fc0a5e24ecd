// pathlab: path-length model queries, simulations and table reproduction.
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime error.

#include <pathlab/pathlab.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;

struct SimulateOptions {
    std::vector<std::uint64_t> sizes{100, 1'000, 10'000, 100'000};
    unsigned trials = 10;
    std::optional<std::uint64_t> seed;
    std::string mode = "uniform";
    std::string format = "md";
    std::string out;
    std::size_t k_max = pathlab::model::max_path_length;
    double min_expected = 5.0;
    bool allow_large = false;
    unsigned workers = 0;
    bool strict = false;
};

std::uint64_t default_seed() {
    const char* env = std::getenv("PATHLAB_SEED");
    if (!env || !*env)
        return 1;
    std::uint64_t v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw pathlab::config_error("PATHLAB_SEED is not an unsigned 64-bit integer: '" + s + "'");
    return v;
}

unsigned resolve_workers(unsigned requested) {
    if (requested != 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

pathlab::ExperimentConfig to_config(const SimulateOptions& o) {
    pathlab::ExperimentConfig cfg;
    cfg.sizes = o.sizes;
    cfg.trials = o.trials;
    cfg.master_seed = o.seed ? *o.seed : default_seed();
    cfg.mode = pathlab::parse_generator_mode(o.mode);
    cfg.k_max = o.k_max;
    cfg.output_format = pathlab::parse_output_format(o.format);
    cfg.min_expected = o.min_expected;
    cfg.allow_large = o.allow_large;
    pathlab::validate(cfg);
    return cfg;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    pathlab::write_file(out_path, text);
}

void warn_large(const pathlab::ExperimentConfig& cfg) {
    for (auto n : cfg.sizes)
        if (n > pathlab::desk_scale_limit)
            std::cerr << fmt::format("warning: size {} is beyond desk scale; expect long runtimes and high memory use\n",
                                     n);
}

void add_simulation_options(CLI::App* cmd, SimulateOptions& o) {
    cmd->add_option("--sizes", o.sizes, "Comma-separated trie sizes")->delimiter(',');
    cmd->add_option("--trials", o.trials, "Trials per size")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Master seed (default: $PATHLAB_SEED, else 1)");
    cmd->add_option("--mode", o.mode, "Address generator: uniform or crypto")
        ->check(CLI::IsMember({"uniform", "crypto"}));
    cmd->add_option("--format", o.format, "Output format: md, csv or json");
    cmd->add_option("--out", o.out, "Write output to a file instead of stdout");
    cmd->add_option("--kmax", o.k_max, "Largest modeled path length (1-41)");
    cmd->add_option("--min-expected", o.min_expected, "Chi-square bin merge threshold");
    cmd->add_flag("--allow-large", o.allow_large, "Permit sizes above 100,000 (up to 1,000,000)");
    cmd->add_option("--workers", o.workers, "Worker threads (0 = hardware concurrency)");
}

std::string render_validation(const pathlab::ExperimentReport& report, pathlab::OutputFormat format,
                              const std::vector<pathlab::ValidationCheck>& checks) {
    if (format == pathlab::OutputFormat::json) {
        auto j = pathlab::to_json(report);
        auto arr = pathlab::json::array();
        for (const auto& c : checks)
            arr.push_back({{"size", c.size},
                           {"check", c.name},
                           {"value", c.value},
                           {"threshold", c.threshold},
                           {"passed", c.passed}});
        j["validation"] = arr;
        return j.dump(2) + '\n';
    }
    std::string out = pathlab::render(report, format);
    out += format == pathlab::OutputFormat::csv ? "\nsize,check,value,threshold,passed\n" : "\n## Validation\n\n";
    for (const auto& c : checks) {
        if (format == pathlab::OutputFormat::csv)
            out += fmt::format("{},{},{:.6f},{},{}\n", c.size, c.name, c.value, c.threshold, c.passed);
        else
            out += fmt::format("- [{}] n = {}: {} = {:.6f} (threshold {})\n", c.passed ? "PASS" : "FAIL",
                               pathlab::grouped(c.size), c.name, c.value, c.threshold);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patricia-trie path-length model and Monte-Carlo harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pathlab::version));

    std::uint64_t model_n = 0;
    std::size_t model_kmax = pathlab::model::max_path_length;
    std::string model_format = "md";
    double model_min_prob = pathlab::table_row_threshold;
    auto* model_cmd = app.add_subcommand("model", "Evaluate the analytic path-length model");
    model_cmd->add_option("--n", model_n, "Number of addresses")->required();
    model_cmd->add_option("--kmax", model_kmax, "Largest modeled path length (1-41)");
    model_cmd->add_option("--format", model_format, "Output format: md, csv or json");
    model_cmd->add_option("--min-prob", model_min_prob, "Hide pmf rows below this probability (md/csv)");

    SimulateOptions sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Build random tries and report path-length statistics");
    add_simulation_options(simulate_cmd, sim);

    SimulateOptions val;
    auto* validate_cmd = app.add_subcommand("validate", "Simulate, compare with the model and run chi-square checks");
    add_simulation_options(validate_cmd, val);
    validate_cmd->add_flag("--strict", val.strict, "Exit with status 2 if any check fails");

    std::string tables_out;
    std::optional<std::uint64_t> tables_seed;
    unsigned tables_workers = 0;
    auto* tables_cmd = app.add_subcommand("tables", "Write the six comparison tables into a directory");
    tables_cmd->add_option("--out", tables_out, "Output directory")->required();
    tables_cmd->add_option("--seed", tables_seed, "Master seed (default: $PATHLAB_SEED, else 1)");
    tables_cmd->add_option("--workers", tables_workers, "Worker threads (0 = hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    try {
        if (*model_cmd) {
            const auto format = pathlab::parse_output_format(model_format);
            std::cout << pathlab::render_model(pathlab::summarize_model(model_n, model_kmax), format, model_min_prob);
            return 0;
        }
        if (*simulate_cmd) {
            const auto cfg = to_config(sim);
            warn_large(cfg);
            const auto report = pathlab::run_experiment(cfg, resolve_workers(sim.workers));
            emit(pathlab::render(report, cfg.output_format), sim.out);
            return 0;
        }
        if (*validate_cmd) {
            const auto cfg = to_config(val);
            warn_large(cfg);
            const auto report = pathlab::run_experiment(cfg, resolve_workers(val.workers));
            const auto checks = pathlab::validation_checks(report);
            emit(render_validation(report, cfg.output_format, checks), val.out);
            bool ok = true;
            for (const auto& c : checks)
                ok = ok && c.passed;
            return (!ok && val.strict) ? exit_runtime : 0;
        }
        if (*tables_cmd) {
            pathlab::ExperimentConfig cfg;
            cfg.master_seed = tables_seed ? *tables_seed : default_seed();
            for (const auto& path : pathlab::reproduce_tables(tables_out, cfg, resolve_workers(tables_workers)))
                std::cout << path.string() << '\n';
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
