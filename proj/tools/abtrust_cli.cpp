// Command-line front end: solve a trust matrix, run simulations, reproduce
// the experiment sweeps, and emit machine-readable tables.
#include "abtrust/experiments.hpp"
#include "abtrust/io.hpp"
#include "abtrust/manifest.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>

namespace {

using namespace abtrust;

struct CliValues {
    std::optional<std::string> config_path;
    std::map<std::string, std::string> overrides;

    // scenario shortcuts
    std::optional<std::string> malicious;
    std::optional<std::string> unpredictable;
    std::optional<std::string> groups;
};

// Registers the shared config flags on a subcommand; values land as strings
// and are parsed by the config resolver so diagnostics name the field.
void add_common_options(CLI::App* cmd, CliValues& values) {
    auto bind = [cmd, &values](const std::string& flag, const std::string& key,
                               const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [&values, key](const std::string& v) { values.overrides[key] = v; }, help);
    };
    cmd->add_option("--config", values.config_path, "Config file (INI sections)");
    bind("--seed", "run.seed", "Base RNG seed");
    bind("--trials", "run.trials", "Trials per sweep point");
    bind("--jobs", "run.jobs", "Concurrent trials (0 = hardware)");
    bind("--out", "run.out", "Output directory");
    bind("--p", "solver.p", "Weighted-average exponent p");
    bind("--q", "solver.q", "Group-trust exponent q");
    bind("--threshold", "solver.threshold", "Solver residual threshold");
    bind("--max-iterations", "solver.max_iterations", "Solver iteration cap");
    bind("--scenario", "sim.scenario", "malicious | unpredictable | collective");
    bind("--algorithm", "run.algorithms", "Trust algorithm");
    bind("--algorithms", "run.algorithms", "Comma list: absolute,eigentrust,powertrust");
    bind("--values", "run.values", "Comma list of sweep values");
    bind("--ttl", "sim.ttl_initial", "Initial query TTL");
    bind("--global-ref", "sim.global_ref", "Acceptance threshold on global trust");
    bind("--peers", "sim.peers", "Number of peers");
    bind("--files", "sim.files", "Number of distinct files");
    bind("--transactions", "sim.transactions", "Query cycles per trial");
    bind("--update-period", "sim.update_period", "Query cycles between trust updates");
    bind("--fidelity", "sim.behavior_fidelity", "Probability of acting per profile");
    bind("--beta", "sim.beta", "Global/local mixing weight");
    bind("--selection", "sim.selection", "max | proportional");
    bind("--replica-scale", "sim.replica_scale", "Replicas of the least popular file");
    bind("--degree", "sim.degree", "Overlay degree");
    bind("--w-g", "sim.w_g", "Weight for a satisfactory file");
    bind("--w-b", "sim.w_b", "Weight for an unsatisfactory file");
    cmd->add_option("--malicious", values.malicious, "Pure-malicious peer fraction");
    cmd->add_option("--unpredictable", values.unpredictable, "Unpredictable peer fraction");
    cmd->add_option("--groups", values.groups, "Number of collective groups");
}

ResolvedConfig resolve(CliValues& values) {
    int shortcuts = 0;
    if (values.malicious) {
        values.overrides.try_emplace("sim.scenario", "malicious");
        values.overrides["sim.scenario_value"] = *values.malicious;
        ++shortcuts;
    }
    if (values.unpredictable) {
        values.overrides.try_emplace("sim.scenario", "unpredictable");
        values.overrides["sim.scenario_value"] = *values.unpredictable;
        ++shortcuts;
    }
    if (values.groups) {
        values.overrides.try_emplace("sim.scenario", "collective");
        values.overrides["sim.scenario_value"] = *values.groups;
        ++shortcuts;
    }
    if (shortcuts > 1)
        throw std::runtime_error("give only one of --malicious, --unpredictable, --groups");
    return resolve_config(values.overrides, values.config_path);
}

RunManifest make_manifest(const std::string& subcommand, const ResolvedConfig& config) {
    RunManifest m;
    m.subcommand = subcommand;
    m.config = config;
    return m;
}

void finish_manifest(RunManifest& manifest, const std::chrono::steady_clock::time_point& start,
                     const std::string& out_dir) {
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string path = out_dir + "/manifest.json";
    save_manifest(manifest, path);
    std::printf("wrote %s\n", path.c_str());
}

std::string ensure_out_dir(const ResolvedConfig& config) {
    std::filesystem::create_directories(config.run.out_dir);
    return config.run.out_dir;
}

int run_solve(const std::string& matrix_path, CliValues& values) {
    const auto start = std::chrono::steady_clock::now();
    ResolvedConfig config = resolve(values);
    const TrustMatrix trust = load_trust_matrix_csv(matrix_path);
    const GlobalTrustVector result = solve_absolute_trust(trust, config.sim.solver);

    for (Index i = 0; i < trust.size(); ++i)
        std::printf("peer %lld: %s\n", static_cast<long long>(i),
                    format_double(result.values[i]).c_str());
    std::printf("%s after %d iterations, final residual %s\n",
                result.converged ? "converged" : "NOT converged", result.iterations_used,
                result.residual_trace.empty() ? "n/a"
                                              : format_double(result.residual_trace.back()).c_str());

    if (values.overrides.count("run.out")) {
        const std::string out_dir = ensure_out_dir(config);
        std::string solution = "peer,trust\n";
        for (Index i = 0; i < trust.size(); ++i)
            solution += std::to_string(i) + "," + format_double(result.values[i]) + "\n";
        write_text_file(out_dir + "/solution.csv", solution);
        std::string residuals = "iteration,residual\n";
        for (std::size_t k = 0; k < result.residual_trace.size(); ++k)
            residuals +=
                std::to_string(k + 1) + "," + format_double(result.residual_trace[k]) + "\n";
        write_text_file(out_dir + "/residuals.csv", residuals);
        RunManifest manifest = make_manifest("solve", config);
        manifest.artifacts = {out_dir + "/solution.csv", out_dir + "/residuals.csv"};
        finish_manifest(manifest, start, out_dir);
    }
    return result.converged ? 0 : 3;
}

void print_rows(const std::vector<SweepRow>& rows) {
    std::printf("%14s %12s %12s %10s %12s\n", "scenario_value", "algorithm", "authentic%",
                "stderr", "load_stddev");
    for (const SweepRow& r : rows)
        std::printf("%14.6g %12s %12.2f %10.3f %12.1f\n", r.scenario_value_pct,
                    to_string(r.algorithm).c_str(), r.mean_authentic_pct, r.stderr_authentic_pct,
                    r.mean_load_stddev);
}

int run_table(const std::string& subcommand, CliValues& values, bool single_point) {
    const auto start = std::chrono::steady_clock::now();
    ResolvedConfig config = resolve(values);

    std::vector<double> sweep_values = config.run.values;
    if (single_point) {
        sweep_values = {config.sim.scenario_value};
    } else if (sweep_values.empty()) {
        sweep_values = default_sweep_values(config.sim.scenario);
    }

    const std::vector<SweepRow> rows =
        sweep(config.sim.scenario, config.run.algorithms, sweep_values, config.run.trials,
              config.sim, config.run.jobs > 0 ? config.run.jobs
                                              : static_cast<int>(std::thread::hardware_concurrency()));
    print_rows(rows);

    const std::string out_dir = ensure_out_dir(config);
    const std::string results_path = out_dir + "/results.csv";
    write_text_file(results_path, results_csv(rows));
    std::printf("wrote %s\n", results_path.c_str());

    RunManifest manifest = make_manifest(subcommand, config);
    manifest.artifacts = {results_path};
    finish_manifest(manifest, start, out_dir);
    return 0;
}

std::pair<int, int> parse_alpha(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            std::size_t pos = 0;
            const int q = std::stoi(text, &pos);
            if (pos != text.size() || q < 1) throw std::invalid_argument("bad");
            return {1, q};  // alpha = q/1
        }
        std::size_t pos = 0;
        const int q = std::stoi(text.substr(0, slash), &pos);
        const std::string den = text.substr(slash + 1);
        std::size_t pos2 = 0;
        const int p = std::stoi(den, &pos2);
        if (pos != slash || pos2 != den.size() || p < 1 || q < 1)
            throw std::invalid_argument("bad");
        return {p, q};
    } catch (const std::exception&) {
        throw std::runtime_error("field alphas: expected integer ratios like 1,1/2,1/3, got '" +
                                 text + "'");
    }
}

int run_convergence(const std::string& alphas, int iterations, CliValues& values) {
    const auto start = std::chrono::steady_clock::now();
    ResolvedConfig config = resolve(values);

    std::vector<std::pair<int, int>> exponents;
    std::stringstream ss(alphas);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) exponents.push_back(parse_alpha(item));
    if (exponents.empty()) throw std::runtime_error("field alphas: empty list");

    const std::vector<ConvergenceRow> rows =
        convergence_study(exponents, config.sim.seed, iterations, config.sim.peers);

    std::printf("%8s %4s %4s %12s %12s\n", "alpha", "p", "q", "iters<1e-3", "iters<1e-4");
    for (const ConvergenceRow& r : rows)
        std::printf("%8.4f %4d %4d %12d %12d\n", r.alpha, r.p, r.q, r.iterations_to(1e-3),
                    r.iterations_to(1e-4));

    const std::string out_dir = ensure_out_dir(config);
    const std::string residuals_path = out_dir + "/residuals.csv";
    write_text_file(residuals_path, residuals_csv(rows));
    std::printf("wrote %s\n", residuals_path.c_str());

    RunManifest manifest = make_manifest("convergence", config);
    manifest.artifacts = {residuals_path};
    finish_manifest(manifest, start, out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Absolute-trust aggregation and P2P reputation simulator"};
    app.set_version_flag("--version", abtrust::kToolVersion);
    app.require_subcommand(1);

    CliValues solve_values;
    std::string matrix_path;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a trust matrix to its fixed point");
    solve_cmd->add_option("--matrix", matrix_path, "Trust matrix CSV (rater,ratee,score)")
        ->required();
    add_common_options(solve_cmd, solve_values);

    CliValues simulate_values;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run one scenario point");
    add_common_options(simulate_cmd, simulate_values);

    CliValues sweep_values;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a full scenario sweep");
    add_common_options(sweep_cmd, sweep_values);

    CliValues convergence_values;
    std::string alphas = "1,1/2,1/3,1/4,1/5";
    int iterations = 20;
    CLI::App* convergence_cmd =
        app.add_subcommand("convergence", "Residual traces for a range of alpha = q/p");
    convergence_cmd->add_option("--alphas", alphas, "Comma list of ratios, e.g. 1,1/2,1/3");
    convergence_cmd->add_option("--iterations", iterations, "Iterations to trace");
    add_common_options(convergence_cmd, convergence_values);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_solve(matrix_path, solve_values);
        if (simulate_cmd->parsed()) return run_table("simulate", simulate_values, true);
        if (sweep_cmd->parsed()) return run_table("sweep", sweep_values, false);
        if (convergence_cmd->parsed()) return run_convergence(alphas, iterations, convergence_values);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
