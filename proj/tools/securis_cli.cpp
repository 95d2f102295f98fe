// SPDX-License-Identifier: Apache-2.0
//
// securis command-line front end: validate configurations, run a single
// algorithm on one seeded realization, or sweep an axis over seeded
// realizations. Exit codes: 0 success, 1 validation/usage error, 2 solver
// failure.

#include "securis/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

int env_threads() {
    const char* v = std::getenv("SECURIS_THREADS");
    if (v == nullptr) return 1;
    const int t = std::atoi(v);
    return t >= 1 ? t : 1;
}

securis::Scenario load_or_default(const std::string& path) {
    if (path.empty()) {
        securis::Scenario sc;
        sc.validate();
        return sc;
    }
    return securis::load_scenario(path);
}

std::vector<securis::Algorithm> parse_algorithms(const std::string& csv) {
    std::vector<securis::Algorithm> algs;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto a = securis::algorithm_from_name(tok);
        if (!a) throw securis::config_error("unknown algorithm '" + tok + "'");
        algs.push_back(*a);
    }
    if (algs.empty()) throw securis::config_error("no algorithms given");
    return algs;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    return vals;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"securis: robust secure RIS-assisted UAV link design"};
    app.require_subcommand(1);

    std::string config_path, out_dir, algorithm = "JO", axis_str = "deltaA2", values_csv,
                algorithms_csv = "JO";
    std::uint64_t seed = 1;
    int realizations = 1;
    int threads = env_threads();

    CLI::App* validate = app.add_subcommand("validate", "check a configuration file");
    validate->add_option("--config", config_path, "configuration file (empty: defaults)");

    CLI::App* run = app.add_subcommand("run", "run one algorithm on one seeded realization");
    run->add_option("--config", config_path, "configuration file (empty: defaults)");
    run->add_option("--algorithm", algorithm, "JO, JO_NPB, JO_HT or JO_NR");
    run->add_option("--seed", seed, "realization seed");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--threads", threads, "worker threads (default SECURIS_THREADS or 1)");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one axis over seeded realizations");
    sweep->add_option("--config", config_path, "configuration file (empty: defaults)");
    sweep->add_option("--axis", axis_str, "T, deltaA2, w or Pbar");
    sweep->add_option("--values", values_csv, "comma-separated axis values")->required();
    sweep->add_option("--realizations", realizations, "realizations per value");
    sweep->add_option("--seed", seed, "base seed");
    sweep->add_option("--algorithms", algorithms_csv, "comma-separated algorithm list");
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--threads", threads, "worker threads (default SECURIS_THREADS or 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const securis::Scenario sc = load_or_default(config_path);
            std::cout << "ok: N=" << sc.num_slots() << " slots, M=" << sc.num_elements()
                      << " elements\n";
            return 0;
        }
        if (run->parsed()) {
            const securis::Scenario sc = load_or_default(config_path);
            const auto alg = securis::algorithm_from_name(algorithm);
            if (!alg) {
                std::cerr << "error: unknown algorithm '" << algorithm << "'\n";
                return 1;
            }
            securis::AoOptions opt;
            opt.threads = threads;
            const securis::ResultRow row =
                securis::run_single(sc, *alg, seed, opt, "single", 0.0);
            securis::emit_results({row}, out_dir);
            std::cout << row.algorithm << " seed=" << row.seed << " status=" << row.status
                      << " secrecy_rate=" << row.secrecy_rate << " iterations=" << row.iterations
                      << " wall_ms=" << row.wall_ms << "\n";
            return row.status == "ok" ? 0 : 2;
        }
        // sweep
        const securis::Scenario sc = load_or_default(config_path);
        securis::SweepSpec spec;
        const auto ax = securis::axis_from_name(axis_str);
        if (!ax) {
            std::cerr << "error: unknown axis '" << axis_str << "'\n";
            return 1;
        }
        spec.axis = *ax;
        spec.values = parse_values(values_csv);
        spec.realizations = realizations;
        spec.base_seed = seed;
        spec.algorithms = parse_algorithms(algorithms_csv);
        const auto rows = securis::run_sweep(spec, sc, {}, threads);
        securis::emit_results(rows, out_dir);
        int failures = 0;
        for (const auto& r : rows)
            if (r.status != "ok") ++failures;
        std::cout << "sweep complete: " << rows.size() << " rows, " << failures
                  << " failures, results in " << out_dir << "\n";
        return failures == 0 ? 0 : 2;
    } catch (const securis::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const securis::scenario_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const securis::solver_failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
