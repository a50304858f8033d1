// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coevo/checks.hpp"
#include "coevo/io.hpp"
#include "coevo/scenarios.hpp"

namespace coevo::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_io = 3;
inline constexpr int exit_verify = 4;

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    enum class Command { simulate, scenario, verify };
    Command command = Command::simulate;

    // simulate
    GrowthModel model{};
    EnvironmentModel env{};
    CouplingRule rule{};
    SimParams params{};
    std::string run_name = "run";
    std::size_t bins = 0;  // 0 disables the density report
    double range_lo = 0.0;
    double range_hi = 4.0;

    // scenario
    std::string scenario_name;
    std::optional<double> t_max_override;
    std::optional<double> theta_override;
    std::optional<double> dt_override;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::uint64_t> stride_override;
    std::optional<std::size_t> runs_override;

    // verify
    bool full = false;

    // common
    std::filesystem::path out_dir = "out";
    io::EmitOptions formats{};
};

namespace detail {

struct RawOptions {
    std::string model = "logistic";
    std::string env = "gaussian";
    std::string coupling = "fixed";
    double K = 1.0;
    double m = 0.5;
    double D = 4.0;
    double a = 0.25;
    double threshold = 0.0;
    double base = 1.0;
    double increment = 1.0;
    SimParams params{};
    std::vector<double> range{0.0, 4.0};
    std::vector<std::string> formats{"csv", "json", "svg"};
    std::string out = "out";
    std::string name = "run";
    std::size_t bins = 0;

    std::string config_path;  // listed for --help; consumed before CLI11 runs
    std::string scenario_name;
    double t_max_override = -1.0;
    double theta_override = -1.0;
    double dt_override = -1.0;
    std::int64_t seed_override = -1;
    std::int64_t stride_override = -1;
    std::int64_t runs_override = -1;

    bool full = false;
};

inline void add_common_options(CLI::App* cmd, RawOptions& raw) {
    cmd->add_option("--config", raw.config_path,
                    "configuration file with key = value lines; flags override file values");
    cmd->add_option("--out", raw.out, "output directory")->capture_default_str();
    cmd->add_option("--format", raw.formats, "output formats, subset of csv,json,svg")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "svg"}));
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

/// Expands `--config FILE` into `--key=value` tokens. Lines are `key = value`;
/// blank lines and `#` comments are allowed. A key also given on the command
/// line is skipped, so flags override file values.
inline std::vector<std::string> merge_config_file(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("config: expected a file path");
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].starts_with("--config=")) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw ConfigError("config: cannot open '" + config_path + "'");
    auto given_on_cli = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (const auto& a : args)
            if (a == flag || a.starts_with(flag + "=")) return true;
        return false;
    };
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not a key = value pair: '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not a key = value pair: '" + stripped + "'");
        if (!given_on_cli(key)) args.push_back("--" + key + "=" + value);
    }
    return args;
}

inline io::EmitOptions emit_options(const std::vector<std::string>& formats) {
    io::EmitOptions opts{false, false, false};
    for (const auto& f : formats) {
        if (f == "csv") opts.csv = true;
        if (f == "json") opts.json = true;
        if (f == "svg") opts.svg = true;
    }
    if (!opts.csv && !opts.json && !opts.svg)
        throw ConfigError("format: need at least one of csv, json, svg");
    return opts;
}

}  // namespace detail

/// Parses argv (plus an optional `--config key = value` file) into a fully
/// validated RunConfig. Throws ConfigError naming the offending key.
inline RunConfig parse_config(const std::vector<std::string>& raw_args) {
    const std::vector<std::string> args = detail::merge_config_file(raw_args);
    CLI::App app{"coevo: stochastic population-environment coevolution models"};
    app.require_subcommand(1);
    detail::RawOptions raw;

    auto* sim = app.add_subcommand("simulate", "integrate one stochastic trajectory");
    sim->add_option("--model", raw.model, "growth model: logistic | gompertz")
        ->check(CLI::IsMember({"logistic", "gompertz"}))
        ->capture_default_str();
    sim->add_option("--env", raw.env,
                    "environment: gaussian | symmetric-bimodal | asymmetric-bimodal")
        ->check(CLI::IsMember({"gaussian", "symmetric-bimodal", "asymmetric-bimodal"}))
        ->capture_default_str();
    sim->add_option("--coupling", raw.coupling, "carrying-capacity coupling: fixed | heaviside")
        ->check(CLI::IsMember({"fixed", "heaviside"}))
        ->capture_default_str();
    sim->add_option("--K", raw.K, "carrying capacity (population units), > 0")
        ->capture_default_str();
    sim->add_option("--m", raw.m, "symmetric bimodal well position parameter, > 0")
        ->capture_default_str();
    sim->add_option("--D", raw.D, "asymmetric bimodal scale, > 0")->capture_default_str();
    sim->add_option("--a", raw.a, "asymmetric bimodal detuning, in (0,1)")->capture_default_str();
    sim->add_option("--threshold", raw.threshold, "coupling threshold on y")
        ->capture_default_str();
    sim->add_option("--base", raw.base, "coupling base carrying capacity")->capture_default_str();
    sim->add_option("--increment", raw.increment, "coupling carrying-capacity increment")
        ->capture_default_str();
    sim->add_option("--theta", raw.params.theta, "ecological temperature, >= 0")
        ->capture_default_str();
    sim->add_option("--gamma", raw.params.gamma, "relaxation rate (1/time), >= 0")
        ->capture_default_str();
    sim->add_option("--lambda", raw.params.lambda, "coupling rate (1/time), > 0")
        ->capture_default_str();
    sim->add_option("--dt", raw.params.dt, "time step, > 0 and < 0.5/gamma")
        ->capture_default_str();
    sim->add_option("--t-max", raw.params.t_max, "horizon (time units), > 0")
        ->capture_default_str();
    sim->add_option("--seed", raw.params.seed, "rng seed (64-bit)")->capture_default_str();
    sim->add_option("--x0", raw.params.x0, "initial population density, > 0")
        ->capture_default_str();
    sim->add_option("--y0", raw.params.y0, "initial environment value")->capture_default_str();
    sim->add_option("--record-stride", raw.params.record_stride, "record every k-th step, >= 1")
        ->capture_default_str();
    sim->add_option("--bins", raw.bins,
                    "histogram bins for a stationary-density report (0 = off)")
        ->capture_default_str();
    sim->add_option("--range", raw.range, "histogram range: lo hi")->expected(2);
    sim->add_option("--name", raw.name, "output base name")->capture_default_str();
    detail::add_common_options(sim, raw);

    auto* sc = app.add_subcommand("scenario", "run a named preset scenario");
    sc->add_option("name", raw.scenario_name, "preset: fig1a fig1b fig2 fig3 fig3-coupled fig4 fig4-coupled gompertz")
        ->required();
    sc->add_option("--t-max", raw.t_max_override, "override horizon (time units)");
    sc->add_option("--theta", raw.theta_override, "override ecological temperature");
    sc->add_option("--dt", raw.dt_override, "override time step");
    sc->add_option("--seed", raw.seed_override, "override rng seed");
    sc->add_option("--record-stride", raw.stride_override, "override recording stride");
    sc->add_option("--runs", raw.runs_override, "override ensemble size");
    detail::add_common_options(sc, raw);

    auto* ver = app.add_subcommand("verify", "run the verification suite");
    ver->add_flag("--full", raw.full,
                  "include the statistical figure-level checks (minutes, not seconds)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help() << std::flush;
        throw;  // handled by run()
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string(e.what()) + "\n\n" + app.help());
    }

    RunConfig cfg;
    cfg.out_dir = raw.out;
    cfg.formats = detail::emit_options(raw.formats);

    if (sim->parsed()) {
        cfg.command = RunConfig::Command::simulate;
        cfg.model = raw.model == "logistic" ? logistic_model(raw.K) : gompertz_model(raw.K);
        if (raw.env == "gaussian") cfg.env = gaussian_env();
        else if (raw.env == "symmetric-bimodal") cfg.env = symmetric_bimodal_env(raw.m);
        else cfg.env = asymmetric_bimodal_env(raw.D, raw.a);
        cfg.rule = raw.coupling == "fixed"
                       ? fixed_coupling()
                       : heaviside_coupling(raw.threshold, raw.base, raw.increment);
        cfg.params = raw.params;
        validate(cfg.params);
        cfg.bins = raw.bins;
        cfg.range_lo = raw.range[0];
        cfg.range_hi = raw.range[1];
        if (cfg.bins > 0 && !(cfg.range_hi > cfg.range_lo))
            throw ConfigError("range: upper bound must exceed lower bound");
        cfg.run_name = raw.name;
    } else if (sc->parsed()) {
        cfg.command = RunConfig::Command::scenario;
        cfg.scenario_name = raw.scenario_name;
        if (raw.t_max_override > 0.0) cfg.t_max_override = raw.t_max_override;
        else if (sc->count("--t-max") > 0) throw ConfigError("t-max: horizon must be > 0");
        if (sc->count("--theta") > 0) {
            if (raw.theta_override < 0.0) throw ConfigError("theta: ecological temperature must be >= 0");
            cfg.theta_override = raw.theta_override;
        }
        if (sc->count("--dt") > 0) {
            if (raw.dt_override <= 0.0) throw ConfigError("dt: time step must be > 0");
            cfg.dt_override = raw.dt_override;
        }
        if (sc->count("--seed") > 0) {
            if (raw.seed_override < 0) throw ConfigError("seed: must be a non-negative integer");
            cfg.seed_override = static_cast<std::uint64_t>(raw.seed_override);
        }
        if (sc->count("--record-stride") > 0) {
            if (raw.stride_override < 1) throw ConfigError("record-stride: must be a positive integer");
            cfg.stride_override = static_cast<std::uint64_t>(raw.stride_override);
        }
        if (sc->count("--runs") > 0) {
            if (raw.runs_override < 1) throw ConfigError("runs: ensemble size must be >= 1");
            cfg.runs_override = static_cast<std::size_t>(raw.runs_override);
        }
    } else {
        cfg.command = RunConfig::Command::verify;
        cfg.full = raw.full;
    }
    return cfg;
}

namespace detail {

inline int execute_simulate(const RunConfig& cfg) {
    const auto traj = simulate(cfg.model, cfg.env, cfg.rule, cfg.params);
    auto manifest = io::emit_trajectory(traj, cfg.run_name, cfg.formats, cfg.out_dir);
    if (cfg.bins > 0) {
        const auto report = compare_density(traj, cfg.model, cfg.params.theta, cfg.bins,
                                            cfg.range_lo, cfg.range_hi);
        if (cfg.formats.csv) {
            auto p = cfg.out_dir / (cfg.run_name + "_hist.csv");
            io::write_density_csv(report, p);
            manifest.push_back(p);
        }
        if (cfg.formats.json) {
            auto p = cfg.out_dir / (cfg.run_name + "_hist.json");
            io::write_text(io::density_report_json(report).dump(2) + "\n", p);
            manifest.push_back(p);
        }
    }
    for (const auto& p : manifest) std::cout << "wrote " << p.string() << '\n';
    return exit_ok;
}

inline int execute_scenario(const RunConfig& cfg) {
    auto spec = preset(cfg.scenario_name);
    if (cfg.t_max_override) spec.params.t_max = *cfg.t_max_override;
    if (cfg.theta_override) spec.params.theta = *cfg.theta_override;
    if (cfg.dt_override) spec.params.dt = *cfg.dt_override;
    if (cfg.seed_override) spec.params.seed = *cfg.seed_override;
    if (cfg.stride_override) spec.params.record_stride = *cfg.stride_override;
    if (cfg.runs_override) spec.n_runs = *cfg.runs_override;
    validate(spec.params);

    const auto report = run_scenario(spec);
    const auto manifest = io::emit_scenario(report, cfg.formats, cfg.out_dir);
    for (const auto& p : manifest) std::cout << "wrote " << p.string() << '\n';
    if (report.density)
        std::cout << "density distances: L1=" << io::format_double(report.density->l1_distance)
                  << " KS=" << io::format_double(report.density->ks_distance) << '\n';
    for (std::size_t i = 0; i < report.transitions.size(); ++i)
        for (const auto& e : report.transitions[i])
            std::cout << "run " << i << ": " << (e.direction > 0 ? "upward" : "downward")
                      << " transition near t=" << io::format_double(e.time) << '\n';
    return exit_ok;
}

inline int execute_verify(const RunConfig& cfg) {
    const auto results = cfg.full ? checks::run_all() : checks::run_fast();
    bool all_ok = true;
    for (const auto& r : results) {
        all_ok = all_ok && r.passed;
        std::printf("[%s] criterion %d: %s (%.1fs)\n    %s\n", r.passed ? "PASS" : "FAIL",
                    r.criterion, r.name.c_str(), r.seconds, r.detail.c_str());
    }
    std::printf("%zu/%zu checks passed\n",
                static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                                       [](const auto& r) { return r.passed; })),
                results.size());
    return all_ok ? exit_ok : exit_verify;
}

}  // namespace detail

/// Entry point used by the binary: parse, execute, map failures to the
/// documented exit codes (2 config, 3 I/O, 4 verification).
inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const RunConfig cfg = parse_config(args);
        switch (cfg.command) {
            case RunConfig::Command::simulate: return detail::execute_simulate(cfg);
            case RunConfig::Command::scenario: return detail::execute_scenario(cfg);
            case RunConfig::Command::verify: return detail::execute_verify(cfg);
        }
        return exit_ok;
    } catch (const CLI::CallForHelp&) {
        return exit_ok;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const io::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace coevo::cli
