// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "coevo/cli.hpp"
#include "coevo/io.hpp"

using namespace coevo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("coevo_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

Trajectory small_run(std::uint64_t seed = 1) {
    SimParams p;
    p.lambda = 1.0;
    p.gamma = 50.0;
    p.theta = 0.05;
    p.dt = 1e-3;
    p.t_max = 2.0;
    p.seed = seed;
    p.x0 = 0.01;
    p.record_stride = 4;
    return simulate(logistic_model(1.0), gaussian_env(), fixed_coupling(), p);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"coevo"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli::run(static_cast<int>(argv.size()), const_cast<char**>(argv.data()));
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
    for (const double v : {0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, -2.5e17, 0.0,
                           0.000991, 9.999999999999999e22}) {
        REQUIRE(io::parse_double(io::format_double(v)) == v);
    }
}

TEST_CASE("trajectory CSV round-trips bit-exactly") {
    TempDir tmp;
    const auto traj = small_run();
    const auto path = tmp.path / "run.csv";
    io::write_trajectory_csv(traj, path);
    const auto back = io::read_trajectory_csv(path);
    REQUIRE(back.times == traj.times);
    REQUIRE(back.xs == traj.xs);
    REQUIRE(back.ys == traj.ys);
    REQUIRE(slurp(path).starts_with("t,x,y\n"));
}

TEST_CASE("identical seeds produce byte-identical CSV files") {
    TempDir tmp;
    io::write_trajectory_csv(small_run(7), tmp.path / "a.csv");
    io::write_trajectory_csv(small_run(7), tmp.path / "b.csv");
    io::write_trajectory_csv(small_run(8), tmp.path / "c.csv");
    REQUIRE(slurp(tmp.path / "a.csv") == slurp(tmp.path / "b.csv"));
    REQUIRE(slurp(tmp.path / "a.csv") != slurp(tmp.path / "c.csv"));
}

TEST_CASE("CSV reader rejects malformed input") {
    TempDir tmp;
    const auto path = tmp.path / "bad.csv";
    io::write_text("x,y,z\n1,2,3\n", path);
    REQUIRE_THROWS_AS(io::read_trajectory_csv(path), io::IoError);
    io::write_text("t,x,y\n1,2\n", path);
    REQUIRE_THROWS_AS(io::read_trajectory_csv(path), io::IoError);
    REQUIRE_THROWS_AS(io::read_trajectory_csv(tmp.path / "missing.csv"), io::IoError);
}

TEST_CASE("trajectory JSON carries full reproduction metadata") {
    const auto traj = small_run(99);
    const auto j = io::trajectory_json(traj);
    REQUIRE(j.at("version").get<std::string>() == std::string(version));
    REQUIRE(j.at("params").at("seed").get<std::uint64_t>() == 99);
    REQUIRE(j.at("params").at("dt").get<double>() == traj.params.dt);
    REQUIRE(j.at("params").at("record_stride").get<std::uint64_t>() == 4);
    REQUIRE(j.at("model").at("variant").get<std::string>() == "logistic");
    REQUIRE(j.at("t").size() == traj.size());
    const auto p = io::params_from_json(j.at("params"));
    REQUIRE(p == traj.params);
    const auto m = io::growth_from_json(j.at("model"));
    REQUIRE(m == traj.model);
}

TEST_CASE("density CSV re-integrates to one") {
    Rng rng(3);
    std::vector<double> samples(200'000);
    for (auto& s : samples)
        s = -0.5 * (std::log(rng.uniform()) + std::log(rng.uniform()) + std::log(rng.uniform()));
    const auto report = compare_density(samples, logistic_model(1.0), 0.5, 50, 0.0, 4.0);

    TempDir tmp;
    const auto path = tmp.path / "hist.csv";
    io::write_density_csv(report, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "bin_lo,bin_hi,empirical,theoretical");
    double integral = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1);
        const double lo = io::parse_double(std::string_view(line).substr(0, c1));
        const double hi = io::parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
        const double emp = io::parse_double(std::string_view(line).substr(c2 + 1, c3 - c2 - 1));
        integral += emp * (hi - lo);
        ++rows;
    }
    REQUIRE(rows == 50);
    REQUIRE(std::abs(integral - 1.0) < 1e-12);
}

TEST_CASE("emit_trajectory writes the requested manifest") {
    TempDir tmp;
    const auto traj = small_run();
    const auto manifest = io::emit_trajectory(traj, "demo", {true, true, true}, tmp.path);
    REQUIRE(manifest.size() == 3);
    for (const auto& p : manifest) REQUIRE(fs::exists(p));
    REQUIRE(slurp(tmp.path / "demo.svg").find("<svg") != std::string::npos);
    REQUIRE(slurp(tmp.path / "demo.svg").find("polyline") != std::string::npos);

    const auto csv_only = io::emit_trajectory(traj, "bare", {true, false, false}, tmp.path);
    REQUIRE(csv_only.size() == 1);
    REQUIRE(csv_only[0].filename() == "bare.csv");
}

TEST_CASE("scenario emission produces the documented files") {
    TempDir tmp;
    auto spec = preset("fig1a");
    spec.params.t_max = 2.0;
    const auto report = run_scenario(spec);
    io::emit_scenario(report, {true, true, true}, tmp.path);
    REQUIRE(fs::exists(tmp.path / "fig1a.csv"));
    REQUIRE(fs::exists(tmp.path / "fig1a.json"));
    REQUIRE(fs::exists(tmp.path / "fig1a.svg"));
    REQUIRE(fs::exists(tmp.path / "fig1a_reference.csv"));

    const auto j = nlohmann::json::parse(slurp(tmp.path / "fig1a.json"));
    REQUIRE(j.at("spec").at("name") == "fig1a");
    REQUIRE(io::scenario_from_json(j.at("spec")) == report.spec);
}

TEST_CASE("parse_config maps the scenario example") {
    const auto cfg = cli::parse_config({"scenario", "fig2", "--t-max", "1e4", "--seed", "42"});
    REQUIRE(cfg.command == cli::RunConfig::Command::scenario);
    REQUIRE(cfg.scenario_name == "fig2");
    REQUIRE(cfg.t_max_override.has_value());
    REQUIRE(*cfg.t_max_override == Catch::Approx(1e4));
    REQUIRE(cfg.seed_override.has_value());
    REQUIRE(*cfg.seed_override == 42);
}

TEST_CASE("parse_config validates before any computation") {
    REQUIRE_THROWS_WITH(cli::parse_config({"simulate", "--theta", "-1"}),
                        Catch::Matchers::ContainsSubstring("theta"));
    REQUIRE_THROWS_WITH(cli::parse_config({"simulate", "--dt", "0.02", "--gamma", "50"}),
                        Catch::Matchers::ContainsSubstring("dt"));
    REQUIRE_THROWS_AS(cli::parse_config({}), cli::ConfigError);
    REQUIRE_THROWS_AS(cli::parse_config({"frobnicate"}), cli::ConfigError);
    REQUIRE_THROWS_WITH(cli::parse_config({"simulate", "--format", "yaml"}),
                        Catch::Matchers::ContainsSubstring("--format"));
}

TEST_CASE("parse_config reads a key = value config file") {
    TempDir tmp;
    const auto cfg_path = tmp.path / "run.cfg";
    io::write_text("theta = 0.25\ngamma = 10\nseed = 5\n", cfg_path);
    const auto cfg = cli::parse_config(
        {"simulate", "--config", cfg_path.string(), "--theta", "0.75"});
    REQUIRE(cfg.params.gamma == Catch::Approx(10.0));
    REQUIRE(cfg.params.seed == 5);
    REQUIRE(cfg.params.theta == Catch::Approx(0.75));  // flag overrides file

    io::write_text("frobnicate = 3\n", cfg_path);
    REQUIRE_THROWS_WITH(cli::parse_config({"simulate", "--config", cfg_path.string()}),
                        Catch::Matchers::ContainsSubstring("frobnicate"));
    io::write_text("just some words\n", cfg_path);
    REQUIRE_THROWS_WITH(cli::parse_config({"simulate", "--config", cfg_path.string()}),
                        Catch::Matchers::ContainsSubstring("key = value"));
    REQUIRE_THROWS_AS(cli::parse_config({"simulate", "--config", "/nonexistent.cfg"}),
                      cli::ConfigError);
}

TEST_CASE("cli exit codes") {
    TempDir tmp;
    SECTION("no arguments is a usage error") { REQUIRE(run_cli({}) == 2); }
    SECTION("invalid invariant names the key and exits 2") {
        REQUIRE(run_cli({"simulate", "--theta", "-1"}) == 2);
    }
    SECTION("unknown scenario exits 2") {
        REQUIRE(run_cli({"scenario", "nope", "--out", tmp.path.string().c_str()}) == 2);
    }
    SECTION("successful simulate run exits 0 and writes files") {
        const auto out = tmp.path.string();
        REQUIRE(run_cli({"simulate", "--t-max", "1", "--theta", "0.05", "--x0", "0.5",
                         "--name", "tiny", "--out", out.c_str()}) == 0);
        REQUIRE(fs::exists(tmp.path / "tiny.csv"));
        REQUIRE(fs::exists(tmp.path / "tiny.json"));
        REQUIRE(fs::exists(tmp.path / "tiny.svg"));
    }
    SECTION("simulate with a histogram report") {
        const auto out = tmp.path.string();
        REQUIRE(run_cli({"simulate", "--t-max", "50", "--theta", "0.5", "--bins", "25",
                         "--range", "0", "4", "--name", "h", "--out", out.c_str()}) == 0);
        REQUIRE(fs::exists(tmp.path / "h_hist.csv"));
        REQUIRE(fs::exists(tmp.path / "h_hist.json"));
    }
    SECTION("unwritable output directory exits 3") {
        REQUIRE(run_cli({"simulate", "--t-max", "1", "--out", "/proc/nonexistent/dir"}) == 3);
    }
}
