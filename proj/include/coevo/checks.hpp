// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "coevo/io.hpp"
#include "coevo/scenarios.hpp"

namespace coevo::checks {

struct CheckResult {
    int criterion = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Positivity bookkeeping across every trajectory a check produces; the
/// numerics criterion reports the aggregate.
struct SuiteStats {
    static inline std::atomic<std::uint64_t> records{0};
    static inline std::atomic<bool> all_positive{true};

    static void scan(const Trajectory& traj) {
        for (double x : traj.xs)
            if (!(x > 0.0)) all_positive = false;
        records += traj.xs.size();
    }
};

}  // namespace detail

/// Criterion 1: the joint density exp(-[h(x)+h*(y)]/theta) annihilates the
/// Fokker--Planck operator to round-off for every model/environment pairing,
/// while a perturbed density leaves a visible residual.
inline CheckResult fp_stationarity() {
    detail::Stopwatch watch;
    const double theta = 0.5, lambda = 1.0, gamma = 50.0;
    const auto x_grid = uniform_grid(0.05, 4.0, 101);
    const auto y_grid = uniform_grid(-3.0, 3.0, 101);

    struct Case {
        GrowthModel model;
        EnvironmentModel env;
        const char* tag;
    };
    const Case cases[] = {
        {logistic_model(1.0), gaussian_env(), "logistic/gaussian"},
        {gompertz_model(1.0), gaussian_env(), "gompertz/gaussian"},
        {logistic_model(1.0), symmetric_bimodal_env(0.5), "logistic/symmetric-bimodal"},
        {logistic_model(1.0), asymmetric_bimodal_env(4.0, 0.25), "logistic/asymmetric-bimodal"},
    };

    bool ok = true;
    std::string detail_txt;
    for (const auto& c : cases) {
        detail::Stopwatch each;
        const double res = fp_residual(c.model, c.env, theta, lambda, gamma, x_grid, y_grid);
        const double elapsed = each.seconds();
        ok = ok && res < 1e-10 && elapsed < 1.0;
        detail_txt += std::string(c.tag) + " residual=" + detail::num(res) + "; ";
    }
    const double control =
        fp_residual(logistic_model(1.0), gaussian_env(), theta, lambda, gamma, x_grid, y_grid,
                    perturbed_density_partials(logistic_model(1.0), gaussian_env(), theta, 0.1));
    ok = ok && control > 1e-3;
    detail_txt += "negative control residual=" + detail::num(control);
    return {1, "Fokker-Planck stationarity identity", ok, detail_txt, watch.seconds()};
}

/// Criterion 2: quadrature zero means of every temperature expression at
/// theta in {0.1, 0.5, 1.0}.
inline CheckResult theta_zero_means() {
    detail::Stopwatch watch;
    const double lambda = 1.0, gamma = 50.0;
    const double thetas[] = {0.1, 0.5, 1.0};
    const auto logistic = logistic_model(1.0);
    const auto gompertz = gompertz_model(1.0);
    const EnvironmentModel envs[] = {gaussian_env(), symmetric_bimodal_env(0.5),
                                     asymmetric_bimodal_env(4.0, 0.25)};

    bool ok = true;
    double worst = 0.0;
    auto track = [&](double v) {
        worst = std::max(worst, std::abs(v));
        ok = ok && std::abs(v) < 1e-8;
    };

    for (double theta : thetas) {
        for (const auto& model : {logistic, gompertz})
            track(zero_mean_quadrature(
                [&](double x) { return theta_population(model, x, theta); }, model, theta));
        for (const auto& env : envs)
            track(zero_mean_quadrature(
                [&](double y) { return theta_env_general(env, y, theta, lambda, gamma); }, env,
                theta));
        track(zero_mean_quadrature(
            [&](double x) {
                return theta_rodrigues_population(
                    logistic, [](double x_) { return x_ * x_; }, [](double x_) { return 2.0 * x_; },
                    x, theta);
            },
            logistic, theta));
        for (int n = 1; n <= 4; ++n)
            track(zero_mean_quadrature([&](double y) { return hermite(n, y, theta); },
                                       gaussian_env(), theta));
    }
    const double elapsed = watch.seconds();
    return {2, "theta-expression zero means", ok && elapsed < 1.0,
            "worst |E{Theta}|=" + detail::num(worst), elapsed};
}

/// Criterion 3: the gamma = 0 noise-free flow conserves
/// I = h(x) - theta ln x + h*(y) under RK4; the drift scales as dt^4 and
/// first-order Euler is at least a hundred times worse.
inline CheckResult conservation() {
    detail::Stopwatch watch;
    const auto model = logistic_model(1.0);
    const auto env = gaussian_env();
    const double theta = 0.1, lambda = 1.0, x0 = 0.5, y0 = 0.0;

    const double rk4 = conservation_check(model, env, theta, lambda, x0, y0, 1e-3, 100.0);
    const double euler =
        conservation_check(model, env, theta, lambda, x0, y0, 1e-3, 100.0, OdeScheme::euler);
    // The dt^4 scaling is measured where truncation still dominates
    // round-off; at dt=1e-3 the drift is already at the 1e-14 floor.
    const double coarse = conservation_check(model, env, theta, lambda, x0, y0, 0.02, 100.0);
    const double halved = conservation_check(model, env, theta, lambda, x0, y0, 0.01, 100.0);
    const double ratio = coarse / halved;

    const bool ok = rk4 < 1e-8 && ratio > 8.0 && ratio < 32.0 && euler >= 100.0 * rk4;
    return {3, "conservation of the integral of motion", ok && watch.seconds() < 10.0,
            "rk4 drift=" + detail::num(rk4) + ", dt-halving ratio=" + detail::num(ratio) +
                ", euler/rk4=" + detail::num(euler / rk4),
            watch.seconds()};
}

/// Criterion 4: the stochastic system at small theta tracks the logistic
/// closed form with rate r = lambda^2/gamma; the deviation grows with theta.
inline CheckResult fig1_reproduction() {
    detail::Stopwatch watch;
    auto spec = preset("fig1a");
    const double r = spec.params.rate_r();

    auto ensemble_gap = [&](double theta) {
        SimParams p = spec.params;
        p.theta = theta;
        const auto runs = ensemble(spec.model, spec.env, spec.rule, p, 10);
        for (const auto& run : runs) detail::SuiteStats::scan(run);
        double gap = 0.0;
        const auto& times = runs.front().times;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] < 5.0) continue;
            double mean = 0.0;
            for (const auto& run : runs) mean += run.xs[i];
            mean /= static_cast<double>(runs.size());
            gap = std::max(gap, std::abs(mean - logistic_closed_form(p.x0, r, spec.model.K,
                                                                     times[i])));
        }
        return gap;
    };

    const double gap_low = ensemble_gap(0.001);
    const double gap_high = ensemble_gap(0.005);
    const bool ok = gap_low < 0.05 * spec.model.K && gap_high > gap_low;
    return {4, "fig1 logistic-limit reproduction", ok && watch.seconds() < 60.0,
            "sup gap theta=0.001: " + detail::num(gap_low) +
                ", theta=0.005: " + detail::num(gap_high),
            watch.seconds()};
}

/// Criterion 5: ergodicity at theta = 0.5 -- the pooled ensemble histogram
/// matches the Gamma-form stationary density and the distance falls with the
/// horizon.
inline CheckResult fig2_ergodicity() {
    detail::Stopwatch watch;
    auto l1_at = [&](double t_max) {
        auto spec = preset("fig2");
        spec.params.t_max = t_max;
        const auto report = run_scenario(spec);
        for (const auto& run : report.runs) detail::SuiteStats::scan(run);
        return report.density->l1_distance;
    };
    const double l1_short = l1_at(1e2);
    const double l1_mid = l1_at(1e3);
    const double l1_long = l1_at(1e4);
    const bool ok = l1_long < 0.05 && l1_short > l1_mid && l1_mid > l1_long;
    return {5, "fig2 ergodic density convergence", ok && watch.seconds() < 60.0,
            "L1 @ t_max {1e2,1e3,1e4} = {" + detail::num(l1_short) + ", " + detail::num(l1_mid) +
                ", " + detail::num(l1_long) + "}",
            watch.seconds()};
}

/// Criterion 6: stationary environment moments -- E{y^2} = theta (the noise
/// amplitude consistency) and the Theta* time average vanishes within three
/// batch-means standard errors. Runs at dt = 5e-5: the explicit scheme's
/// O(gamma dt) variance bias would mask both at the plotting step size.
inline CheckResult environment_moment() {
    detail::Stopwatch watch;
    SimParams p;
    p.lambda = 1.0;
    p.gamma = 50.0;
    p.theta = 0.5;
    p.dt = 5e-5;
    p.t_max = 1e4;
    p.seed = 11;
    p.x0 = 0.01;
    p.y0 = 0.0;
    p.record_stride = 200;
    const auto model = logistic_model(1.0);
    const auto env = gaussian_env();
    const auto traj = simulate(model, env, fixed_coupling(), p);
    detail::SuiteStats::scan(traj);

    const auto ys = coevo::detail::after_burn_in(traj.ys, 0.1);
    std::vector<double> y2(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) y2[i] = ys[i] * ys[i];
    const double y2_mean = batch_time_average(y2).mean;

    const auto theta_avg = time_average_theta_env(traj, env, p.theta, p.lambda, p.gamma);
    const bool moment_ok = y2_mean > 0.95 * p.theta && y2_mean < 1.05 * p.theta;
    const bool theta_ok = std::abs(theta_avg.mean) < 3.0 * theta_avg.std_error;
    return {6, "stationary environment moment", moment_ok && theta_ok,
            "time-avg y^2=" + detail::num(y2_mean) + " (theta=" + detail::num(p.theta) +
                "), Theta* avg=" + detail::num(theta_avg.mean) +
                " vs 3se=" + detail::num(3.0 * theta_avg.std_error),
            watch.seconds()};
}

/// Criterion 7: the Heaviside-coupled asymmetric bimodal system shows a
/// single persistent upward population transition for most seeds; without
/// coupling nothing moves.
inline CheckResult fig4_transition() {
    detail::Stopwatch watch;
    const auto coupled = run_scenario(preset("fig4-coupled"));
    int good = 0;
    std::string per_seed;
    for (std::size_t i = 0; i < coupled.runs.size(); ++i) {
        detail::SuiteStats::scan(coupled.runs[i]);
        int ups = 0, downs = 0;
        for (const auto& e : coupled.transitions[i]) (e.direction > 0 ? ups : downs) += 1;
        const double final_mean = coupled.final_window_mean(i);
        const bool run_ok = ups == 1 && downs == 0 && final_mean > 1.5;
        good += run_ok ? 1 : 0;
        per_seed += "run" + std::to_string(i) + ": ups=" + std::to_string(ups) +
                    " downs=" + std::to_string(downs) + " final=" + detail::num(final_mean) + "; ";
    }

    const auto uncoupled = run_scenario(preset("fig4"));
    detail::SuiteStats::scan(uncoupled.runs[0]);
    const bool uncoupled_ok =
        uncoupled.transitions[0].empty() && uncoupled.final_window_mean(0) < 1.2;

    const bool ok = good >= 3 && uncoupled_ok;
    return {7, "fig4 coupled transition", ok && watch.seconds() < 120.0,
            per_seed + "uncoupled final=" + detail::num(uncoupled.final_window_mean(0)),
            watch.seconds()};
}

/// Criterion 8: with the symmetric bimodal environment and Heaviside
/// coupling, the population synchronizes with the environment's carrying
/// capacity level most of the time.
inline CheckResult fig3_synchronization() {
    detail::Stopwatch watch;
    const auto spec = preset("fig3-coupled");
    const auto report = run_scenario(spec);
    const auto& run = report.runs[0];
    detail::SuiteStats::scan(run);

    std::size_t hits = 0, total = 0;
    for (std::size_t i = 0; i < run.size(); ++i) {
        if (run.times[i] < 5.0) continue;
        const double k_eff = spec.rule.effective_K(run.ys[i], spec.model.K);
        hits += std::abs(run.xs[i] - k_eff) < 0.3 ? 1 : 0;
        ++total;
    }
    const double fraction = static_cast<double>(hits) / static_cast<double>(total);
    return {8, "fig3 population-environment synchronization",
            fraction > 0.7 && watch.seconds() < 60.0,
            "synchronized fraction=" + detail::num(fraction), watch.seconds()};
}

/// Criterion 9: numerics -- RK4 against the logistic closed form, bit-stable
/// CSV output for a fixed seed, and strict positivity of every recorded
/// population value the suite produced.
inline CheckResult numerics() {
    detail::Stopwatch watch;
    const auto model = logistic_model(1.0);
    const auto det = simulate_deterministic(model, 1.0, 0.01, 1e-3, 20.0);
    double rk4_err = 0.0;
    for (std::size_t i = 0; i < det.size(); ++i)
        rk4_err = std::max(rk4_err,
                           std::abs(det.xs[i] - logistic_closed_form(0.01, 1.0, 1.0, det.times[i])));

    auto spec = preset("fig1a");
    const auto run_a = simulate(spec.model, spec.env, spec.rule, spec.params);
    const auto run_b = simulate(spec.model, spec.env, spec.rule, spec.params);
    detail::SuiteStats::scan(run_a);

    const auto dir = std::filesystem::temp_directory_path() / "coevo_acceptance_numerics";
    std::filesystem::create_directories(dir);
    io::write_trajectory_csv(run_a, dir / "a.csv");
    io::write_trajectory_csv(run_b, dir / "b.csv");
    auto slurp = [](const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    const bool bytes_equal = slurp(dir / "a.csv") == slurp(dir / "b.csv") &&
                             !slurp(dir / "a.csv").empty();
    std::filesystem::remove_all(dir);

    const bool ok = rk4_err < 1e-8 && bytes_equal && detail::SuiteStats::all_positive.load();
    return {9, "numerics: RK4 accuracy, determinism, positivity", ok,
            "rk4 max err=" + detail::num(rk4_err) +
                ", identical-seed CSVs byte-equal=" + (bytes_equal ? "yes" : "no") +
                ", positive records=" + std::to_string(detail::SuiteStats::records.load()),
            watch.seconds()};
}

/// Deterministic/fast checks (analytic identities and numerics).
inline std::vector<CheckResult> run_fast() {
    return {fp_stationarity(), theta_zero_means(), conservation(), numerics()};
}

/// The full acceptance suite, criteria in order.
inline std::vector<CheckResult> run_all() {
    return {fp_stationarity(), theta_zero_means(),  conservation(),
            fig1_reproduction(), fig2_ergodicity(), environment_moment(),
            fig4_transition(),   fig3_synchronization(), numerics()};
}

}  // namespace coevo::checks
