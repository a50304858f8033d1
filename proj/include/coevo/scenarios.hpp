// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coevo/integrate.hpp"
#include "coevo/verify.hpp"

namespace coevo {

enum class ComparisonKind { none, logistic_ode, gompertz_ode };

/// A frozen, fully parameterized experiment. Presets reproduce the reference
/// figures; overriding a field produces a new spec.
struct ScenarioSpec {
    std::string name;
    GrowthModel model{};
    EnvironmentModel env{};
    CouplingRule rule{};
    SimParams params{};
    ComparisonKind comparison = ComparisonKind::none;
    std::size_t n_runs = 1;
    bool density_comparison = false;
    std::size_t density_bins = 50;
    double density_lo = 0.0;
    double density_hi = 4.0;
    double transition_low = 1.2;
    double transition_high = 1.8;
    double transition_window = 5.0;

    bool operator==(const ScenarioSpec&) const = default;
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "fig1a", "fig1b", "fig2", "fig3", "fig3-coupled", "fig4", "fig4-coupled", "gompertz"};
    return names;
}

/// Returns the named preset; throws std::invalid_argument listing the
/// available names otherwise.
inline ScenarioSpec preset(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    s.model = logistic_model(1.0);
    s.env = gaussian_env();
    s.rule = fixed_coupling();
    s.params.lambda = 1.0;
    s.params.gamma = 50.0;
    s.params.dt = 1e-3;
    s.params.seed = 1;
    s.params.x0 = 0.01;
    s.params.y0 = 0.0;
    s.params.record_stride = 1;

    if (name == "fig1a" || name == "fig1b") {
        s.params.theta = name == "fig1a" ? 0.001 : 0.005;
        s.params.t_max = 20.0;
        s.comparison = ComparisonKind::logistic_ode;
    } else if (name == "fig2") {
        s.params.theta = 0.5;
        s.params.t_max = 1e4;
        s.params.record_stride = 100;
        s.n_runs = 10;
        s.density_comparison = true;
    } else if (name == "fig3" || name == "fig3-coupled") {
        s.env = symmetric_bimodal_env(0.5);
        s.params.lambda = std::sqrt(50.0);
        s.params.theta = 0.01;
        s.params.t_max = 200.0;
        s.params.x0 = 1.0;
        if (name == "fig3-coupled") s.rule = heaviside_coupling(0.0);
    } else if (name == "fig4" || name == "fig4-coupled") {
        s.env = asymmetric_bimodal_env(4.0, 0.25);
        s.params.lambda = std::sqrt(50.0);
        s.params.theta = 0.001;
        s.params.t_max = 1e4;
        s.params.x0 = 1.0;
        s.params.record_stride = 10;
        if (name == "fig4-coupled") {
            s.rule = heaviside_coupling(0.25);
            s.n_runs = 5;
        }
    } else if (name == "gompertz") {
        s.model = gompertz_model(1.0);
        s.params.theta = 0.001;
        s.params.t_max = 20.0;
        s.comparison = ComparisonKind::gompertz_ode;
    } else {
        std::string msg = "unknown scenario '" + name + "'; available:";
        for (const auto& n : preset_names()) msg += " " + n;
        throw std::invalid_argument(msg);
    }
    return s;
}

struct TransitionEvent {
    double time = 0.0;
    int direction = 0;  // +1 upward, -1 downward

    bool operator==(const TransitionEvent&) const = default;
};

/// Means over disjoint windows of `window` time units covering the run.
inline std::vector<double> windowed_means(const Trajectory& traj, double window) {
    if (traj.size() < 2) throw std::invalid_argument("windowed means: trajectory too short");
    const double spacing = traj.times[1] - traj.times[0];
    const double duration = traj.times.back() - traj.times.front();
    if (!(window > 0.0) || window > duration)
        throw std::invalid_argument("window: must be positive and no longer than the trajectory");
    const auto per = static_cast<std::size_t>(std::llround(window / spacing));
    if (per < 1) throw std::invalid_argument("window: shorter than the record spacing");
    std::vector<double> means;
    means.reserve(traj.size() / per);
    for (std::size_t start = 0; start + per <= traj.size(); start += per) {
        double acc = 0.0;
        for (std::size_t i = start; i < start + per; ++i) acc += traj.xs[i];
        means.push_back(acc / static_cast<double>(per));
    }
    return means;
}

/// Hysteresis detector on windowed means: an upward event fires when the
/// mean crosses above `high` having last been below `low`, and symmetrically
/// downward. Brief excursions between the levels produce no events.
inline std::vector<TransitionEvent> detect_transitions(const Trajectory& traj, double low = 1.2,
                                                       double high = 1.8, double window = 5.0) {
    if (!(high > low)) throw std::invalid_argument("transition levels: require high > low");
    const auto means = windowed_means(traj, window);
    std::vector<TransitionEvent> events;
    int state = 0;  // -1 below low, +1 above high, 0 not yet committed
    for (std::size_t w = 0; w < means.size(); ++w) {
        const double t_mid = traj.times.front() + (static_cast<double>(w) + 0.5) * window;
        if (means[w] < low) {
            if (state == 1) events.push_back({t_mid, -1});
            state = -1;
        } else if (means[w] > high) {
            if (state == -1) events.push_back({t_mid, +1});
            state = 1;
        }
    }
    return events;
}

struct ScenarioReport {
    ScenarioSpec spec;
    std::vector<Trajectory> runs;
    std::optional<Trajectory> reference;
    std::optional<DensityReport> density;
    std::vector<std::vector<TransitionEvent>> transitions;  // per run
    std::vector<std::vector<double>> window_means;          // per run

    double final_window_mean(std::size_t run) const { return window_means.at(run).back(); }
};

/// Executes a scenario: the stochastic run(s), the deterministic comparison
/// when requested, a pooled density comparison when enabled, and transition
/// detection plus windowed summaries for every run.
inline ScenarioReport run_scenario(const ScenarioSpec& spec,
                                   std::optional<std::uint64_t> seed_override = std::nullopt) {
    ScenarioReport report;
    report.spec = spec;
    SimParams params = spec.params;
    if (seed_override) params.seed = *seed_override;
    report.spec.params = params;

    report.runs = ensemble(spec.model, spec.env, spec.rule, params, spec.n_runs);

    if (spec.comparison != ComparisonKind::none) {
        const GrowthModel ref_model =
            spec.comparison == ComparisonKind::logistic_ode ? logistic_model(spec.model.K)
                                                            : gompertz_model(spec.model.K);
        report.reference =
            simulate_deterministic(ref_model, params.rate_r(), params.x0, params.dt, params.t_max);
    }

    if (spec.density_comparison) {
        std::vector<double> pool;
        for (const auto& run : report.runs) {
            const auto xs = detail::after_burn_in(run.xs, 0.1);
            pool.insert(pool.end(), xs.begin(), xs.end());
        }
        report.density = compare_density(pool, spec.model, params.theta, spec.density_bins,
                                         spec.density_lo, spec.density_hi);
    }

    // Clamp the summary window on short runs so overriding a preset to a
    // small horizon still yields a (single-window) report.
    const double duration =
        report.runs.front().times.back() - report.runs.front().times.front();
    const double window = std::min(spec.transition_window, duration);
    for (const auto& run : report.runs) {
        report.transitions.push_back(
            detect_transitions(run, spec.transition_low, spec.transition_high, window));
        report.window_means.push_back(windowed_means(run, window));
    }
    return report;
}

}  // namespace coevo
