// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "coevo/coupling.hpp"
#include "coevo/environment.hpp"
#include "coevo/growth.hpp"
#include "coevo/params.hpp"
#include "coevo/rng.hpp"
#include "coevo/trajectory.hpp"

namespace coevo {

/// Thrown when the state leaves the finite range mid-run.
class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, std::uint64_t step)
        : std::runtime_error(what + " at step " + std::to_string(step) +
                             "; a smaller dt usually fixes this"),
          step_index(step) {}
    std::uint64_t step_index;
};

/// Deterministic part of the coevolution vector field,
///   dx/dt = lambda x h*'(y)
///   dy/dt = -lambda [ x h'(x) - theta ] - gamma h*'(y),
/// with the carrying capacity replaced by effective_K(y) while a coupling
/// rule is active. log_x_rate = lambda h*'(y) is d(ln x)/dt, kept separate
/// for the exact log-space population update.
struct Drift {
    double dx_dt;
    double dy_dt;
    double log_x_rate;
};

inline Drift drift(const GrowthModel& model, const EnvironmentModel& env,
                   const CouplingRule& rule, double x, double y, const SimParams& p) {
    if (!(x > 0.0)) throw std::domain_error("drift: population density x must be > 0");
    const double hsp = env.h_star_prime(y);
    GrowthModel eff = model;
    eff.K = rule.effective_K(y, model.K);
    const double dy = -p.lambda * (eff.x_h_prime(x) - p.theta) - p.gamma * hsp;
    const double rate = p.lambda * hsp;
    return {rate * x, dy, rate};
}

/// One Euler--Maruyama step. The environment update is explicit with additive
/// noise of amplitude sqrt(2 gamma theta dt); the population update is the
/// exact exponential map of its (noise-free) drift over the step, so x stays
/// strictly positive for any input.
inline std::pair<double, double> em_step(double x, double y, const Drift& d,
                                         const SimParams& p, double noise_sample) {
    const double amp = std::sqrt(2.0 * p.gamma * p.theta * p.dt);
    const double x_next = x * std::exp(d.log_x_rate * p.dt);
    const double y_next = y + d.dy_dt * p.dt + amp * noise_sample;
    return {x_next, y_next};
}

namespace detail {
inline std::uint64_t step_count(double t_max, double dt) {
    const double n = std::ceil(t_max / dt - 1e-9);
    return n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
}
}  // namespace detail

/// Integrates the coupled stochastic system over [0, t_max], recording every
/// record_stride-th step (plus the initial state). Bit-reproducible for a
/// fixed (model, env, rule, params) including the seed.
inline Trajectory simulate(const GrowthModel& model, const EnvironmentModel& env,
                           const CouplingRule& rule, const SimParams& params,
                           std::uint64_t stream = 0) {
    validate(params);
    const std::uint64_t n_steps = detail::step_count(params.t_max, params.dt);

    Trajectory traj;
    traj.params = params;
    traj.model = model;
    traj.env = env;
    traj.rule = rule;
    const std::size_t n_rec = static_cast<std::size_t>(n_steps / params.record_stride) + 1;
    traj.times.reserve(n_rec);
    traj.xs.reserve(n_rec);
    traj.ys.reserve(n_rec);

    Rng rng(params.seed, stream);
    double x = params.x0;
    double y = params.y0;
    traj.times.push_back(0.0);
    traj.xs.push_back(x);
    traj.ys.push_back(y);

    const double amp = std::sqrt(2.0 * params.gamma * params.theta * params.dt);
    for (std::uint64_t step = 1; step <= n_steps; ++step) {
        const double hsp = env.h_star_prime(y);
        const double K_eff = rule.effective_K(y, model.K);
        const double xhp = model.kind == GrowthKind::logistic ? x / K_eff - 1.0
                                                              : std::log(x / K_eff);
        const double dy = -params.lambda * (xhp - params.theta) - params.gamma * hsp;
        x *= std::exp(params.lambda * hsp * params.dt);
        y += dy * params.dt + amp * rng.normal();
        if (!std::isfinite(x) || !std::isfinite(y))
            throw SimulationError("simulate: state became non-finite", step);
        if (step % params.record_stride == 0) {
            traj.times.push_back(static_cast<double>(step) * params.dt);
            traj.xs.push_back(x);
            traj.ys.push_back(y);
        }
    }
    return traj;
}

/// Independent runs with streams 0..n_runs-1 derived from the same seed,
/// executed in parallel and returned in run order.
inline std::vector<Trajectory> ensemble(const GrowthModel& model, const EnvironmentModel& env,
                                        const CouplingRule& rule, const SimParams& params,
                                        std::size_t n_runs) {
    std::vector<std::future<Trajectory>> futures;
    futures.reserve(n_runs);
    for (std::size_t run = 0; run < n_runs; ++run)
        futures.push_back(std::async(std::launch::async, [&, run] {
            return simulate(model, env, rule, params, run);
        }));
    std::vector<Trajectory> runs;
    runs.reserve(n_runs);
    for (auto& f : futures) runs.push_back(f.get());
    return runs;
}

/// Closed-form solution of the logistic equation dx/dt = r x (1 - x/K).
inline double logistic_closed_form(double x0, double r, double K, double t) {
    if (!(x0 > 0.0)) throw std::domain_error("x0: initial population must be > 0");
    const double e = std::exp(r * t);
    return K * x0 * e / (K + x0 * (e - 1.0));
}

/// Reference deterministic growth curve, fourth-order Runge--Kutta:
/// dx/dt = r x (1 - x/K) (logistic) or dx/dt = -r x ln(x/K) (Gompertz).
inline Trajectory simulate_deterministic(const GrowthModel& model, double r, double x0,
                                         double dt, double t_max) {
    if (!(x0 > 0.0)) throw std::domain_error("x0: initial population must be > 0");
    if (!(r > 0.0)) throw std::domain_error("r: growth rate must be > 0");
    if (!(dt > 0.0 && t_max > 0.0)) throw std::domain_error("dt/t-max must be > 0");

    auto f = [&](double x) { return -r * x * model.x_h_prime(x); };

    const std::uint64_t n_steps = detail::step_count(t_max, dt);
    Trajectory traj;
    traj.model = model;
    traj.label = model.kind == GrowthKind::logistic ? "logistic-reference" : "gompertz-reference";
    traj.params.dt = dt;
    traj.params.t_max = t_max;
    traj.params.x0 = x0;
    traj.times.reserve(n_steps + 1);
    traj.xs.reserve(n_steps + 1);
    traj.ys.assign(n_steps + 1, 0.0);

    double x = x0;
    traj.times.push_back(0.0);
    traj.xs.push_back(x);
    for (std::uint64_t step = 1; step <= n_steps; ++step) {
        const double k1 = f(x);
        const double k2 = f(x + 0.5 * dt * k1);
        const double k3 = f(x + 0.5 * dt * k2);
        const double k4 = f(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.times.push_back(static_cast<double>(step) * dt);
        traj.xs.push_back(x);
    }
    return traj;
}

}  // namespace coevo
