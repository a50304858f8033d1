// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "coevo/environment.hpp"
#include "coevo/growth.hpp"
#include "coevo/histogram.hpp"
#include "coevo/quadrature.hpp"
#include "coevo/theta.hpp"
#include "coevo/trajectory.hpp"

namespace coevo {

// ---------------------------------------------------------------------------
// Empirical vs. theoretical density
// ---------------------------------------------------------------------------

struct DensityReport {
    Histogram histogram;
    std::vector<double> theoretical;  // density at bin centers
    double l1_distance = 0.0;         // sum |emp - theo| * binwidth
    double ks_distance = 0.0;         // max |cumulative difference| on the grid
};

/// Normalized stationary population density exp(-h(x)/theta)/Z on a grid.
inline std::vector<double> theoretical_density(const GrowthModel& model, double theta,
                                               std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("theoretical_density: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0))
            throw std::invalid_argument("theoretical_density: grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("theoretical_density: grid must be strictly increasing");
    }
    const double log_z = log_normalization(model, theta);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = std::exp(-model.h(grid[i]) / theta - log_z);
    return out;
}

inline double l1_distance(const Histogram& hist, std::span<const double> theoretical) {
    if (theoretical.size() != hist.densities.size())
        throw std::invalid_argument("l1_distance: grid size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < theoretical.size(); ++i)
        acc += std::abs(hist.densities[i] - theoretical[i]) * (hist.edges[i + 1] - hist.edges[i]);
    return acc;
}

inline double ks_distance(const Histogram& hist, std::span<const double> theoretical) {
    if (theoretical.size() != hist.densities.size())
        throw std::invalid_argument("ks_distance: grid size mismatch");
    double cum_emp = 0.0, cum_theo = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < theoretical.size(); ++i) {
        const double w = hist.edges[i + 1] - hist.edges[i];
        cum_emp += hist.densities[i] * w;
        cum_theo += theoretical[i] * w;
        worst = std::max(worst, std::abs(cum_emp - cum_theo));
    }
    return worst;
}

/// Compares post-burn-in samples against the stationary density.
inline DensityReport compare_density(std::span<const double> samples, const GrowthModel& model,
                                     double theta, std::size_t n_bins, double lo, double hi) {
    DensityReport report;
    report.histogram = make_histogram(samples, n_bins, lo, hi);
    report.theoretical = theoretical_density(model, theta, report.histogram.centers());
    report.l1_distance = l1_distance(report.histogram, report.theoretical);
    report.ks_distance = ks_distance(report.histogram, report.theoretical);
    return report;
}

inline DensityReport compare_density(const Trajectory& traj, const GrowthModel& model,
                                     double theta, std::size_t n_bins, double lo, double hi,
                                     double burn_in_fraction = 0.1) {
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw std::invalid_argument("burn-in fraction must lie in [0, 1)");
    const auto skip = static_cast<std::size_t>(burn_in_fraction * static_cast<double>(traj.size()));
    return compare_density(std::span<const double>(traj.xs).subspan(skip), model, theta,
                           n_bins, lo, hi);
}

// ---------------------------------------------------------------------------
// Ergodic time averages
// ---------------------------------------------------------------------------

struct TimeAverage {
    double mean = 0.0;
    double std_error = 0.0;  // batch-means standard error
};

/// Mean with a batch-means standard error over contiguous batches.
inline TimeAverage batch_time_average(std::span<const double> values, std::size_t n_batches = 20) {
    if (values.size() < 1000)
        throw std::invalid_argument("time average: need at least 1000 records");
    if (n_batches < 2) throw std::invalid_argument("time average: need at least 2 batches");
    const std::size_t batch = values.size() / n_batches;
    std::vector<double> means(n_batches, 0.0);
    for (std::size_t b = 0; b < n_batches; ++b) {
        double acc = 0.0;
        for (std::size_t i = b * batch; i < (b + 1) * batch; ++i) acc += values[i];
        means[b] = acc / static_cast<double>(batch);
    }
    double grand = 0.0;
    for (double m : means) grand += m;
    grand /= static_cast<double>(n_batches);
    double var = 0.0;
    for (double m : means) var += (m - grand) * (m - grand);
    var /= static_cast<double>(n_batches - 1);
    return {grand, std::sqrt(var / static_cast<double>(n_batches))};
}

namespace detail {
inline std::span<const double> after_burn_in(const std::vector<double>& v, double fraction) {
    const auto skip = static_cast<std::size_t>(fraction * static_cast<double>(v.size()));
    return std::span<const double>(v).subspan(skip);
}
}  // namespace detail

/// Running time average of Theta*(y(t), theta) with batch-means error.
inline TimeAverage time_average_theta_env(const Trajectory& traj, const EnvironmentModel& env,
                                          double theta, double lambda, double gamma,
                                          double burn_in_fraction = 0.1) {
    const auto ys = detail::after_burn_in(traj.ys, burn_in_fraction);
    std::vector<double> values(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i)
        values[i] = theta_env_general(env, ys[i], theta, lambda, gamma);
    return batch_time_average(values);
}

/// Same for the population expression Theta(x, theta) = x h'(x) - theta.
inline TimeAverage time_average_theta_population(const Trajectory& traj, const GrowthModel& model,
                                                 double theta, double burn_in_fraction = 0.1) {
    const auto xs = detail::after_burn_in(traj.xs, burn_in_fraction);
    std::vector<double> values(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) values[i] = theta_population(model, xs[i], theta);
    return batch_time_average(values);
}

// ---------------------------------------------------------------------------
// Fokker--Planck stationarity residual
// ---------------------------------------------------------------------------

/// A candidate stationary density with its partial derivatives. The residual
/// evaluation never cancels terms symbolically, so a density that is *not*
/// stationary produces a residual of the size of its defect.
struct DensityPartials {
    std::function<double(double, double)> sigma;
    std::function<double(double, double)> d_x;
    std::function<double(double, double)> d_y;
    std::function<double(double, double)> d_yy;
};

/// Analytic partials of the invariant density exp(-[h(x) + h*(y)]/theta).
inline DensityPartials invariant_density_partials(const GrowthModel& model,
                                                  const EnvironmentModel& env, double theta) {
    auto sigma = [model, env, theta](double x, double y) {
        return std::exp(-(model.h(x) + env.h_star(y)) / theta);
    };
    return {
        sigma,
        [model, theta, sigma](double x, double y) { return -model.h_prime(x) / theta * sigma(x, y); },
        [env, theta, sigma](double x, double y) { return -env.h_star_prime(y) / theta * sigma(x, y); },
        [env, theta, sigma](double x, double y) {
            const double p = env.h_star_prime(y);
            return (p * p / (theta * theta) - env.h_star_second(y) / theta) * sigma(x, y);
        },
    };
}

/// Negative control: exp(-[h(x) + eps x]/theta) x exp(-h*(y)/theta) is not
/// stationary for eps != 0 and must leave a visible residual.
inline DensityPartials perturbed_density_partials(const GrowthModel& model,
                                                  const EnvironmentModel& env, double theta,
                                                  double eps) {
    auto sigma = [model, env, theta, eps](double x, double y) {
        return std::exp(-(model.h(x) + eps * x + env.h_star(y)) / theta);
    };
    return {
        sigma,
        [model, theta, eps, sigma](double x, double y) {
            return -(model.h_prime(x) + eps) / theta * sigma(x, y);
        },
        [env, theta, sigma](double x, double y) { return -env.h_star_prime(y) / theta * sigma(x, y); },
        [env, theta, sigma](double x, double y) {
            const double p = env.h_star_prime(y);
            return (p * p / (theta * theta) - env.h_star_second(y) / theta) * sigma(x, y);
        },
    };
}

enum class DerivativeMode { analytic, central_fd };

/// Max |F* sigma| over the grid, relative to lambda * max |sigma|, where F*
/// is the Fokker--Planck operator of the coevolution dynamics:
///   F* s = -d/dx[lambda x h*'(y) s]
///          - d/dy[(-lambda(x h'(x) - theta) - gamma h*'(y)) s]
///          + gamma theta d2/dy2 s.
/// In central_fd mode the partials of sigma are replaced by second-order
/// central differences with the given steps (cross-check; converges at
/// order 2).
inline double fp_residual(const GrowthModel& model, const EnvironmentModel& env, double theta,
                          double lambda, double gamma, std::span<const double> x_grid,
                          std::span<const double> y_grid, const DensityPartials& dens,
                          DerivativeMode mode = DerivativeMode::analytic,
                          double fd_step_x = 1e-5, double fd_step_y = 1e-5) {
    if (x_grid.empty() || y_grid.empty())
        throw std::invalid_argument("fp_residual: empty grid");
    double worst = 0.0;
    double sigma_max = 0.0;
    for (const double x : x_grid) {
        if (!(x > 0.0)) throw std::invalid_argument("fp_residual: x grid must be positive");
        for (const double y : y_grid) {
            const double s = dens.sigma(x, y);
            double sx, sy, syy;
            if (mode == DerivativeMode::analytic) {
                sx = dens.d_x(x, y);
                sy = dens.d_y(x, y);
                syy = dens.d_yy(x, y);
            } else {
                sx = (dens.sigma(x + fd_step_x, y) - dens.sigma(x - fd_step_x, y)) / (2.0 * fd_step_x);
                sy = (dens.sigma(x, y + fd_step_y) - dens.sigma(x, y - fd_step_y)) / (2.0 * fd_step_y);
                syy = (dens.sigma(x, y + fd_step_y) - 2.0 * s + dens.sigma(x, y - fd_step_y)) /
                      (fd_step_y * fd_step_y);
            }
            const double hsp = env.h_star_prime(y);
            const double drift_y = -lambda * (model.x_h_prime(x) - theta) - gamma * hsp;
            const double residual = -lambda * hsp * (s + x * sx)            // -d/dx[lambda x h*' s]
                                    + gamma * env.h_star_second(y) * s      // -d/dy of the drift factor
                                    - drift_y * sy                          // -drift_y d/dy s
                                    + gamma * theta * syy;                  // diffusion
            worst = std::max(worst, std::abs(residual));
            sigma_max = std::max(sigma_max, std::abs(s));
        }
    }
    if (sigma_max == 0.0)
        throw std::invalid_argument("fp_residual: density vanishes on the whole grid");
    return worst / (lambda * sigma_max);
}

/// Residual of the model's own invariant density (the stationarity identity).
inline double fp_residual(const GrowthModel& model, const EnvironmentModel& env, double theta,
                          double lambda, double gamma, std::span<const double> x_grid,
                          std::span<const double> y_grid,
                          DerivativeMode mode = DerivativeMode::analytic,
                          double fd_step_x = 1e-5, double fd_step_y = 1e-5) {
    return fp_residual(model, env, theta, lambda, gamma, x_grid, y_grid,
                       invariant_density_partials(model, env, theta), mode, fd_step_x, fd_step_y);
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("uniform_grid: bad arguments");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

// ---------------------------------------------------------------------------
// Conservation of the gamma = 0 integral of motion
// ---------------------------------------------------------------------------

enum class OdeScheme { rk4, euler };

/// Integrates the noise-free gamma = 0 flow
///   dx/dt = lambda x h*'(y),  dy/dt = -lambda (x h'(x) - theta)
/// and returns the worst drift of I = h(x) - theta ln x + h*(y) over the run.
inline double conservation_check(const GrowthModel& model, const EnvironmentModel& env,
                                 double theta, double lambda, double x0, double y0, double dt,
                                 double t_max, OdeScheme scheme = OdeScheme::rk4) {
    if (!(x0 > 0.0)) throw std::domain_error("x0: initial population must be > 0");
    const auto fx = [&](double x, double y) { return lambda * x * env.h_star_prime(y); };
    const auto fy = [&](double x, double /*y*/) {
        return -lambda * (model.x_h_prime(x) - theta);
    };
    const auto invariant = [&](double x, double y) {
        return model.h(x) - theta * std::log(x) + env.h_star(y);
    };

    const double steps_exact = std::ceil(t_max / dt - 1e-9);
    const std::uint64_t n_steps = steps_exact < 1.0 ? 1 : static_cast<std::uint64_t>(steps_exact);
    double x = x0, y = y0;
    const double i0 = invariant(x, y);
    double worst = 0.0;
    for (std::uint64_t step = 0; step < n_steps; ++step) {
        if (scheme == OdeScheme::rk4) {
            const double k1x = fx(x, y), k1y = fy(x, y);
            const double x2 = x + 0.5 * dt * k1x, y2 = y + 0.5 * dt * k1y;
            const double k2x = fx(x2, y2), k2y = fy(x2, y2);
            const double x3 = x + 0.5 * dt * k2x, y3 = y + 0.5 * dt * k2y;
            const double k3x = fx(x3, y3), k3y = fy(x3, y3);
            const double x4 = x + dt * k3x, y4 = y + dt * k3y;
            const double k4x = fx(x4, y4), k4y = fy(x4, y4);
            x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        } else {
            const double dx = fx(x, y), dy = fy(x, y);
            x += dt * dx;
            y += dt * dy;
        }
        worst = std::max(worst, std::abs(invariant(x, y) - i0));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Zero-mean quadrature oracle
// ---------------------------------------------------------------------------

/// Quadrature value of E_theta{expr(x)} under the population density;
/// the acceptance oracle for population temperature expressions.
template <std::invocable<double> F>
double zero_mean_quadrature(F expr, const GrowthModel& model, double theta) {
    return expectation_population(expr, model, theta);
}

/// Quadrature value of E_theta{expr(y)} under the environment density.
template <std::invocable<double> F>
double zero_mean_quadrature(F expr, const EnvironmentModel& env, double theta) {
    return expectation_environment(expr, env, theta);
}

}  // namespace coevo
