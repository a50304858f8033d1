// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>

#include "coevo/environment.hpp"
#include "coevo/growth.hpp"

namespace coevo {

class QuadratureError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <std::invocable<double> F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (std::abs(err) <= tol || (b - a) < 1e-14 * (std::abs(a) + std::abs(b)))
        return left + right + err;
    if (depth <= 0)
        throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) +
                              ", " + std::to_string(b) + "]");
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson integration of a smooth integrand over [a, b].
/// Absolute tolerance; throws QuadratureError when bisection bottoms out.
template <std::invocable<double> F>
double integrate_adaptive(F f, double a, double b, double abs_tol, int max_depth = 48) {
    if (!(b > a)) throw std::invalid_argument("integrate_adaptive: requires b > a");
    // Seed with a few panels so a zero of the integrand at the midpoint
    // cannot fake early convergence.
    const int seed_panels = 8;
    const double w = (b - a) / seed_panels;
    double total = 0.0;
    for (int i = 0; i < seed_panels; ++i) {
        const double pa = a + i * w;
        const double pb = pa + w;
        const double fa = f(pa);
        const double fm = f(0.5 * (pa + pb));
        const double fb = f(pb);
        const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::adaptive_simpson_rec(f, pa, pb, fa, fm, fb, whole,
                                              abs_tol / seed_panels, max_depth);
    }
    return total;
}

namespace detail {

struct SupportWindow {
    double lo;
    double hi;
    double g_max;  // max of the log-integrand over the window
};

/// Locates the region where exp(g) carries mass: expands around `center`
/// until g at both ends has fallen `drop` below the running maximum.
template <std::invocable<double> G>
SupportWindow find_support(G& g, double center, double halfwidth, double drop = 70.0) {
    const int scan_points = 4096;
    double lo = center - halfwidth;
    double hi = center + halfwidth;
    for (int expansion = 0; expansion < 60; ++expansion) {
        double g_max = -std::numeric_limits<double>::infinity();
        const double step = (hi - lo) / scan_points;
        for (int i = 0; i <= scan_points; ++i) {
            const double v = g(lo + i * step);
            if (std::isfinite(v) && v > g_max) g_max = v;
        }
        if (!std::isfinite(g_max))
            throw QuadratureError("support search: log-integrand is nowhere finite");
        const bool lo_ok = g(lo) < g_max - drop;
        const bool hi_ok = g(hi) < g_max - drop;
        if (lo_ok && hi_ok) {
            // Shrink back toward the mass so the quadrature window is tight.
            double lo_t = lo;
            double hi_t = hi;
            while (g(lo_t + step) < g_max - drop && lo_t + 2.0 * step < hi_t) lo_t += step;
            while (g(hi_t - step) < g_max - drop && hi_t - 2.0 * step > lo_t) hi_t -= step;
            return {lo_t, hi_t, g_max};
        }
        if (!lo_ok) lo -= (hi - lo);
        if (!hi_ok) hi += (hi - lo);
    }
    throw QuadratureError("support search: integrand does not decay (non-coercive potential?)");
}

}  // namespace detail

/// log of Z = integral over (0, inf) of exp(-h(x)/theta) dx, computed in
/// log-x coordinates where the integrand decays on both sides.
inline double log_normalization(const GrowthModel& model, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("theta: normalization requires theta > 0");
    auto g = [&](double u) { return -model.h(std::exp(u)) / theta + u; };
    const auto win = detail::find_support(g, std::log(model.K), 40.0);
    const double scaled = integrate_adaptive(
        [&](double u) { return std::exp(g(u) - win.g_max); }, win.lo, win.hi, 1e-13);
    return win.g_max + std::log(scaled);
}

/// E_theta{ f(x) } under the normalized population density exp(-h/theta)/Z.
template <std::invocable<double> F>
double expectation_population(F f, const GrowthModel& model, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("theta: expectation requires theta > 0");
    auto g = [&](double u) { return -model.h(std::exp(u)) / theta + u; };
    const auto win = detail::find_support(g, std::log(model.K), 40.0);
    const double z = integrate_adaptive(
        [&](double u) { return std::exp(g(u) - win.g_max); }, win.lo, win.hi, 1e-13);
    const double num = integrate_adaptive(
        [&](double u) { return f(std::exp(u)) * std::exp(g(u) - win.g_max); }, win.lo, win.hi,
        1e-13 * std::max(1.0, z));
    return num / z;
}

/// E_theta{ f(y) } under the normalized environment density exp(-h*/theta)/Z*.
template <std::invocable<double> F>
double expectation_environment(F f, const EnvironmentModel& env, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("theta: expectation requires theta > 0");
    auto g = [&](double y) { return -env.h_star(y) / theta; };
    const double hw = 20.0 * std::max(1.0, std::sqrt(theta));
    const auto win = detail::find_support(g, 0.0, hw);
    const double z = integrate_adaptive(
        [&](double y) { return std::exp(g(y) - win.g_max); }, win.lo, win.hi, 1e-13);
    const double num = integrate_adaptive(
        [&](double y) { return f(y) * std::exp(g(y) - win.g_max); }, win.lo, win.hi,
        1e-13 * std::max(1.0, z));
    return num / z;
}

}  // namespace coevo
