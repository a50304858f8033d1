// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <concepts>
#include <stdexcept>

#include "coevo/environment.hpp"
#include "coevo/growth.hpp"

namespace coevo {

namespace detail {
inline void require_theta_nonneg(double theta) {
    if (!(theta >= 0.0)) throw std::domain_error("theta: ecological temperature must be >= 0");
}
}  // namespace detail

/// Population temperature expression Theta(x, theta) = x h'(x) - theta.
/// Has zero mean under the stationary population density for every theta > 0.
inline double theta_population(const GrowthModel& model, double x, double theta) {
    detail::require_theta_nonneg(theta);
    return model.x_h_prime(x) - theta;
}

/// Environment temperature expression for a general h*:
///   Theta*(y, theta) = lambda theta h*'(y) - gamma [ (h*'(y))^2 - theta h*''(y) ].
/// Reduces to lambda theta y - gamma (y^2 - theta) for the Gaussian environment.
inline double theta_env_general(const EnvironmentModel& env, double y, double theta,
                                double lambda, double gamma) {
    detail::require_theta_nonneg(theta);
    const double p = env.h_star_prime(y);
    return lambda * theta * p - gamma * (p * p - theta * env.h_star_second(y));
}

/// Chebyshev--Hermite polynomial He_n(y; theta) by the three-term recurrence
/// He_0 = 1, He_1 = y, He_{n+1} = y He_n - n theta He_{n-1}.
/// Zero mean under the centered Gaussian with variance theta for n >= 1.
inline double hermite(int n, double y, double theta) {
    if (n < 0) throw std::invalid_argument("hermite: order n must be >= 0");
    if (!(theta > 0.0)) throw std::domain_error("theta: ecological temperature must be > 0");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = y;
    for (int k = 1; k < n; ++k) {
        const double next = y * cur - static_cast<double>(k) * theta * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Rodrigues-type population expression Theta_1(x, theta) = phi(x) h'(x) - phi'(x) theta
/// for a user-supplied phi with its exact derivative. phi(x) = x recovers
/// theta_population.
template <std::invocable<double> F, std::invocable<double> G>
double theta_rodrigues_population(const GrowthModel& model, F&& phi, G&& dphi,
                                  double x, double theta) {
    detail::require_theta_nonneg(theta);
    return phi(x) * model.h_prime(x) - dphi(x) * theta;
}

}  // namespace coevo
