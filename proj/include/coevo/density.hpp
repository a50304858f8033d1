// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>

#include "coevo/environment.hpp"
#include "coevo/growth.hpp"

namespace coevo {

/// Unnormalized log of the joint stationary density,
///   log sigma+(x, y) = -[ h(x) + h*(y) ] / theta.
/// Exposed in log space; normalization is done by quadrature where needed.
inline double invariant_density_log(const GrowthModel& model, const EnvironmentModel& env,
                                    double x, double y, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("theta: density evaluation requires theta > 0");
    return -(model.h(x) + env.h_star(y)) / theta;
}

/// Conserved quantity of the gamma = 0 noise-free flow:
///   I = h(x) - theta ln x + h*(y).
inline double integral_of_motion(const GrowthModel& model, const EnvironmentModel& env,
                                 double x, double y, double theta) {
    if (!(theta >= 0.0)) throw std::domain_error("theta: ecological temperature must be >= 0");
    return model.h(x) - theta * std::log(x) + env.h_star(y);
}

}  // namespace coevo
