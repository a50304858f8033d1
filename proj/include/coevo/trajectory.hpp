// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "coevo/coupling.hpp"
#include "coevo/environment.hpp"
#include "coevo/growth.hpp"
#include "coevo/params.hpp"

namespace coevo {

/// Recorded time series of one run, with enough metadata to reproduce it.
/// All xs are strictly positive; times are strictly increasing with spacing
/// dt * record_stride.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> xs;
    std::vector<double> ys;
    SimParams params{};
    GrowthModel model{};
    EnvironmentModel env{};
    CouplingRule rule{};
    std::string label = "stochastic";

    std::size_t size() const { return times.size(); }
};

}  // namespace coevo
