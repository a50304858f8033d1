// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace coevo {

/// Parameters of a stochastic coevolution run. `lambda` and `gamma` set the
/// two time scales; the derived growth rate of the fast-relaxation limit is
/// r = lambda^2 / gamma.
struct SimParams {
    double lambda = 1.0;       // coupling rate, > 0
    double gamma = 50.0;       // relaxation rate, >= 0
    double theta = 0.5;        // ecological temperature, >= 0
    double dt = 1e-3;          // time step, > 0; dt * gamma < 0.5
    double t_max = 100.0;      // horizon, > 0
    std::uint64_t seed = 1;    // rng seed
    double x0 = 1.0;           // initial population, > 0
    double y0 = 0.0;           // initial environment variable
    std::uint64_t record_stride = 1;  // record every k-th step, >= 1

    double rate_r() const {
        if (!(gamma > 0.0)) throw std::domain_error("gamma: rate r = lambda^2/gamma requires gamma > 0");
        return lambda * lambda / gamma;
    }

    bool operator==(const SimParams&) const = default;
};

/// Throws std::invalid_argument naming the offending field.
inline void validate(const SimParams& p) {
    auto fail = [](const std::string& field, const std::string& what) {
        throw std::invalid_argument(field + ": " + what);
    };
    if (!(p.lambda > 0.0)) fail("lambda", "coupling rate must be > 0");
    if (!(p.gamma >= 0.0)) fail("gamma", "relaxation rate must be >= 0");
    if (!(p.theta >= 0.0)) fail("theta", "ecological temperature must be >= 0");
    if (!(p.dt > 0.0)) fail("dt", "time step must be > 0");
    if (!(p.t_max > 0.0)) fail("t-max", "horizon must be > 0");
    if (!(p.x0 > 0.0)) fail("x0", "initial population must be > 0");
    if (p.record_stride < 1) fail("record-stride", "must be a positive integer");
    // Explicit stepping of the y relaxation is only stable well below 2/gamma;
    // the reference parameter pairing (gamma=50, dt=1e-3) sits at 0.05.
    if (!(p.dt * p.gamma < 0.5)) fail("dt", "dt * gamma must be < 0.5 for stable explicit stepping");
}

}  // namespace coevo
