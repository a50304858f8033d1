// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string_view>

namespace coevo {

enum class EnvKind { gaussian, symmetric_bimodal, asymmetric_bimodal };

/// Environment model described by its potential h*(y) on the real line.
/// The stationary environment density is proportional to exp(-h*(y)/theta).
///
/// gaussian            h*(y) = y^2/2
/// symmetric_bimodal   h*'(y) = y (y + sqrt(m)) (y - sqrt(m)),  wells at +-sqrt(m)
/// asymmetric_bimodal  h*'(y) = D y (y - a) (y - 1),            wells at 0 and 1
///
/// Bimodal antiderivatives use integration constant 0.
struct EnvironmentModel {
    EnvKind kind = EnvKind::gaussian;
    double m = 0.0;  // symmetric_bimodal only
    double D = 0.0;  // asymmetric_bimodal only
    double a = 0.0;  // asymmetric_bimodal only

    double h_star(double y) const {
        switch (kind) {
            case EnvKind::gaussian: return 0.5 * y * y;
            case EnvKind::symmetric_bimodal:
                return 0.25 * y * y * y * y - 0.5 * m * y * y;
            case EnvKind::asymmetric_bimodal:
                return D * (0.25 * y * y * y * y - (1.0 + a) * y * y * y / 3.0 + 0.5 * a * y * y);
        }
        return 0.0;
    }

    double h_star_prime(double y) const {
        switch (kind) {
            case EnvKind::gaussian: return y;
            case EnvKind::symmetric_bimodal: return y * (y * y - m);
            case EnvKind::asymmetric_bimodal: return D * y * (y - a) * (y - 1.0);
        }
        return 0.0;
    }

    double h_star_second(double y) const {
        switch (kind) {
            case EnvKind::gaussian: return 1.0;
            case EnvKind::symmetric_bimodal: return 3.0 * y * y - m;
            case EnvKind::asymmetric_bimodal:
                return D * (3.0 * y * y - 2.0 * (1.0 + a) * y + a);
        }
        return 0.0;
    }

    std::string_view name() const {
        switch (kind) {
            case EnvKind::gaussian: return "gaussian";
            case EnvKind::symmetric_bimodal: return "symmetric-bimodal";
            case EnvKind::asymmetric_bimodal: return "asymmetric-bimodal";
        }
        return "";
    }

    bool operator==(const EnvironmentModel&) const = default;
};

inline EnvironmentModel gaussian_env() { return {EnvKind::gaussian, 0.0, 0.0, 0.0}; }

inline EnvironmentModel symmetric_bimodal_env(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("m: bimodal well parameter must be > 0");
    return {EnvKind::symmetric_bimodal, m, 0.0, 0.0};
}

inline EnvironmentModel asymmetric_bimodal_env(double D, double a) {
    if (!(D > 0.0)) throw std::invalid_argument("D: bimodal scale must be > 0");
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("a: detuning must lie in (0,1)");
    return {EnvKind::asymmetric_bimodal, 0.0, D, a};
}

}  // namespace coevo
