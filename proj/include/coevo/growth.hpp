// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string_view>

namespace coevo {

enum class GrowthKind { logistic, gompertz };

/// Population growth model described by its potential ("h-function").
/// The stationary population density is proportional to exp(-h(x)/theta);
/// h is coercive on (0, inf) and attains its minimum at the carrying
/// capacity K.
struct GrowthModel {
    GrowthKind kind = GrowthKind::logistic;
    double K = 1.0;

    /// h(x): logistic x/K - ln x, Gompertz (1/2) ln(x/K)^2.
    double h(double x) const {
        require_positive(x);
        switch (kind) {
            case GrowthKind::logistic: return x / K - std::log(x);
            case GrowthKind::gompertz: {
                const double u = std::log(x / K);
                return 0.5 * u * u;
            }
        }
        return 0.0;  // unreachable
    }

    /// dh/dx, exact analytic form.
    double h_prime(double x) const {
        require_positive(x);
        switch (kind) {
            case GrowthKind::logistic: return 1.0 / K - 1.0 / x;
            case GrowthKind::gompertz: return std::log(x / K) / x;
        }
        return 0.0;
    }

    /// x * h'(x), evaluated without the x/x round trip.
    double x_h_prime(double x) const {
        require_positive(x);
        switch (kind) {
            case GrowthKind::logistic: return x / K - 1.0;
            case GrowthKind::gompertz: return std::log(x / K);
        }
        return 0.0;
    }

    std::string_view name() const {
        return kind == GrowthKind::logistic ? "logistic" : "gompertz";
    }

    bool operator==(const GrowthModel&) const = default;

private:
    static void require_positive(double x) {
        if (!(x > 0.0)) throw std::domain_error("growth model: population density x must be > 0");
    }
};

inline GrowthModel logistic_model(double K) {
    if (!(K > 0.0)) throw std::invalid_argument("K: carrying capacity must be > 0");
    return {GrowthKind::logistic, K};
}

inline GrowthModel gompertz_model(double K) {
    if (!(K > 0.0)) throw std::invalid_argument("K: carrying capacity must be > 0");
    return {GrowthKind::gompertz, K};
}

}  // namespace coevo
