// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string_view>

namespace coevo {

enum class CouplingKind { fixed, heaviside_shift };

/// Functional population--environment relationship K[y].
///
/// fixed            carrying capacity stays at the model's K.
/// heaviside_shift  K[y] = base + increment * H(y - threshold), H(0) = 1
///                  (right-continuous step).
struct CouplingRule {
    CouplingKind kind = CouplingKind::fixed;
    double threshold = 0.0;
    double base = 1.0;
    double increment = 1.0;

    /// Effective carrying capacity; `model_K` is returned unchanged for
    /// the fixed rule.
    double effective_K(double y, double model_K) const {
        if (kind == CouplingKind::fixed) return model_K;
        return y >= threshold ? base + increment : base;
    }

    bool active() const { return kind == CouplingKind::heaviside_shift; }

    std::string_view name() const {
        return kind == CouplingKind::fixed ? "fixed" : "heaviside-shift";
    }

    bool operator==(const CouplingRule&) const = default;
};

inline CouplingRule fixed_coupling() { return {}; }

inline CouplingRule heaviside_coupling(double threshold, double base = 1.0, double increment = 1.0) {
    if (!(base > 0.0)) throw std::invalid_argument("base: carrying capacity level must be > 0");
    if (!(base + increment > 0.0))
        throw std::invalid_argument("increment: shifted carrying capacity must stay > 0");
    return {CouplingKind::heaviside_shift, threshold, base, increment};
}

}  // namespace coevo
