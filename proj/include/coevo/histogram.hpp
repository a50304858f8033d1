// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace coevo {

/// Density-normalized histogram over uniform bins: the bin integrals sum to
/// one. Samples outside [lo, hi) are excluded from the normalization but
/// counted in n_below / n_above.
struct Histogram {
    std::vector<double> edges;      // n_bins + 1, strictly increasing
    std::vector<double> densities;  // per-bin probability density
    std::size_t n_samples = 0;      // samples inside the range
    std::size_t n_below = 0;
    std::size_t n_above = 0;

    double bin_width() const { return edges[1] - edges[0]; }

    std::vector<double> centers() const {
        std::vector<double> c(densities.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (edges[i] + edges[i + 1]);
        return c;
    }
};

inline Histogram make_histogram(std::span<const double> samples, std::size_t n_bins,
                                double lo, double hi) {
    if (samples.empty()) throw std::invalid_argument("histogram: empty sample set");
    if (n_bins < 1) throw std::invalid_argument("bins: need at least one bin");
    if (!(hi > lo)) throw std::invalid_argument("range: upper bound must exceed lower bound");

    Histogram h;
    h.edges.resize(n_bins + 1);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) h.edges[i] = lo + static_cast<double>(i) * width;
    h.edges.back() = hi;

    std::vector<std::size_t> counts(n_bins, 0);
    for (double v : samples) {
        if (v < lo) {
            ++h.n_below;
        } else if (v > hi) {
            ++h.n_above;
        } else {
            auto bin = static_cast<std::size_t>((v - lo) / width);
            if (bin >= n_bins) bin = n_bins - 1;  // v == hi lands in the top bin
            ++counts[bin];
            ++h.n_samples;
        }
    }
    if (h.n_samples == 0) throw std::invalid_argument("histogram: no samples inside the range");

    h.densities.resize(n_bins);
    const double norm = 1.0 / (static_cast<double>(h.n_samples) * width);
    for (std::size_t i = 0; i < n_bins; ++i)
        h.densities[i] = static_cast<double>(counts[i]) * norm;
    return h;
}

}  // namespace coevo
