#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "sqg/grid.hpp"

namespace sqg {

namespace detail {

// Lagrange cubic weights for fractional index g relative to nodes
// p0..p0+3. 4th-order for smooth data.
inline std::array<double, 4> cubic_weights(double g, int p0) {
    std::array<double, 4> w;
    for (int k = 0; k < 4; ++k) {
        double num = 1.0, den = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (m == k) continue;
            num *= g - (p0 + m);
            den *= static_cast<double>(k - m);
        }
        w[k] = num / den;
    }
    return w;
}

}  // namespace detail

/// Bicubic (tensor Lagrange) sample of a gridded field. Coordinates are
/// clamped onto the grid box; near an edge the 4-node window shifts to a
/// one-sided stencil.
inline double interpolate(const Field2D& f, double x1, double x2) {
    const GridSpec& g = f.spec();
    double gi = (x1 - g.x1_min) / g.h;
    double gj = (x2 - g.x2_min) / g.h;
    gi = std::clamp(gi, 0.0, static_cast<double>(g.nx - 1));
    gj = std::clamp(gj, 0.0, static_cast<double>(g.ny - 1));
    int i0 = std::clamp(static_cast<int>(std::floor(gi)) - 1, 0, g.nx - 4);
    int j0 = std::clamp(static_cast<int>(std::floor(gj)) - 1, 0, g.ny - 4);
    const auto wi = detail::cubic_weights(gi, i0);
    const auto wj = detail::cubic_weights(gj, j0);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
        const double* row = f.row(j0 + b);
        double s = 0.0;
        for (int a = 0; a < 4; ++a) s += wi[a] * row[i0 + a];
        acc += wj[b] * s;
    }
    return acc;
}

inline double interpolate(const ScalarField& f, double x1, double x2) {
    return interpolate(f.data, x1, x2);
}

}  // namespace sqg
