#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "sqg/grid.hpp"

namespace sqg {

/// Quintic smoothstep, C^2 at both seams.
inline double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// Radial bump: 1 for r <= r_on, 0 for r >= r_off, quintic in between.
inline double radial_bump(double r, double r_on, double r_off) {
    if (r_off <= r_on) throw std::invalid_argument("radial_bump: r_off must exceed r_on");
    return 1.0 - smoothstep5((r - r_on) / (r_off - r_on));
}

/// Theorem-2 style datum: A x1 x2 + B x2^2 exactly on B(0;r0), cut to zero
/// smoothly on [r0, 2 r0].
inline ScalarField model_datum(const GridSpec& g, double L, double A, double B, double r0) {
    if (!(r0 > 0.0 && r0 < 0.5))
        throw std::invalid_argument("model_datum: r0 must lie in (0, 1/2)");
    if (2.0 * r0 > L)
        throw std::invalid_argument("model_datum: support 2*r0 exceeds the budget L");
    return sample_field(g, L, [=](double x, double y) {
        const double r = std::hypot(x, y);
        return (A * x * y + B * y * y) * radial_bump(r, r0, 2.0 * r0);
    });
}

/// Smooth odd-in-x1 datum x1 x2 exp(-|x|^2/r0^2), compactly supported via a
/// far bump on [0.6 L, 0.9 L].
inline ScalarField gaussian_xy_datum(const GridSpec& g, double L, double amplitude, double r0) {
    if (r0 <= 0.0) throw std::invalid_argument("gaussian_xy_datum: r0 must be positive");
    return sample_field(g, L, [=](double x, double y) {
        const double r2 = x * x + y * y;
        return amplitude * x * y * std::exp(-r2 / (r0 * r0)) *
               radial_bump(std::sqrt(r2), 0.6 * L, 0.9 * L);
    });
}

/// x2^2 times a far cutoff; nonzero boundary trace of d22, used by the
/// kernel verification suite.
inline ScalarField x2sq_datum(const GridSpec& g, double L, double B = 1.0) {
    return sample_field(g, L, [=](double x, double y) {
        const double r = std::hypot(x, y);
        return B * y * y * radial_bump(r, 0.6 * L, 0.95 * L);
    });
}

/// x2^3 times a far cutoff; vanishing boundary trace of d22.
inline ScalarField x2cube_datum(const GridSpec& g, double L) {
    return sample_field(g, L, [=](double x, double y) {
        const double r = std::hypot(x, y);
        return y * y * y * radial_bump(r, 0.6 * L, 0.95 * L);
    });
}

inline ScalarField
make_initial(const std::string& kind, const GridSpec& g, double L, double A, double B, double r0) {
    if (kind == "model") return model_datum(g, L, A, B, r0);
    if (kind == "gaussian_xy") return gaussian_xy_datum(g, L, A, r0);
    throw std::invalid_argument("initial.kind: unknown kind '" + kind + "'");
}

}  // namespace sqg
