#pragma once

#include <stdexcept>

#include "sqg/grid.hpp"

namespace sqg {

namespace detail {

// One-dimensional derivative along a strided line of n samples. Interior
// nodes get 4th-order central stencils (2nd-order central for d=3 on the one
// node where the 7-point stencil does not fit); the two nodes nearest each
// end get 2nd-order one-sided stencils. For half-plane fields the lower end
// of an x2 line is the physical boundary.
inline void line_derivative(const double* in, double* out, int n, std::ptrdiff_t stride_in,
                            std::ptrdiff_t stride_out, int d, double h) {
    const auto v = [&](int k) { return in[stride_in * k]; };
    const double h2 = h * h, h3 = h2 * h;
    const int hw = (d == 3) ? 3 : 2;
    if (n < 7) throw std::invalid_argument("derivative: grid too small for the stencil");
    for (int k = 0; k < n; ++k) {
        double r;
        if (k < 2) {
            if (d == 1)
                r = (-1.5 * v(k) + 2.0 * v(k + 1) - 0.5 * v(k + 2)) / h;
            else if (d == 2)
                r = (2.0 * v(k) - 5.0 * v(k + 1) + 4.0 * v(k + 2) - v(k + 3)) / h2;
            else
                r = (-2.5 * v(k) + 9.0 * v(k + 1) - 12.0 * v(k + 2) + 7.0 * v(k + 3) -
                     1.5 * v(k + 4)) / h3;
        } else if (k >= n - 2) {
            if (d == 1)
                r = (1.5 * v(k) - 2.0 * v(k - 1) + 0.5 * v(k - 2)) / h;
            else if (d == 2)
                r = (2.0 * v(k) - 5.0 * v(k - 1) + 4.0 * v(k - 2) - v(k - 3)) / h2;
            else
                r = (2.5 * v(k) - 9.0 * v(k - 1) + 12.0 * v(k - 2) - 7.0 * v(k - 3) +
                     1.5 * v(k - 4)) / h3;
        } else if (k >= hw && k < n - hw) {
            if (d == 1)
                r = (v(k - 2) - 8.0 * v(k - 1) + 8.0 * v(k + 1) - v(k + 2)) / (12.0 * h);
            else if (d == 2)
                r = (-v(k - 2) + 16.0 * v(k - 1) - 30.0 * v(k) + 16.0 * v(k + 1) - v(k + 2)) /
                    (12.0 * h2);
            else
                r = (-v(k - 3) + 8.0 * v(k - 2) - 13.0 * v(k - 1) + 13.0 * v(k + 1) -
                     8.0 * v(k + 2) + v(k + 3)) / (8.0 * h3);
        } else {
            // d=3 one node shy of the 7-point stencil
            r = (v(k + 2) - 2.0 * v(k + 1) + 2.0 * v(k - 1) - v(k - 2)) / (2.0 * h3);
        }
        out[stride_out * k] = r;
    }
}

inline void axis_derivative(const Field2D& in, Field2D& out, int axis, int order) {
    const GridSpec& g = in.spec();
    if (axis == 0) {
        for (int j = 0; j < g.ny; ++j)
            line_derivative(in.row(j), out.row(j), g.nx, 1, 1, order, g.h);
    } else {
        const std::ptrdiff_t s = g.nx;
        for (int i = 0; i < g.nx; ++i)
            line_derivative(in.row(0) + i, out.row(0) + i, g.ny, s, s, order, g.h);
    }
}

}  // namespace detail

/// Discrete mixed derivative d1^a1 d2^a2, applied axis-by-axis (x1 pass
/// first). Exact for polynomials up to the stencil order.
inline Field2D derivative(const Field2D& f, int a1, int a2) {
    if (a1 < 0 || a2 < 0 || a1 + a2 > 3)
        throw std::invalid_argument("derivative: multi-index order must be at most 3");
    Field2D tmp(f.spec());
    if (a1 > 0) detail::axis_derivative(f, tmp, 0, a1);
    const Field2D& src = (a1 > 0) ? tmp : f;
    if (a2 == 0) return src;
    Field2D out(f.spec());
    detail::axis_derivative(src, out, 1, a2);
    return out;
}

inline ScalarField derivative(const ScalarField& f, int a1, int a2) {
    return ScalarField{derivative(f.data, a1, a2), f.support_radius};
}

inline Field2D derivative(const ExtendedField& f, int a1, int a2) {
    return derivative(f.materialize(), a1, a2);
}

}  // namespace sqg
