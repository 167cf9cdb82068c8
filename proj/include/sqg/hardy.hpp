#pragma once

#include <array>
#include <cmath>

#include "sqg/derivative.hpp"
#include "sqg/grid.hpp"
#include "sqg/interpolate.hpp"

namespace sqg {

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [0,1]
inline constexpr std::array<double, 8> gl8_x = {
    0.01985507175123188415821957, 0.10166676129318663020422303, 0.23723379504183550709113047,
    0.40828267875217509753026193, 0.59171732124782490246973807, 0.76276620495816449290886953,
    0.89833323870681336979577697, 0.98014492824876811584178043};
inline constexpr std::array<double, 8> gl8_w = {
    0.05061426814518812957626567, 0.11119051722668723527217800, 0.15685332293894364366898110,
    0.18134189168918099148257522, 0.18134189168918099148257522, 0.15685332293894364366898110,
    0.11119051722668723527217800, 0.05061426814518812957626567};

}  // namespace detail

/// Stable evaluation of d1 f / x2 under the Dirichlet condition. Away from
/// the boundary (x2 >= 4h) the quotient is a direct division; below that the
/// identity d1 f(x)/x2 = int_0^1 d12 f(x1, x2 tau) dtau is integrated with
/// 8-point Gauss-Legendre quadrature along the vertical segment, which keeps
/// the result bounded by max |d12 f|.
inline ScalarField hardy_quotient(const ScalarField& f) {
    require_dbc(f, "hardy_quotient");
    const GridSpec& g = f.spec();
    const Field2D d1 = derivative(f.data, 1, 0);
    const Field2D d12 = derivative(f.data, 1, 1);
    ScalarField out{Field2D(g), f.support_radius};
    const int j_direct = 4;
    for (int j = 0; j < g.ny; ++j) {
        const double x2 = g.x2(j);
        for (int i = 0; i < g.nx; ++i) {
            if (j >= j_direct) {
                out.data.at(i, j) = d1.at(i, j) / x2;
            } else {
                const double x1 = g.x1(i);
                double acc = 0.0;
                for (int q = 0; q < 8; ++q)
                    acc += detail::gl8_w[q] * interpolate(d12, x1, x2 * detail::gl8_x[q]);
                out.data.at(i, j) = acc;
            }
        }
    }
    return out;
}

}  // namespace sqg
