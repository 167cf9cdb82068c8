#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sqg/derivative.hpp"
#include "sqg/grid.hpp"
#include "sqg/norms.hpp"

namespace sqg {

enum class PvMode { mollified, punctured };

/// Regularization of the reflected Biot-Savart kernel. The mollified form
/// replaces |x-y|^3 by (|x-y|^2 + eps^2)^{3/2}; the punctured form keeps the
/// bare kernel and skips the singular self term.
struct KernelParams {
    double epsilon = 0.0;
    PvMode pv_mode = PvMode::mollified;
};

inline void validate(const KernelParams& k) {
    if (k.pv_mode == PvMode::mollified && !(k.epsilon > 0.0))
        throw std::invalid_argument("kernel: mollified mode requires epsilon > 0");
    if (k.pv_mode == PvMode::punctured && k.epsilon != 0.0)
        throw std::invalid_argument("kernel: punctured mode requires epsilon = 0");
}

struct VelocityField {
    Field2D u1;
    Field2D u2;
    KernelParams params;
    bool under_resolved_core = false;  // mollified with epsilon < h/8

    const GridSpec& spec() const { return u1.spec(); }
};

namespace detail {

// Nonzero cells of theta in row-major order; the summation order over this
// list is the reproducibility contract.
struct SourceList {
    std::vector<double> y1, y2, w;
    std::size_t size() const { return w.size(); }
};

inline SourceList gather_sources(const ScalarField& theta) {
    const GridSpec& g = theta.spec();
    SourceList s;
    const double h2 = g.h * g.h;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.x2(j);
        const double* row = theta.data.row(j);
        for (int i = 0; i < g.nx; ++i) {
            if (row[i] == 0.0) continue;
            s.y1.push_back(g.x1(i));
            s.y2.push_back(y);
            s.w.push_back(row[i] * h2);
        }
    }
    return s;
}

inline Vec2 kernel_sum_mollified(const SourceList& s, double tx1, double tx2, double eps2) {
    const double* __restrict y1 = s.y1.data();
    const double* __restrict y2 = s.y2.data();
    const double* __restrict w = s.w.data();
    const std::size_t n = s.size();
    double a1 = 0.0, a2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx1 = tx1 - y1[k];
        const double da = tx2 - y2[k];
        const double db = tx2 + y2[k];
        const double ra2 = dx1 * dx1 + da * da + eps2;
        const double rb2 = dx1 * dx1 + db * db + eps2;
        const double ia = 1.0 / (ra2 * std::sqrt(ra2));
        const double ib = 1.0 / (rb2 * std::sqrt(rb2));
        a1 += w[k] * (da * ia - db * ib);
        a2 += w[k] * dx1 * (ib - ia);
    }
    return {a1, a2};
}

inline Vec2 kernel_sum_punctured(const SourceList& s, double tx1, double tx2) {
    const std::size_t n = s.size();
    double a1 = 0.0, a2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx1 = tx1 - s.y1[k];
        const double da = tx2 - s.y2[k];
        const double db = tx2 + s.y2[k];
        const double ra2 = dx1 * dx1 + da * da;
        const double rb2 = dx1 * dx1 + db * db;
        if (ra2 > 0.0) {
            const double ia = 1.0 / (ra2 * std::sqrt(ra2));
            a1 += s.w[k] * da * ia;
            a2 -= s.w[k] * dx1 * ia;
        }
        if (rb2 > 0.0) {
            const double ib = 1.0 / (rb2 * std::sqrt(rb2));
            a1 -= s.w[k] * db * ib;
            a2 += s.w[k] * dx1 * ib;
        }
    }
    return {a1, a2};
}

}  // namespace detail

/// Velocity via direct trapezoid summation of the reflected kernel over the
/// support cells, O(targets x sources). u2 on the boundary row is set to
/// zero exactly; there |x-y| = |x-ybar| and the two kernel halves cancel.
inline VelocityField velocity(const ScalarField& theta, const KernelParams& params) {
    validate(params);
    const GridSpec& g = theta.spec();
    VelocityField out{Field2D(g), Field2D(g), params,
                      params.pv_mode == PvMode::mollified && params.epsilon < g.h / 8.0};
    const detail::SourceList src = detail::gather_sources(theta);
    const double eps2 = params.epsilon * params.epsilon;
    const bool punctured = params.pv_mode == PvMode::punctured;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j) {
        const double tx2 = g.x2(j);
        double* r1 = out.u1.row(j);
        double* r2 = out.u2.row(j);
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 u = punctured ? detail::kernel_sum_punctured(src, g.x1(i), tx2)
                                     : detail::kernel_sum_mollified(src, g.x1(i), tx2, eps2);
            r1[i] = u.x1;
            r2[i] = u.x2;
        }
    }
    for (int i = 0; i < g.nx; ++i) out.u2.at(i, 0) = 0.0;
    return out;
}

/// Velocity at arbitrary points by the same summation.
inline std::vector<Vec2> velocity_at(const ScalarField& theta, const KernelParams& params,
                                     const std::vector<Vec2>& pts) {
    validate(params);
    const detail::SourceList src = detail::gather_sources(theta);
    const double eps2 = params.epsilon * params.epsilon;
    const bool punctured = params.pv_mode == PvMode::punctured;
    std::vector<Vec2> out(pts.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(pts.size()); ++k) {
        out[k] = punctured ? detail::kernel_sum_punctured(src, pts[k].x1, pts[k].x2)
                           : detail::kernel_sum_mollified(src, pts[k].x1, pts[k].x2, eps2);
        if (pts[k].x2 == 0.0) out[k].x2 = 0.0;
    }
    return out;
}

/// Max |u2| over boundary points, evaluated from the raw kernel sums without
/// the analytic forcing; measures the cancellation behind the slip condition.
inline double raw_boundary_slip(const ScalarField& theta, const KernelParams& params,
                                const std::vector<double>& x1s) {
    validate(params);
    const detail::SourceList src = detail::gather_sources(theta);
    const double eps2 = params.epsilon * params.epsilon;
    double worst = 0.0;
    for (double x1 : x1s) {
        const Vec2 u = params.pv_mode == PvMode::punctured
                           ? detail::kernel_sum_punctured(src, x1, 0.0)
                           : detail::kernel_sum_mollified(src, x1, 0.0, eps2);
        worst = std::max(worst, std::abs(u.x2));
    }
    return worst;
}

/// Samples of d22 theta on the boundary row (2nd-order one-sided stencil).
struct BoundaryTrace {
    std::vector<double> values;
    double h = 0.0;
    double x1_min = 0.0;

    double x1(int i) const { return x1_min + i * h; }
    int size() const { return static_cast<int>(values.size()); }
};

inline BoundaryTrace boundary_trace(const ScalarField& theta) {
    const GridSpec& g = theta.spec();
    BoundaryTrace tr{std::vector<double>(g.nx), g.h, g.x1_min};
    const double h2 = g.h * g.h;
    for (int i = 0; i < g.nx; ++i)
        tr.values[i] = (2.0 * theta.data.at(i, 0) - 5.0 * theta.data.at(i, 1) +
                        4.0 * theta.data.at(i, 2) - theta.data.at(i, 3)) / h2;
    return tr;
}

/// Line integral H[theta](x) = int x2 / (|x-(y1,0)|^2 + eps^2)^{3/2}
/// d22theta(y1,0) dy1, trapezoid over the trace samples. eps = 0 is allowed;
/// the integrand is regular for x2 > 0.
inline std::vector<double> h_operator(const BoundaryTrace& trace, const std::vector<Vec2>& targets,
                                      double epsilon) {
    for (const Vec2& t : targets)
        if (!(t.x2 > 0.0))
            throw std::invalid_argument("h_operator: targets must have x2 > 0");
    const int n = trace.size();
    std::vector<double> out(targets.size(), 0.0);
    const double e2 = epsilon * epsilon;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(targets.size()); ++k) {
        const double x1 = targets[k].x1, x2 = targets[k].x2;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = x1 - trace.x1(i);
            const double r2 = d * d + x2 * x2 + e2;
            const double ker = x2 / (r2 * std::sqrt(r2));
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            acc += w * ker * trace.values[i];
        }
        out[k] = acc * trace.h;
    }
    return out;
}

namespace detail {

template <class Fn>
double adaptive_simpson(Fn&& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class Fn>
double integrate_adaptive(Fn&& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

}  // namespace detail

struct LogIdentityResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
};

/// Both sides of the closed-form identity
///   int_{|x1-y1|<=4L} dy1 / sqrt((x1-y1)^2 + x2^2) + 2 log x2
///     = 2 log(4L + sqrt(16 L^2 + x2^2)),
/// the left side by adaptive quadrature split at the peak.
inline LogIdentityResult log_identity_check(double L, double x1, double x2) {
    if (!(L > 0.0) || !(x2 > 0.0))
        throw std::invalid_argument("log_identity_check: L and x2 must be positive");
    const auto f = [&](double y) { return 1.0 / std::sqrt((x1 - y) * (x1 - y) + x2 * x2); };
    const double tol = 1e-14;
    const double integral = detail::integrate_adaptive(f, x1 - 4.0 * L, x1, tol) +
                            detail::integrate_adaptive(f, x1, x1 + 4.0 * L, tol);
    LogIdentityResult r;
    r.lhs = integral + 2.0 * std::log(x2);
    r.rhs = 2.0 * std::log(4.0 * L + std::sqrt(16.0 * L * L + x2 * x2));
    r.gap = std::abs(r.lhs - r.rhs);
    return r;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    double r_squared = 0.0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        f.max_residual = std::max(f.max_residual, std::abs(r));
        ssr += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return f;
}

struct SingularFit {
    double slope = 0.0;          // fitted coefficient of log(x2); about 4 d22theta(x1,0)
    double intercept = 0.0;
    double remainder_bound = 0.0;
    double expected_slope = 0.0;
    std::vector<double> probe_x2;
    std::vector<double> d22_u1;
};

/// Extracts the logarithmic component of d22 u1 along a vertical probe
/// column: u1 is point-sampled around each probe, differenced at spacing h,
/// and regressed against log(x2).
inline SingularFit singular_decomposition(const ScalarField& theta, const KernelParams& params,
                                          double x1, const std::vector<double>& probes) {
    if (probes.size() < 6)
        throw std::invalid_argument("singular_decomposition: need at least 6 probes");
    const double h = theta.h();
    for (double p : probes)
        if (!(p >= 2.0 * h))
            throw std::invalid_argument("singular_decomposition: probes must sit above the stencil");
    std::vector<Vec2> pts;
    pts.reserve(5 * probes.size());
    for (double p : probes)
        for (int m = -2; m <= 2; ++m) pts.push_back({x1, p + m * h});
    const std::vector<Vec2> u = velocity_at(theta, params, pts);
    SingularFit out;
    out.probe_x2 = probes;
    std::vector<double> lg;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        double f[5];
        for (int m = 0; m < 5; ++m) f[m] = u[5 * k + m].x1;
        const double d2 =
            (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
        out.d22_u1.push_back(d2);
        lg.push_back(std::log(probes[k]));
    }
    const LinearFit fit = fit_line(lg, out.d22_u1);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.remainder_bound = fit.max_residual;
    const BoundaryTrace tr = boundary_trace(theta);
    // nearest-node trace value at the probe column
    const int i = static_cast<int>(std::round((x1 - tr.x1_min) / tr.h));
    out.expected_slope = 4.0 * tr.values[std::clamp(i, 0, tr.size() - 1)];
    return out;
}

struct ResidualRatio {
    double ratio = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    bool degenerate = false;
};

/// || d222 u1 - 2 H[theta] ||_Lp / || d222 theta ||_Lp restricted to rows
/// x2 >= 4h. The H operator is mollified with the same epsilon as the
/// velocity so both sides discretize the same regularized kernel.
inline ResidualRatio third_derivative_residual(const ScalarField& theta, double p,
                                               const KernelParams& params) {
    const GridSpec& g = theta.spec();
    const VelocityField u = velocity(theta, params);
    const Field2D d3u1 = derivative(u.u1, 0, 3);
    const Field2D d3th = derivative(theta.data, 0, 3);
    const BoundaryTrace tr = boundary_trace(theta);
    const int j0 = 4;
    std::vector<Vec2> targets;
    targets.reserve(static_cast<std::size_t>(g.nx) * (g.ny - j0));
    for (int j = j0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) targets.push_back({g.x1(i), g.x2(j)});
    const std::vector<double> H = h_operator(tr, targets, params.epsilon);
    double num = 0.0, den = 0.0;
    std::size_t k = 0;
    const bool sup = std::isinf(p);
    for (int j = j0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i, ++k) {
            const double w = detail::trapezoid_weight(g, i, j);
            const double r = d3u1.at(i, j) - 2.0 * H[k];
            const double s = d3th.at(i, j);
            if (sup) {
                num = std::max(num, std::abs(r));
                den = std::max(den, std::abs(s));
            } else {
                num += w * std::pow(std::abs(r), p);
                den += w * std::pow(std::abs(s), p);
            }
        }
    ResidualRatio out;
    const double h2 = g.h * g.h;
    out.numerator = sup ? num : std::pow(num * h2, 1.0 / p);
    out.denominator = sup ? den : std::pow(den * h2, 1.0 / p);
    if (out.denominator < 1e-14 * (1.0 + out.numerator)) {
        out.degenerate = true;
        return out;
    }
    out.ratio = out.numerator / out.denominator;
    return out;
}

}  // namespace sqg
