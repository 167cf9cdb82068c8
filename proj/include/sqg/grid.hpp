#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqg {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }

/// Uniform node layout. Rows are indexed by j (the x2 direction), columns by
/// i; for half-plane fields row j=0 sits on the boundary x2=0.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    double x1_min = 0.0;
    double x2_min = 0.0;

    double x1(int i) const { return x1_min + i * h; }
    double x2(int j) const { return x2_min + j * h; }
    double x1_max() const { return x1(nx - 1); }
    double x2_max() const { return x2(ny - 1); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

    bool operator==(const GridSpec&) const = default;
};

/// Dense row-major sample container over a GridSpec.
class Field2D {
  public:
    Field2D() = default;
    explicit Field2D(const GridSpec& spec, double fill = 0.0)
        : spec_(spec), v_(spec.size(), fill) {}

    const GridSpec& spec() const { return spec_; }
    double& at(int i, int j) { return v_[static_cast<std::size_t>(j) * spec_.nx + i]; }
    double at(int i, int j) const { return v_[static_cast<std::size_t>(j) * spec_.nx + i]; }
    double* row(int j) { return v_.data() + static_cast<std::size_t>(j) * spec_.nx; }
    const double* row(int j) const { return v_.data() + static_cast<std::size_t>(j) * spec_.nx; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

    bool all_finite() const {
        for (double x : v_) {
            if (!std::isfinite(x)) return false;
        }
        return true;
    }

  private:
    GridSpec spec_;
    std::vector<double> v_;
};

/// Half-plane grid dimensions for a support budget L and margin beyond it.
/// x1 spans [-(L+margin), L+margin], x2 spans [0, L+margin], with x1=0 on a
/// node so that symmetric data sample symmetrically.
inline GridSpec half_plane_grid(double h, double L, double margin) {
    if (h <= 0.0) throw std::invalid_argument("grid: h must be positive");
    if (L <= 0.0) throw std::invalid_argument("grid: L must be positive");
    if (margin < 4.0 * h)
        throw std::invalid_argument("grid: margin must be at least 4h (got " +
                                    std::to_string(margin) + " with h=" + std::to_string(h) + ")");
    const double extent = L + margin;
    const int n = static_cast<int>(std::ceil(extent / h - 1e-12));
    GridSpec g;
    g.nx = 2 * n + 1;
    g.ny = n + 1;
    g.h = h;
    g.x1_min = -n * h;
    g.x2_min = 0.0;
    return g;
}

/// Grid sizing parameters as they appear in run configurations.
struct GridConfig {
    double h = 1.0 / 128;
    double L = 1.0;
    double margin = 0.25;

    GridSpec spec() const { return half_plane_grid(h, L, margin); }
    GridConfig refined() const { return {0.5 * h, L, margin}; }
};

/// Gridded scalar on the upper half-plane. support_radius is the budget L:
/// samples vanish identically outside B(0;L) and the grid extends at least
/// 4h beyond it on every open side.
struct ScalarField {
    Field2D data;
    double support_radius = 0.0;

    const GridSpec& spec() const { return data.spec(); }
    double h() const { return data.spec().h; }
};

inline double boundary_row_max_abs(const ScalarField& f) {
    double m = 0.0;
    for (int i = 0; i < f.spec().nx; ++i) m = std::max(m, std::abs(f.data.at(i, 0)));
    return m;
}

inline void clamp_boundary_row(ScalarField& f) {
    for (int i = 0; i < f.spec().nx; ++i) f.data.at(i, 0) = 0.0;
}

inline double max_abs_outside_support(const ScalarField& f) {
    const GridSpec& g = f.spec();
    const double L2 = f.support_radius * f.support_radius;
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.x2(j);
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x1(i);
            if (x * x + y * y > L2) m = std::max(m, std::abs(f.data.at(i, j)));
        }
    }
    return m;
}

/// Checks the ScalarField invariants; throws naming the first violation.
inline void validate(const ScalarField& f, bool require_dbc = true) {
    const GridSpec& g = f.spec();
    if (g.h <= 0.0) throw std::invalid_argument("field: h must be positive");
    if (f.support_radius <= 0.0) throw std::invalid_argument("field: support_radius must be positive");
    const double need = f.support_radius + 4.0 * g.h;
    if (-g.x1_min < need - 1e-12 || g.x1_max() < need - 1e-12 || g.x2_max() < need - 1e-12)
        throw std::invalid_argument("field: grid extent must contain the support ball with margin >= 4h");
    if (require_dbc) {
        const double b = boundary_row_max_abs(f);
        if (b != 0.0)
            throw std::invalid_argument("field: boundary row must vanish (max violation " +
                                        std::to_string(b) + ")");
    }
    if (max_abs_outside_support(f) != 0.0)
        throw std::invalid_argument("field: samples must vanish outside the support ball");
}

inline void require_dbc(const ScalarField& f, const char* who) {
    const double b = boundary_row_max_abs(f);
    if (b != 0.0)
        throw std::invalid_argument(std::string(who) + ": boundary row must vanish, max violation " +
                                    std::to_string(b));
}

/// Samples fn(x1,x2) over a half-plane grid, forcing exact zeros outside the
/// support ball and on the boundary row. fn is expected to reach zero
/// smoothly before |x| = L; the mask only removes rounding dust.
template <class Fn>
ScalarField sample_field(const GridSpec& g, double L, Fn&& fn) {
    ScalarField f{Field2D(g), L};
    const double L2 = L * L;
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.x2(j);
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x1(i);
            f.data.at(i, j) = (x * x + y * y > L2) ? 0.0 : fn(x, y);
        }
    }
    clamp_boundary_row(f);
    return f;
}

enum class Parity { odd, even };

/// Reflection of a half-plane field across x2=0. Mirrored samples are looked
/// up from the base, so the parity symmetry is exact by construction.
struct ExtendedField {
    ScalarField base;
    Parity parity = Parity::odd;

    // j ranges over [-(ny-1), ny-1]
    double value(int i, int j) const {
        if (j >= 0) return base.data.at(i, j);
        return parity == Parity::odd ? -base.data.at(i, -j) : base.data.at(i, -j);
    }

    GridSpec full_spec() const {
        GridSpec g = base.spec();
        GridSpec out = g;
        out.ny = 2 * g.ny - 1;
        out.x2_min = -g.x2(g.ny - 1);
        return out;
    }

    /// Whole-plane copy (row j of the result is logical row j-(ny-1)).
    Field2D materialize() const {
        const GridSpec full = full_spec();
        Field2D out(full);
        const int off = base.spec().ny - 1;
        for (int j = 0; j < full.ny; ++j)
            for (int i = 0; i < full.nx; ++i) out.at(i, j) = value(i, j - off);
        return out;
    }
};

inline ExtendedField extend(const ScalarField& f, Parity parity) {
    if (parity == Parity::odd) require_dbc(f, "extend(odd)");
    return ExtendedField{f, parity};
}

}  // namespace sqg
