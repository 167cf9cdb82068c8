#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/derivative.hpp"
#include "sqg/grid.hpp"

namespace sqg {

enum class NormKind { Lp, Wkp, HolderSeminorm };

/// Descriptor for a single norm evaluation. p > 1 mirrors the wellposedness
/// range; plain Lebesgue integrals at p = 1 are available through lp_norm
/// directly.
struct NormRequest {
    NormKind kind = NormKind::Lp;
    double p = 2.0;
    int k = 0;
    double beta = 0.5;
    int pair_samples = 10000;
};

inline void validate(const NormRequest& r) {
    if (!(r.p > 1.0)) throw std::invalid_argument("norm: p must exceed 1");
    if (r.k < 0 || r.k > 3) throw std::invalid_argument("norm: derivative order must be 0..3");
    if (r.kind == NormKind::HolderSeminorm) {
        if (!(r.beta > 0.0 && r.beta < 1.0))
            throw std::invalid_argument("norm: beta must lie in (0,1)");
        if (r.pair_samples < 1000)
            throw std::invalid_argument("norm: pair_samples must be at least 1000");
    }
}

namespace detail {

// Trapezoid weight: 1/2 on each array edge. For compactly supported data the
// edge rows vanish and this reduces to the plain node sum.
inline double trapezoid_weight(const GridSpec& g, int i, int j) {
    double w = 1.0;
    if (i == 0 || i == g.nx - 1) w *= 0.5;
    if (j == 0 || j == g.ny - 1) w *= 0.5;
    return w;
}

}  // namespace detail

/// Trapezoid-rule L^p norm, p in [1, inf].
inline double lp_norm(const Field2D& f, double p) {
    const GridSpec& g = f.spec();
    if (std::isinf(p)) return f.max_abs();
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be at least 1");
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            acc += detail::trapezoid_weight(g, i, j) * std::pow(std::abs(f.at(i, j)), p);
    return std::pow(acc * g.h * g.h, 1.0 / p);
}

inline double lp_norm(const ScalarField& f, double p) { return lp_norm(f.data, p); }

/// All multi-indices with a1+a2 <= k, graded order.
inline std::vector<std::pair<int, int>> multi_indices_up_to(int k) {
    std::vector<std::pair<int, int>> out;
    for (int o = 0; o <= k; ++o)
        for (int a1 = o; a1 >= 0; --a1) out.emplace_back(a1, o - a1);
    return out;
}

inline double wkp_norm(const Field2D& f, int k, double p) {
    double acc = 0.0;
    bool sup = std::isinf(p);
    for (auto [a1, a2] : multi_indices_up_to(k)) {
        const Field2D d = derivative(f, a1, a2);
        if (sup)
            acc = std::max(acc, d.max_abs());
        else
            acc += std::pow(lp_norm(d, p), p);
    }
    return sup ? acc : std::pow(acc, 1.0 / p);
}

inline double wkp_norm(const ScalarField& f, int k, double p) { return wkp_norm(f.data, k, p); }

/// Discrete Hoelder seminorm of the order-k derivatives: max over all
/// nearest-neighbor pairs plus `pair_samples` seeded random node pairs of
/// |D^a f(x) - D^a f(x')| / |x-x'|^beta, maximized over |a| = k.
inline double holder_seminorm(const Field2D& f, int k, double beta, int pair_samples,
                              std::uint64_t seed = 42) {
    const GridSpec& g = f.spec();
    double best = 0.0;
    std::vector<Field2D> tops;
    for (int a1 = k; a1 >= 0; --a1) tops.push_back(derivative(f, a1, k - a1));
    const double hb = std::pow(g.h, beta);
    for (const Field2D& d : tops) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double v = d.at(i, j);
                if (i + 1 < g.nx) best = std::max(best, std::abs(d.at(i + 1, j) - v) / hb);
                if (j + 1 < g.ny) best = std::max(best, std::abs(d.at(i, j + 1) - v) / hb);
            }
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> di(0, g.nx - 1), dj(0, g.ny - 1);
    for (int s = 0; s < pair_samples; ++s) {
        const int i1 = di(rng), j1 = dj(rng), i2 = di(rng), j2 = dj(rng);
        if (i1 == i2 && j1 == j2) continue;
        const double dist = g.h * std::hypot(double(i1 - i2), double(j1 - j2));
        const double db = std::pow(dist, beta);
        for (const Field2D& d : tops)
            best = std::max(best, std::abs(d.at(i1, j1) - d.at(i2, j2)) / db);
    }
    return best;
}

inline double holder_seminorm(const ScalarField& f, int k, double beta, int pair_samples,
                              std::uint64_t seed = 42) {
    return holder_seminorm(f.data, k, beta, pair_samples, seed);
}

/// C^{k,beta} estimate: max sup-norm over derivatives of order <= k plus the
/// order-k seminorm.
inline double ck_beta_norm(const Field2D& f, int k, double beta, int pair_samples = 10000,
                           std::uint64_t seed = 42) {
    double sup = 0.0;
    for (auto [a1, a2] : multi_indices_up_to(k)) sup = std::max(sup, derivative(f, a1, a2).max_abs());
    return sup + holder_seminorm(f, k, beta, pair_samples, seed);
}

inline double ck_beta_norm(const ScalarField& f, int k, double beta, int pair_samples = 10000,
                           std::uint64_t seed = 42) {
    return ck_beta_norm(f.data, k, beta, pair_samples, seed);
}

/// Largest |D^a f| over the grid among |a| = 3; the W^{3,inf} proxy.
inline double w3inf_proxy(const Field2D& f) {
    double m = 0.0;
    for (int a1 = 3; a1 >= 0; --a1) m = std::max(m, derivative(f, a1, 3 - a1).max_abs());
    return m;
}

/// Time-stamped bundle of norm estimates.
struct NormReport {
    double t = 0.0;
    std::map<std::string, double> entries;
    double sup_w3inf_proxy = 0.0;
};

inline double norm(const ScalarField& f, const NormRequest& req, std::uint64_t seed = 42) {
    validate(req);
    if (!f.data.all_finite()) throw std::invalid_argument("norm: field has non-finite samples");
    switch (req.kind) {
        case NormKind::Lp: return lp_norm(f, req.p);
        case NormKind::Wkp: return wkp_norm(f, req.k, req.p);
        case NormKind::HolderSeminorm:
            return holder_seminorm(f, req.k, req.beta, req.pair_samples, seed);
    }
    throw std::logic_error("norm: unreachable");
}

}  // namespace sqg
