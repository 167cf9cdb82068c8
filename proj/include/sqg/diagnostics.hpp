#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/biot_savart.hpp"
#include "sqg/derivative.hpp"
#include "sqg/evolution.hpp"
#include "sqg/grid.hpp"
#include "sqg/hardy.hpp"
#include "sqg/initial_data.hpp"
#include "sqg/interpolate.hpp"
#include "sqg/norms.hpp"

namespace sqg {

// ---------------------------------------------------------------------------
// Illposedness experiment (difference quotient of d22 theta along paired
// trajectories, regressed against log(1/x2))
// ---------------------------------------------------------------------------

struct IllposednessConfig {
    double A = 1.0;
    double B = 1.0;
    double r0 = 0.4;
    std::vector<double> x2_probes;  // geometric, decreasing toward the boundary
    double x1_probe = 0.0;
    double t_star = 0.02;
};

inline std::vector<double> geometric_probes(double x2_min, double x2_max, int count) {
    if (count < 2 || !(x2_min > 0.0) || !(x2_max > x2_min))
        throw std::invalid_argument("probes: need count >= 2 and 0 < x2_min < x2_max");
    std::vector<double> p(count);
    const double q = std::pow(x2_max / x2_min, 1.0 / (count - 1));
    for (int k = 0; k < count; ++k) p[k] = x2_min * std::pow(q, k);
    return p;
}

inline void validate(const IllposednessConfig& c) {
    if (!(c.r0 > 0.0 && c.r0 < 0.5))
        throw std::invalid_argument("illposedness: r0 must lie in (0, 1/2)");
    if (c.x2_probes.size() < 2) throw std::invalid_argument("illposedness: need at least 2 probes");
    if (std::abs(c.x1_probe) > c.r0 / 10.0)
        throw std::invalid_argument("illposedness: probe column must satisfy |x1| <= r0/10");
    for (double p : c.x2_probes) {
        if (!(p > 0.0)) throw std::invalid_argument("illposedness: probes must have x2 > 0");
        if (std::abs(c.x1_probe) > p)
            throw std::invalid_argument("illposedness: probe constraint |x1| <= x2 violated");
    }
    if (!(c.t_star > 0.0)) throw std::invalid_argument("illposedness: t_star must be positive");
}

/// Per-step record of paired trajectories and the derivative values the
/// Theorem-2 bounds constrain.
struct TrajectorySample {
    double t = 0.0;
    std::vector<Vec2> phi_x;       // interior tracer positions, one per probe
    std::vector<Vec2> phi_y;       // boundary partners
    std::vector<double> d1_theta;  // d1 theta at phi_x
    std::vector<double> d12_theta;
    std::vector<double> d22_theta;
};

struct BoundViolation {
    int probe = 0;
    double t = 0.0;
    std::string quantity;
    double value = 0.0;
    double bound = 0.0;
};

struct SlopeReport {
    std::vector<double> probe_x2;
    std::vector<double> q;  // difference quotients at t_star
    double slope = 0.0;     // of q against log(1/x2)
    double intercept = 0.0;
    double residual = 0.0;  // max |fit residual|
    double r_squared = 0.0;
    std::vector<BoundViolation> violations;
    std::vector<int> flagged_probes;
    double certified_t_max = 0.0;  // box on which every bound held
    double certified_x2_min = 0.0;
    double certified_x2_max = 0.0;
    bool certified = false;
    std::vector<TrajectorySample> trajectory;
    std::vector<NormReport> norm_history;
    RunStatus status = RunStatus::ok;
};

/// Evaluates the Theorem-2 trajectory bounds at every recorded step.
/// Requires A, B > 0; the bounds are one-sided in those signs.
inline std::vector<BoundViolation> trajectory_bounds_check(
    const std::vector<TrajectorySample>& log, const IllposednessConfig& cfg) {
    if (!(cfg.A > 0.0 && cfg.B > 0.0))
        throw std::invalid_argument("trajectory_bounds_check: requires A, B > 0");
    std::vector<BoundViolation> out;
    const auto flag = [&](int k, double t, const char* q, double v, double b) {
        out.push_back({k, t, q, v, b});
    };
    for (const TrajectorySample& s : log) {
        for (std::size_t k = 0; k < s.phi_x.size(); ++k) {
            const double x2 = log.front().phi_x[k].x2;  // initial height
            const double ratio = s.phi_x[k].x2 / x2;
            if (ratio < 0.5 || ratio > 1.5) flag(int(k), s.t, "phi2_ratio", ratio, 1.5);
            const double sep = norm(s.phi_x[k] - s.phi_y[k]);
            if (sep > 2.0 * x2) flag(int(k), s.t, "phi_diff", sep, 2.0 * x2);
            const double d1gap = std::abs(s.d1_theta[k] - cfg.A * x2);
            if (d1gap > 0.5 * cfg.A * x2) flag(int(k), s.t, "d1_theta", d1gap, 0.5 * cfg.A * x2);
            if (s.d22_theta[k] < cfg.B) flag(int(k), s.t, "d22_theta", s.d22_theta[k], cfg.B);
            if (s.d12_theta[k] < 0.5 * cfg.A) flag(int(k), s.t, "d12_theta", s.d12_theta[k], 0.5 * cfg.A);
        }
    }
    return out;
}

/// Runs the model datum A x1 x2 + B x2^2 to t_star, tracking a tracer pair
/// (x1, x2_k) / (x1, 0) per probe, then forms the difference quotient
/// Q = (d22theta(Phi(x)) - d22theta(Phi(y))) / x2 by bicubic interpolation
/// of the differenced field and regresses it against log(1/x2).
inline SlopeReport illposedness_experiment(const IllposednessConfig& cfg, const GridConfig& grid,
                                           const TimeStepConfig& sim, const KernelParams& kernel,
                                           std::uint64_t seed = 42) {
    validate(cfg);
    const GridSpec g = grid.spec();
    const ScalarField theta0 = model_datum(g, grid.L, cfg.A, cfg.B, cfg.r0);

    FlowMap tracers;
    for (std::size_t k = 0; k < cfg.x2_probes.size(); ++k) {
        const double x2 = cfg.x2_probes[k];
        tracers.tracers.push_back(
            {"probe:" + std::to_string(k) + ":x", {cfg.x1_probe, x2}, {cfg.x1_probe, x2}, false});
        tracers.tracers.push_back(
            {"probe:" + std::to_string(k) + ":y", {cfg.x1_probe, 0.0}, {cfg.x1_probe, 0.0}, true});
    }

    TimeStepConfig tcfg = sim;
    tcfg.t_end = cfg.t_star;

    SlopeReport rep;
    rep.probe_x2 = cfg.x2_probes;

    const auto sample_trajectory = [&](const ScalarField& th, const FlowMap& flow, double t) {
        TrajectorySample s;
        s.t = t;
        const Field2D d1 = derivative(th.data, 1, 0);
        const Field2D d12 = derivative(th.data, 1, 1);
        const Field2D d22 = derivative(th.data, 0, 2);
        for (std::size_t k = 0; k < cfg.x2_probes.size(); ++k) {
            const Vec2 px = flow.tracers[2 * k].pos;
            const Vec2 py = flow.tracers[2 * k + 1].pos;
            s.phi_x.push_back(px);
            s.phi_y.push_back(py);
            s.d1_theta.push_back(interpolate(d1, px.x1, px.x2));
            s.d12_theta.push_back(interpolate(d12, px.x1, px.x2));
            s.d22_theta.push_back(interpolate(d22, px.x1, px.x2));
        }
        return s;
    };

    rep.trajectory.push_back(sample_trajectory(theta0, tracers, 0.0));
    const auto observer = [&](const SimulationState& st, const VelocityField&, const FlowMap& fl) {
        rep.trajectory.push_back(sample_trajectory(st.theta, fl, st.t));
    };

    const RunResult run_res = run_observed(tcfg, theta0, kernel, seed, tracers, observer);
    rep.status = run_res.status;
    rep.norm_history = run_res.state.history;

    const Field2D d22 = derivative(run_res.state.theta.data, 0, 2);
    std::vector<double> lg;
    for (std::size_t k = 0; k < cfg.x2_probes.size(); ++k) {
        const Vec2 px = run_res.flow.tracers[2 * k].pos;
        const Vec2 py = run_res.flow.tracers[2 * k + 1].pos;
        const double q =
            (interpolate(d22, px.x1, px.x2) - interpolate(d22, py.x1, py.x2)) / cfg.x2_probes[k];
        rep.q.push_back(q);
        lg.push_back(std::log(1.0 / cfg.x2_probes[k]));
    }
    const LinearFit fit = fit_line(lg, rep.q);
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.residual = fit.max_residual;
    rep.r_squared = fit.r_squared;

    if (cfg.A > 0.0 && cfg.B > 0.0) rep.violations = trajectory_bounds_check(rep.trajectory, cfg);
    for (const BoundViolation& v : rep.violations) rep.flagged_probes.push_back(v.probe);
    rep.certified = rep.violations.empty() && run_res.status == RunStatus::ok;
    rep.certified_t_max = cfg.t_star;
    rep.certified_x2_min = *std::min_element(cfg.x2_probes.begin(), cfg.x2_probes.end());
    rep.certified_x2_max = *std::max_element(cfg.x2_probes.begin(), cfg.x2_probes.end());
    return rep;
}

// ---------------------------------------------------------------------------
// Extension lemma suite
// ---------------------------------------------------------------------------

struct CommutatorReport {
    std::string identity;
    double parity_gap = 0.0;     // symmetry defect of the full-plane derivative
    double interior_gap = 0.0;   // mismatch with the base derivative on rows >= 2h
    double seam_gap = 0.0;       // mismatch on the two one-sided rows
};

struct ExtensionLemmaReport {
    std::vector<CommutatorReport> commutators;
    std::vector<double> holder_ratios;  // extension/base C^beta estimates
    double worst_holder_ratio = 0.0;
    double l2_doubling_ratio = 0.0;  // ||d22 odd-ext||_{L2(R^2)} / ||d22||_{L2(R^2_+)}
};

namespace detail {

inline double parity_gap(const Field2D& d, Parity expected) {
    const GridSpec& g = d.spec();
    const int off = (g.ny - 1) / 2;
    double worst = 0.0;
    for (int j = 1; j <= off; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double a = d.at(i, off + j);
            const double b = d.at(i, off - j);
            worst = std::max(worst, std::abs(expected == Parity::odd ? a + b : a - b));
        }
    if (expected == Parity::odd)
        for (int i = 0; i < g.nx; ++i) worst = std::max(worst, std::abs(d.at(i, off)));
    return worst;
}

inline Field2D upper_half(const Field2D& full, const GridSpec& base) {
    const int off = base.ny - 1;
    Field2D out(base);
    for (int j = 0; j < base.ny; ++j)
        for (int i = 0; i < base.nx; ++i) out.at(i, j) = full.at(i, off + j);
    return out;
}

inline CommutatorReport commutator(const std::string& name, const ScalarField& f, Parity ext_parity,
                                   int a1, int a2, Parity result_parity) {
    CommutatorReport rep;
    rep.identity = name;
    const Field2D d_ext = derivative(extend(f, ext_parity), a1, a2);
    rep.parity_gap = parity_gap(d_ext, result_parity);
    const Field2D d_base = derivative(f.data, a1, a2);
    const GridSpec& g = f.spec();
    const int off = g.ny - 1;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double gap = std::abs(d_ext.at(i, off + j) - d_base.at(i, j));
            (j >= 2 ? rep.interior_gap : rep.seam_gap) = std::max(
                j >= 2 ? rep.interior_gap : rep.seam_gap, gap);
        }
    return rep;
}

}  // namespace detail

/// Random smooth field vanishing on the boundary: a few Gaussian bumps times
/// x2, under a far cutoff.
inline ScalarField random_smooth_field(const GridSpec& g, double L, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), c1(-0.4 * L, 0.4 * L),
        c2(0.1 * L, 0.5 * L), wd(0.1 * L, 0.3 * L);
    struct Bump {
        double a, b1, b2, w;
    };
    std::vector<Bump> bumps;
    for (int k = 0; k < 3; ++k) bumps.push_back({amp(rng), c1(rng), c2(rng), wd(rng)});
    return sample_field(g, L, [=](double x, double y) {
        double v = 0.0;
        for (const Bump& b : bumps) {
            const double dx = x - b.b1, dy = y - b.b2;
            v += b.a * std::exp(-(dx * dx + dy * dy) / (b.w * b.w));
        }
        return y * v * radial_bump(std::hypot(x, y), 0.6 * L, 0.9 * L);
    });
}

/// Discrete renditions of the extension lemmas: derivative/extension
/// commutators, the Hoelder-norm factor over random fields, and the exact
/// doubling of the square integral under odd extension.
inline ExtensionLemmaReport extension_lemma_suite(const GridConfig& grid, int n_fields, double beta,
                                                  std::uint64_t seed = 42) {
    const GridSpec g = grid.spec();
    ExtensionLemmaReport rep;
    std::mt19937_64 rng(seed);

    const ScalarField probe = random_smooth_field(g, grid.L, rng);
    rep.commutators.push_back(
        detail::commutator("d1 odd-ext = odd-ext d1", probe, Parity::odd, 1, 0, Parity::odd));
    rep.commutators.push_back(
        detail::commutator("d1 even-ext = even-ext d1", probe, Parity::even, 1, 0, Parity::even));
    rep.commutators.push_back(
        detail::commutator("d2 even-ext = odd-ext d2", probe, Parity::even, 0, 1, Parity::odd));
    rep.commutators.push_back(
        detail::commutator("d2 odd-ext = even-ext d2 (DBC)", probe, Parity::odd, 0, 1, Parity::even));
    rep.commutators.push_back(
        detail::commutator("d22 odd-ext = odd-ext d22 (DBC)", probe, Parity::odd, 0, 2, Parity::odd));

    for (int k = 0; k < n_fields; ++k) {
        const ScalarField f = random_smooth_field(g, grid.L, rng);
        const Field2D ext = extend(f, Parity::odd).materialize();
        const double base = f.data.max_abs() + holder_seminorm(f.data, 0, beta, 10000, seed + k);
        const double extn = ext.max_abs() + holder_seminorm(ext, 0, beta, 10000, seed + k);
        rep.holder_ratios.push_back(extn / base);
        rep.worst_holder_ratio = std::max(rep.worst_holder_ratio, extn / base);
    }

    // || d22 g-bar ||_{L2(R^2)} vs || d22 g ||_{L2(R^2_+)} for g = x2^2 cutoff:
    // both sides read the same full-plane derivative so the odd symmetry makes
    // the ratio exactly sqrt(2) up to rounding.
    const ScalarField gsq = x2sq_datum(g, grid.L);
    const Field2D dfull = derivative(extend(gsq, Parity::odd), 0, 2);
    const double lhs = lp_norm(dfull, 2.0);
    const double rhs = lp_norm(detail::upper_half(dfull, g), 2.0);
    rep.l2_doubling_ratio = lhs / rhs;
    return rep;
}

// ---------------------------------------------------------------------------
// Velocity estimate suite
// ---------------------------------------------------------------------------

struct EstimateRatios {
    double h = 0.0;
    double u_c2 = 0.0;       // (||u2||_{C^{2,b}} + ||d1 u1||_{C^{1,b}}) / ||theta||_{C^{2,b}}
    double u_log1 = 0.0;     // sup |d22 u1 - 4 d22 theta log x2| / ||theta||_{C^{2,b}}
    double u_log_pairs = 0.0;  // compensated modulus over near-boundary pairs
    double vel_reg = 0.0;    // (||grad u||_inf + ||grad^2 u||_{2p} + ||grad^2 d1 u||_p) / ||theta||_{W^{3,p}}
    double gm = 0.0;         // ||d2 u1||_{C^gamma} / ||theta||_{C^{2,b}}
    double log_lip = 0.0;    // log-Lipschitz modulus of grad d1 u / Lip(grad d1 theta)
    double h2p = 0.0;        // ||x2 H||_{2p} / ||d22 theta||_{W^{1,p}}
    double vel_sing = 0.0;   // third_derivative_residual
    bool degenerate = false;
};

namespace detail {

inline double lp_restricted(const Field2D& f, double p, int j0) {
    const GridSpec& g = f.spec();
    if (std::isinf(p)) {
        double m = 0.0;
        for (int j = j0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) m = std::max(m, std::abs(f.at(i, j)));
        return m;
    }
    double acc = 0.0;
    for (int j = j0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            acc += trapezoid_weight(g, i, j) * std::pow(std::abs(f.at(i, j)), p);
    return std::pow(acc * g.h * g.h, 1.0 / p);
}

}  // namespace detail

inline EstimateRatios velocity_estimate_ratios(const ScalarField& theta, double beta, double p,
                                               const KernelParams& kernel, std::uint64_t seed = 42) {
    EstimateRatios r;
    const GridSpec& g = theta.spec();
    r.h = g.h;
    const double c2b = ck_beta_norm(theta, 2, beta, 10000, seed);
    const double w3p = wkp_norm(theta, 3, p);
    if (c2b < 1e-14 || w3p < 1e-14) {
        r.degenerate = true;
        return r;
    }
    const VelocityField u = velocity(theta, kernel);

    r.u_c2 = (ck_beta_norm(u.u2, 2, beta, 10000, seed) +
              ck_beta_norm(derivative(u.u1, 1, 0), 1, beta, 10000, seed)) /
             c2b;

    const Field2D d22u1 = derivative(u.u1, 0, 2);
    const Field2D d22th = derivative(theta.data, 0, 2);
    double worst = 0.0;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (std::abs(g.x1(i)) >= 3.0 * theta.support_radius) continue;
            worst = std::max(worst, std::abs(d22u1.at(i, j) -
                                             4.0 * d22th.at(i, j) * std::log(g.x2(j))));
        }
    r.u_log1 = worst / c2b;

    // compensated Hoelder modulus of d22 u1 minus its log part, sampled over
    // near-boundary pairs; both orderings of (x, x') are tried and the worse
    // one kept.
    {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> di(0, g.nx - 1);
        const int jmax = std::max(2, static_cast<int>(0.25 * g.ny));
        std::uniform_int_distribution<int> dj(1, jmax);
        std::uniform_int_distribution<int> step(-6, 6);
        double m = 0.0;
        for (int s = 0; s < 10000; ++s) {
            const int i1 = di(rng), j1 = dj(rng);
            int i2 = std::clamp(i1 + step(rng), 0, g.nx - 1);
            int j2 = std::clamp(j1 + step(rng), 1, g.ny - 1);
            if (i1 == i2 && j1 == j2) continue;
            const double dist = g.h * std::hypot(double(i1 - i2), double(j1 - j2));
            const auto G = [&](int i, int j) {
                return d22u1.at(i, j) - 4.0 * d22th.at(i, j) * std::log(g.x2(j));
            };
            const auto comp = [&](int ia, int ja, int ib, int jb) {
                const double corr = std::log(2.0 * dist + std::sqrt(4.0 * dist * dist +
                                                                    g.x2(ja) * g.x2(ja)));
                return std::abs(G(ia, ja) - G(ib, jb) +
                                4.0 * (d22th.at(ia, ja) - d22th.at(ib, jb)) * corr) /
                       std::pow(dist, beta);
            };
            m = std::max(m, std::max(comp(i1, j1, i2, j2), comp(i2, j2, i1, j1)));
        }
        r.u_log_pairs = m / c2b;
    }

    {
        double grad_inf = 0.0, g2 = 0.0, g2d1 = 0.0;
        for (const Field2D* comp : {&u.u1, &u.u2}) {
            grad_inf = std::max({grad_inf, derivative(*comp, 1, 0).max_abs(),
                                 derivative(*comp, 0, 1).max_abs()});
            for (auto [a1, a2] : {std::pair{2, 0}, {1, 1}, {0, 2}})
                g2 += std::pow(lp_norm(derivative(*comp, a1, a2), 2.0 * p), 2.0 * p);
            for (auto [a1, a2] : {std::pair{3, 0}, {2, 1}, {1, 2}})
                g2d1 += std::pow(lp_norm(derivative(*comp, a1, a2), p), p);
        }
        r.vel_reg = (grad_inf + std::pow(g2, 1.0 / (2.0 * p)) + std::pow(g2d1, 1.0 / p)) / w3p;
    }

    r.gm = ck_beta_norm(derivative(u.u1, 0, 1), 0, 0.9, 10000, seed) / c2b;

    {
        const Field2D f11_1 = derivative(u.u1, 2, 0), f12_1 = derivative(u.u1, 1, 1);
        const Field2D f11_2 = derivative(u.u2, 2, 0), f12_2 = derivative(u.u2, 1, 1);
        std::mt19937_64 rng(seed + 1);
        std::uniform_int_distribution<int> di(0, g.nx - 1), dj(0, g.ny - 1);
        std::uniform_int_distribution<int> step(-8, 8);
        double m = 0.0;
        for (int s = 0; s < 10000; ++s) {
            const int i1 = di(rng), j1 = dj(rng);
            const int i2 = std::clamp(i1 + step(rng), 0, g.nx - 1);
            const int j2 = std::clamp(j1 + step(rng), 0, g.ny - 1);
            if (i1 == i2 && j1 == j2) continue;
            const double dist = g.h * std::hypot(double(i1 - i2), double(j1 - j2));
            const double dv = std::hypot(std::hypot(f11_1.at(i1, j1) - f11_1.at(i2, j2),
                                                    f12_1.at(i1, j1) - f12_1.at(i2, j2)),
                                         std::hypot(f11_2.at(i1, j1) - f11_2.at(i2, j2),
                                                    f12_2.at(i1, j1) - f12_2.at(i2, j2)));
            m = std::max(m, dv / (dist * std::log(10.0 + 1.0 / dist)));
        }
        double lip = 0.0;
        for (auto [a1, a2] : {std::pair{3, 0}, {2, 1}, {1, 2}})
            lip = std::max(lip, derivative(theta.data, a1, a2).max_abs());
        r.log_lip = m / std::max(lip, 1e-300);
    }

    {
        const BoundaryTrace tr = boundary_trace(theta);
        std::vector<Vec2> targets;
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) targets.push_back({g.x1(i), g.x2(j)});
        const std::vector<double> H = h_operator(tr, targets, kernel.epsilon);
        Field2D x2H(g);
        std::size_t k = 0;
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i, ++k) x2H.at(i, j) = g.x2(j) * H[k];
        const Field2D d22 = derivative(theta.data, 0, 2);
        const double w1p = std::pow(std::pow(lp_norm(d22, p), p) +
                                        std::pow(lp_norm(derivative(d22, 1, 0), p), p) +
                                        std::pow(lp_norm(derivative(d22, 0, 1), p), p),
                                    1.0 / p);
        r.h2p = lp_norm(x2H, 2.0 * p) / w1p;
    }

    r.vel_sing = third_derivative_residual(theta, p, kernel).ratio;
    return r;
}

struct EstimateSuiteReport {
    EstimateRatios coarse;
    EstimateRatios fine;
    double worst_rel_change = 0.0;
    bool stable = false;  // every ratio moved by at most 50% under refinement
};

/// Renders each velocity estimate as a finite LHS/RHS ratio at two
/// resolutions; boundedness is asserted as refinement stability.
template <class DatumFn>
EstimateSuiteReport velocity_estimate_suite(DatumFn&& datum, const GridConfig& grid, double beta,
                                            double p, double eps_over_h, std::uint64_t seed = 42) {
    const GridConfig fine = grid.refined();
    const ScalarField tc = datum(grid.spec(), grid.L);
    const ScalarField tf = datum(fine.spec(), fine.L);
    EstimateSuiteReport rep;
    rep.coarse = velocity_estimate_ratios(tc, beta, p,
                                          {eps_over_h * grid.h, PvMode::mollified}, seed);
    rep.fine = velocity_estimate_ratios(tf, beta, p,
                                        {eps_over_h * fine.h, PvMode::mollified}, seed);
    const auto rel = [](double a, double b) {
        if (a == 0.0 && b == 0.0) return 0.0;
        return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
    };
    for (auto get : {&EstimateRatios::u_c2, &EstimateRatios::u_log1, &EstimateRatios::u_log_pairs,
                     &EstimateRatios::vel_reg, &EstimateRatios::gm, &EstimateRatios::log_lip,
                     &EstimateRatios::h2p, &EstimateRatios::vel_sing})
        rep.worst_rel_change = std::max(rep.worst_rel_change, rel(rep.coarse.*get, rep.fine.*get));
    rep.stable = rep.worst_rel_change <= 0.5;
    return rep;
}

}  // namespace sqg
