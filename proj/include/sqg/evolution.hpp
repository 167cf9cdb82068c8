#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/biot_savart.hpp"
#include "sqg/derivative.hpp"
#include "sqg/flow.hpp"
#include "sqg/grid.hpp"
#include "sqg/interpolate.hpp"
#include "sqg/norms.hpp"

namespace sqg {

struct TimeStepConfig {
    double cfl = 0.5;
    double t_end = 0.0;
    int snapshot_every = 10;
    // integrator: rk4, interpolation: cubic; the only implemented choices
};

inline void validate(const TimeStepConfig& c) {
    if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw std::invalid_argument("time: cfl must lie in (0,1]");
    if (c.t_end < 0.0) throw std::invalid_argument("time: t_end must be nonnegative");
    if (c.snapshot_every < 1) throw std::invalid_argument("time: snapshot_every must be positive");
}

struct SimulationState {
    ScalarField theta;
    double t = 0.0;
    double dt = 0.0;
    KernelParams params;
    std::vector<NormReport> history;
    long clamped_feet = 0;  // characteristic feet clamped back to x2 >= 0
};

struct AdvectStats {
    long clamped_feet = 0;
    double max_displacement = 0.0;
};

/// Semi-Lagrangian transport step: each node integrates its characteristic
/// backward with RK4 against the frozen sampler and picks up theta by cubic
/// interpolation at the foot. The boundary row is re-clamped, and the
/// support radius grows by at most max|u| dt plus one interpolation stencil.
inline AdvectStats advect(ScalarField& theta, double dt, const VelocityFn& vel, double umax) {
    if (!(dt > 0.0)) throw std::invalid_argument("advect: dt must be positive");
    const GridSpec& g = theta.spec();
    const Field2D old = theta.data;
    const double foot_tol = 1e-10;
    long clamped = 0;
    double max_disp = 0.0;
    const auto back = [&](Vec2 q) {
        Vec2 v = vel(q);
        return Vec2{-v.x1, -v.x2};
    };
#pragma omp parallel for schedule(static) reduction(+ : clamped) reduction(max : max_disp)
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 p{g.x1(i), g.x2(j)};
            Vec2 foot = detail::rk4_step(back, p, dt, false);
            if (foot.x2 < 0.0) {
                if (foot.x2 < -foot_tol) ++clamped;
                foot.x2 = 0.0;
            }
            max_disp = std::max(max_disp, norm(foot - p));
            theta.data.at(i, j) = interpolate(old, foot.x1, foot.x2);
        }
    }
    clamp_boundary_row(theta);
    const double budget = std::min({-g.x1_min, g.x1_max(), g.x2_max()}) - 4.0 * g.h;
    theta.support_radius = std::min(theta.support_radius + umax * dt + 2.0 * g.h, budget);
    return {clamped, max_disp};
}

inline double max_abs(const Field2D& a, const Field2D& b) {
    return std::max(a.max_abs(), b.max_abs());
}

/// Norm bundle recorded once per step.
inline NormReport record_norms(const ScalarField& theta, double t, const VelocityField* u,
                               std::uint64_t seed) {
    NormReport r;
    r.t = t;
    r.entries["l1"] = lp_norm(theta, 1.0);
    r.entries["l2"] = lp_norm(theta, 2.0);
    r.entries["l4"] = lp_norm(theta, 4.0);
    r.entries["linf"] = lp_norm(theta, std::numeric_limits<double>::infinity());
    r.entries["w2p_est"] = wkp_norm(theta, 2, 2.0);
    r.entries["w3p_est"] = wkp_norm(theta, 3, 2.0);
    r.entries["c2beta_est"] = ck_beta_norm(theta, 2, 0.5, 10000, seed);
    r.sup_w3inf_proxy = w3inf_proxy(theta.data);
    if (u) {
        r.entries["max_u"] = max_abs(u->u1, u->u2);
        double mg = 0.0;
        mg = std::max(mg, derivative(u->u1, 1, 0).max_abs());
        mg = std::max(mg, derivative(u->u1, 0, 1).max_abs());
        mg = std::max(mg, derivative(u->u2, 1, 0).max_abs());
        mg = std::max(mg, derivative(u->u2, 0, 1).max_abs());
        r.entries["max_grad_u"] = mg;
    } else {
        r.entries["max_u"] = 0.0;
        r.entries["max_grad_u"] = 0.0;
    }
    return r;
}

enum class RunStatus { ok, nan_halt, escape_halt };

struct RunResult {
    SimulationState state;
    FlowMap flow;
    std::vector<std::pair<double, ScalarField>> snapshots;
    RunStatus status = RunStatus::ok;
    std::string halt_reason;
};

/// Default tracer set: boundary markers, a polygon ring for area tracking,
/// and interior pairs for the bi-Lipschitz check.
inline FlowMap default_tracers(double L) {
    FlowMap map;
    const auto add = [&](std::string label, double x1, double x2, bool bdry) {
        map.tracers.push_back({std::move(label), {x1, x2}, {x1, x2}, bdry});
    };
    add("boundary:0", -0.5 * L, 0.0, true);
    add("boundary:1", 0.0, 0.0, true);
    add("boundary:2", 0.5 * L, 0.0, true);
    const int nring = 32;
    for (int k = 0; k < nring; ++k) {
        const double a = 2.0 * std::numbers::pi * k / nring;
        add("ring:" + std::to_string(k), 0.25 * L * std::cos(a), 0.45 * L + 0.25 * L * std::sin(a),
            false);
    }
    const double d = 0.05 * L;
    int p = 0;
    for (const Vec2 base : {Vec2{0.1 * L, 0.3 * L}, Vec2{-0.2 * L, 0.5 * L}, Vec2{0.0, 0.6 * L}}) {
        add("pair:" + std::to_string(p) + ":a", base.x1, base.x2, false);
        add("pair:" + std::to_string(p) + ":b", base.x1 + d, base.x2 + d, false);
        ++p;
    }
    return map;
}

using StepObserver =
    std::function<void(const SimulationState&, const VelocityField&, const FlowMap&)>;

/// Full measurement loop: velocity synthesis, CFL step control, tracer
/// advance, semi-Lagrangian transport, and norm recording. Halts on NaN or
/// on a tracer leaving the grid, keeping the last good state. The observer,
/// when set, fires after every completed step with the frozen velocity used
/// during it.
inline RunResult run_observed(const TimeStepConfig& config, const ScalarField& initial,
                              const KernelParams& kernel, std::uint64_t seed,
                              std::optional<FlowMap> tracers, const StepObserver& on_step) {
    validate(config);
    validate(initial);
    RunResult res;
    res.state.theta = initial;
    res.state.params = kernel;
    res.flow = tracers ? std::move(*tracers) : default_tracers(initial.support_radius);
    res.snapshots.emplace_back(0.0, initial);

    const double tiny = 1e-12;
    long step = 0;
    double t = 0.0;
    {
        const VelocityField u0 = velocity(res.state.theta, kernel);
        res.state.history.push_back(record_norms(res.state.theta, 0.0, &u0, seed));
    }
    while (t < config.t_end - 1e-14) {
        const VelocityField u = velocity(res.state.theta, kernel);
        const double umax = max_abs(u.u1, u.u2);
        const double dt = std::min(config.cfl * res.state.theta.h() / std::max(umax, tiny),
                                   config.t_end - t);
        const GridVelocitySampler sampler{&u};
        res.flow = step_flow(res.flow, sampler, dt);
        if (any_escaped(res.flow, initial.spec())) {
            res.status = RunStatus::escape_halt;
            res.halt_reason = "tracer left the grid extent at t=" + std::to_string(t + dt);
            break;
        }
        const AdvectStats st = advect(res.state.theta, dt, sampler, umax);
        res.state.clamped_feet += st.clamped_feet;
        t += dt;
        ++step;
        res.state.t = t;
        res.state.dt = dt;
        if (!res.state.theta.data.all_finite()) {
            res.status = RunStatus::nan_halt;
            res.halt_reason = "non-finite field at t=" + std::to_string(t);
            break;
        }
        res.state.history.push_back(record_norms(res.state.theta, t, &u, seed));
        if (on_step) on_step(res.state, u, res.flow);
        if (step % config.snapshot_every == 0 || t >= config.t_end - 1e-14)
            res.snapshots.emplace_back(t, res.state.theta);
    }
    res.flow.t = res.state.t;
    return res;
}

inline RunResult run(const TimeStepConfig& config, const ScalarField& initial,
                     const KernelParams& kernel, std::uint64_t seed = 42,
                     std::optional<FlowMap> tracers = std::nullopt) {
    return run_observed(config, initial, kernel, seed, std::move(tracers), {});
}

struct GrowthAudit {
    double c = 0.0;
    double horizon = std::numeric_limits<double>::infinity();
    int envelope_violations = 0;
};

/// Fits c in the Riccati envelope N(t) <= N(0)/(1 - c N(0) t) from a norm
/// time series: least squares on inverse values, tightened so the envelope
/// holds at every sample. Violations of monotonicity along the way are
/// counted, not fatal.
inline GrowthAudit norm_growth_audit(const std::vector<NormReport>& history,
                                     const std::string& key) {
    if (history.size() < 10)
        throw std::invalid_argument("norm_growth_audit: need at least 10 samples");
    const double n0 = history.front().entries.at(key);
    if (!(n0 > 0.0)) throw std::invalid_argument("norm_growth_audit: N(0) must be positive");
    std::vector<double> ts, inv;
    for (const NormReport& r : history) {
        ts.push_back(r.t);
        inv.push_back(1.0 / r.entries.at(key));
    }
    const LinearFit f = fit_line(ts, inv);
    double c = std::max(0.0, -f.slope / n0);
    // tighten so that N(t) <= N0 / (1 - c N0 t) at every recorded sample
    for (std::size_t k = 1; k < ts.size(); ++k) {
        if (ts[k] <= 0.0) continue;
        const double nk = 1.0 / inv[k];
        const double ck = (1.0 - n0 / nk) / (n0 * ts[k]);
        c = std::max(c, ck);
    }
    GrowthAudit a;
    a.c = c;
    a.horizon = c > 0.0 ? 1.0 / (c * n0) : std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const double denom = 1.0 - a.c * n0 * ts[k];
        if (denom <= 0.0) continue;  // past the horizon the envelope is vacuous
        if (1.0 / inv[k] > (n0 / denom) * (1.0 + 1e-9)) ++a.envelope_violations;
    }
    return a;
}

}  // namespace sqg
