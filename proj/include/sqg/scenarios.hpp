#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "sqg/biot_savart.hpp"
#include "sqg/config.hpp"
#include "sqg/diagnostics.hpp"
#include "sqg/evolution.hpp"
#include "sqg/initial_data.hpp"
#include "sqg/io.hpp"

namespace sqg {

// Exit-code contract: 0 success, 1 config error, 2 verification failure,
// 3 numerical halt.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_verification_failure = 2;
inline constexpr int exit_numerical_halt = 3;

namespace detail {

inline double polygon_area(const std::vector<Vec2>& p) {
    double a = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Vec2& u = p[k];
        const Vec2& v = p[(k + 1) % p.size()];
        a += u.x1 * v.x2 - v.x1 * u.x2;
    }
    return 0.5 * std::abs(a);
}

inline std::vector<Vec2> ring_positions(const FlowMap& map, bool initial) {
    std::vector<Vec2> out;
    for (const Tracer& tr : map.tracers)
        if (tr.label.rfind("ring:", 0) == 0) out.push_back(initial ? tr.initial : tr.pos);
    return out;
}

// Left-rule integral of max|grad u| against the step lengths; exact for the
// per-step frozen velocity the integrator actually used.
inline double integral_max_grad_u(const std::vector<NormReport>& history) {
    double acc = 0.0;
    for (std::size_t k = 1; k < history.size(); ++k)
        acc += (history[k].t - history[k - 1].t) * history[k].entries.at("max_grad_u");
    return acc;
}

struct BiLipCheck {
    double worst_excess = 0.0;  // how far any pair ratio exceeded the envelope
    bool ok = true;
};

inline BiLipCheck bi_lipschitz_check(const FlowMap& map, double integral, double tol = 1e-3) {
    BiLipCheck res;
    const double lo = std::exp(-integral), hi = std::exp(integral);
    for (std::size_t k = 0; k < map.tracers.size(); ++k) {
        const Tracer& a = map.tracers[k];
        if (a.label.rfind("pair:", 0) != 0 || a.label.back() != 'a') continue;
        const std::string mate = a.label.substr(0, a.label.size() - 1) + "b";
        for (const Tracer& b : map.tracers) {
            if (b.label != mate) continue;
            const double ratio = norm(a.pos - b.pos) / norm(a.initial - b.initial);
            const double excess = std::max(lo - tol - ratio, ratio - hi - tol);
            res.worst_excess = std::max(res.worst_excess, excess);
            if (excess > 0.0) res.ok = false;
        }
    }
    return res;
}

inline void write_norm_csv(const std::filesystem::path& path,
                           const std::vector<NormReport>& history) {
    CsvLineWriter w(path);
    w.line("t,l1,l2,l4,linf,w2p_est,w3p_est,c2beta_est,max_u");
    for (const NormReport& r : history) {
        std::ostringstream row;
        row << fmt_full(r.t);
        for (const char* key : {"l1", "l2", "l4", "linf", "w2p_est", "w3p_est", "c2beta_est",
                                "max_u"})
            row << ',' << fmt_full(r.entries.at(key));
        w.line(row.str());
    }
}

inline json run_status_json(RunStatus s, const std::string& reason) {
    json j;
    j["status"] = s == RunStatus::ok ? "ok" : (s == RunStatus::nan_halt ? "nan_halt" : "escape_halt");
    if (s != RunStatus::ok) j["halt_reason"] = reason;
    return j;
}

}  // namespace detail

inline int run_simulate(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path out(cfg.out_dir);
    const GridSpec g = cfg.grid.spec();
    const ScalarField theta0 =
        make_initial(cfg.initial.kind, g, cfg.grid.L, cfg.initial.A, cfg.initial.B, cfg.initial.r0);
    const KernelParams kernel{cfg.kernel.epsilon_over_h * cfg.grid.h, PvMode::mollified};
    TimeStepConfig tcfg;
    tcfg.cfl = cfg.time.cfl;
    tcfg.t_end = cfg.time.t_end;
    tcfg.snapshot_every = cfg.time.snapshot_every;

    const RunResult res = run(tcfg, theta0, kernel, cfg.seed);

    detail::write_norm_csv(out / "norms.csv", res.state.history);
    int snap_id = 0;
    for (const auto& [t, field] : res.snapshots)
        write_snapshot_csv(out / ("snapshot_" + std::to_string(snap_id++) + ".csv"), field, t);

    json rep = detail::run_status_json(res.status, res.halt_reason);
    rep["t_final"] = res.state.t;
    rep["steps"] = res.state.history.size() - 1;
    rep["clamped_feet"] = res.state.clamped_feet;
    const auto& first = res.state.history.front().entries;
    const auto& last = res.state.history.back().entries;
    json drift;
    for (const char* key : {"l1", "l2", "l4", "linf"}) {
        const double a = first.at(key), b = last.at(key);
        drift[key] = a > 0.0 ? std::abs(b - a) / a : 0.0;
    }
    rep["lp_drift"] = drift;
    const double integral = detail::integral_max_grad_u(res.state.history);
    const detail::BiLipCheck bl = detail::bi_lipschitz_check(res.flow, integral);
    rep["flow"] = {{"grad_u_integral", integral},
                   {"bi_lipschitz_ok", bl.ok},
                   {"bi_lipschitz_excess", bl.worst_excess}};
    const auto ring0 = detail::ring_positions(res.flow, true);
    const auto ring1 = detail::ring_positions(res.flow, false);
    if (!ring0.empty() && res.state.t > 0.0) {
        const double a0 = detail::polygon_area(ring0), a1 = detail::polygon_area(ring1);
        rep["flow"]["area_drift_per_time"] = std::abs(a1 - a0) / a0 / res.state.t;
    }
    if (res.state.history.size() >= 10) {
        const GrowthAudit audit = norm_growth_audit(res.state.history, "w3p_est");
        rep["growth_audit"] = {{"c", audit.c},
                               {"horizon", std::isfinite(audit.horizon) ? json(audit.horizon)
                                                                        : json("inf")},
                               {"envelope_violations", audit.envelope_violations}};
    }
    write_text_file(out / "report.json", rep.dump(2) + "\n");
    return res.status == RunStatus::ok ? exit_ok : exit_numerical_halt;
}

inline int run_verify_kernels(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path out(cfg.out_dir);
    json rep;
    bool pass = true;

    const GridSpec g = cfg.grid.spec();
    const double L = cfg.grid.L;
    const KernelParams kernel{cfg.kernel.epsilon_over_h * cfg.grid.h, PvMode::mollified};

    // slip on the boundary row, raw kernel sums (no forcing)
    {
        const ScalarField theta = gaussian_xy_datum(g, L, 1.0, 0.25 * L);
        std::vector<double> x1s;
        for (int i = 0; i < g.nx; i += 2) x1s.push_back(g.x1(i));
        const double slip = raw_boundary_slip(theta, kernel, x1s);
        rep["slip_max"] = slip;
        rep["slip_bound"] = 1e-12 * theta.data.max_abs();
        pass = pass && slip <= 1e-12 * theta.data.max_abs();
    }

    // discrete divergence rate under refinement at fixed epsilon
    {
        const KernelParams fixed_eps = kernel;
        const auto div_l2 = [&](const GridConfig& gc) {
            const ScalarField th = gaussian_xy_datum(gc.spec(), gc.L, 1.0, 0.25 * gc.L);
            const VelocityField u = velocity(th, fixed_eps);
            const Field2D d1 = derivative(u.u1, 1, 0);
            const Field2D d2 = derivative(u.u2, 0, 1);
            Field2D div(u.spec());
            for (int j = 0; j < u.spec().ny; ++j)
                for (int i = 0; i < u.spec().nx; ++i) div.at(i, j) = d1.at(i, j) + d2.at(i, j);
            return lp_norm(div, 2.0);
        };
        const double coarse = div_l2(cfg.grid);
        const double fine = div_l2(cfg.grid.refined());
        rep["div_l2_coarse"] = coarse;
        rep["div_l2_fine"] = fine;
        rep["div_rate"] = std::log2(coarse / fine);
        pass = pass && coarse / fine >= 3.5;
    }

    // closed-form log identity at the four corner cases
    {
        json cases = json::array();
        double worst = 0.0;
        for (double Lc : {1.0, 1e-3})
            for (double x2 : {1.0, 1e-6}) {
                const LogIdentityResult r = log_identity_check(Lc, 0.0, x2);
                cases.push_back({{"L", Lc}, {"x2", x2}, {"lhs", r.lhs}, {"rhs", r.rhs},
                                 {"gap", r.gap}});
                worst = std::max(worst, r.gap);
            }
        rep["log_identity_cases"] = cases;
        rep["log_identity_gap"] = worst;
        pass = pass && worst <= 1e-10;
    }

    // H operator against the closed-form antiderivative s/(x2^2 sqrt(s^2+x2^2))
    {
        json checks = json::array();
        const auto unit_trace = [](double a, double dx) {
            BoundaryTrace tr;
            tr.h = dx;
            const int n = static_cast<int>(std::round(2.0 * a / dx)) + 1;
            tr.x1_min = -a;
            tr.values.assign(n, 1.0);
            return tr;
        };
        const BoundaryTrace t1 = unit_trace(1.0, 1.0 / 512);
        const double v1 = h_operator(t1, {{0.0, 1.0}}, 0.0)[0];
        const double want1 = std::sqrt(2.0);
        checks.push_back({{"name", "trace on [-1,1], target (0,1)"}, {"value", v1},
                          {"expected", want1}, {"rel_err", std::abs(v1 - want1) / want1}});
        pass = pass && std::abs(v1 - want1) / want1 <= 1e-5;

        const BoundaryTrace t2 = unit_trace(1000.0, 0.01);
        const double v2 = h_operator(t2, {{0.0, 1.0}}, 0.0)[0];
        checks.push_back({{"name", "wide trace limit 2/x2"}, {"value", v2}, {"expected", 2.0},
                          {"rel_err", std::abs(v2 - 2.0) / 2.0}});
        pass = pass && std::abs(v2 - 2.0) <= 1e-5 * 2.0;
        rep["h_operator_checks"] = checks;
    }

    // log-coefficient extraction on the x2^2 datum
    {
        const ScalarField theta = x2sq_datum(g, L);
        const double x2_min = cfg.probes.x2_min > 0.0 ? cfg.probes.x2_min : 4.0 * cfg.grid.h;
        const double x2_max = cfg.probes.x2_max > 0.0 ? cfg.probes.x2_max : L / 4.0;
        const std::vector<double> probes = geometric_probes(x2_min, x2_max, cfg.probes.count);
        const SingularFit fit = singular_decomposition(theta, kernel, cfg.probes.x1, probes);
        rep["log_slope_fit"] = {{"slope", fit.slope},
                                {"expected", fit.expected_slope},
                                {"intercept", fit.intercept},
                                {"remainder_bound", fit.remainder_bound}};
        pass = pass && std::abs(fit.slope - fit.expected_slope) <=
                           0.10 * std::abs(fit.expected_slope);
    }

    // vel-sing residual ratios for two data at two resolutions
    {
        json ratios = json::array();
        for (const char* name : {"x2sq", "x2cube"}) {
            double vals[2];
            int k = 0;
            for (const GridConfig gc : {cfg.grid, cfg.grid.refined()}) {
                const ScalarField th = std::string(name) == "x2sq" ? x2sq_datum(gc.spec(), gc.L)
                                                                   : x2cube_datum(gc.spec(), gc.L);
                const KernelParams kp{cfg.kernel.epsilon_over_h * gc.h, PvMode::mollified};
                const ResidualRatio rr = third_derivative_residual(th, 2.0, kp);
                vals[k++] = rr.ratio;
                ratios.push_back({{"datum", name}, {"h", gc.h}, {"ratio", rr.ratio},
                                  {"degenerate", rr.degenerate}});
            }
            const double lo = std::min(vals[0], vals[1]), hi = std::max(vals[0], vals[1]);
            pass = pass && lo > 0.0 && hi / lo <= 2.0;
        }
        rep["residual_ratios"] = ratios;
    }

    rep["pass"] = pass;
    write_text_file(out / "report.json", rep.dump(2) + "\n");
    return pass ? exit_ok : exit_verification_failure;
}

inline int run_illposedness(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path out(cfg.out_dir);
    IllposednessConfig icfg;
    icfg.A = cfg.illposedness.A;
    icfg.B = cfg.illposedness.B;
    icfg.r0 = cfg.illposedness.r0;
    icfg.t_star = cfg.illposedness.t_star;
    icfg.x2_probes =
        geometric_probes(cfg.illposedness.x2_min, cfg.illposedness.x2_max, cfg.illposedness.probes);
    icfg.x1_probe = cfg.illposedness.x2_min;
    TimeStepConfig sim;
    sim.cfl = cfg.illposedness.cfl;
    sim.snapshot_every = 1000000;
    const KernelParams kernel{cfg.illposedness.epsilon_over_h * cfg.grid.h, PvMode::mollified};

    const SlopeReport rep = illposedness_experiment(icfg, cfg.grid, sim, kernel, cfg.seed);

    {
        CsvLineWriter w(out / "q_vs_logx2.csv");
        w.line("x2,log_inv_x2,Q,flagged");
        for (std::size_t k = 0; k < rep.probe_x2.size(); ++k) {
            const bool flagged = std::find(rep.flagged_probes.begin(), rep.flagged_probes.end(),
                                           int(k)) != rep.flagged_probes.end();
            std::ostringstream row;
            row << fmt_full(rep.probe_x2[k]) << ',' << fmt_full(std::log(1.0 / rep.probe_x2[k]))
                << ',' << fmt_full(rep.q[k]) << ',' << (flagged ? 1 : 0);
            w.line(row.str());
        }
    }

    json j = detail::run_status_json(rep.status, "");
    j["slope"] = rep.slope;
    j["intercept"] = rep.intercept;
    j["residual"] = rep.residual;
    j["r_squared"] = rep.r_squared;
    json viol = json::array();
    for (const BoundViolation& v : rep.violations)
        viol.push_back({{"probe", v.probe}, {"t", v.t}, {"quantity", v.quantity},
                        {"value", v.value}, {"bound", v.bound}});
    j["violations"] = viol;
    j["certified"] = rep.certified;
    j["certified_box"] = {{"t_max", rep.certified_t_max},
                          {"x2_min", rep.certified_x2_min},
                          {"x2_max", rep.certified_x2_max}};
    write_text_file(out / "report.json", j.dump(2) + "\n");
    return rep.status == RunStatus::ok ? exit_ok : exit_numerical_halt;
}

inline int run_lemma_suite(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path out(cfg.out_dir);
    bool pass = true;
    json rep;

    const ExtensionLemmaReport ext = extension_lemma_suite(cfg.grid, 20, 0.5, cfg.seed);
    json comms = json::array();
    double worst_comm = 0.0;
    for (const CommutatorReport& c : ext.commutators) {
        comms.push_back({{"identity", c.identity}, {"parity_gap", c.parity_gap},
                         {"interior_gap", c.interior_gap}, {"seam_gap", c.seam_gap}});
        worst_comm = std::max({worst_comm, c.parity_gap, c.interior_gap});
    }
    rep["commutators"] = comms;
    rep["worst_commutator"] = worst_comm;
    pass = pass && worst_comm <= 1e-10;
    rep["holder_ratios"] = ext.holder_ratios;
    rep["worst_holder_ratio"] = ext.worst_holder_ratio;
    pass = pass && ext.worst_holder_ratio <= 4.0;
    rep["l2_doubling_ratio"] = ext.l2_doubling_ratio;
    pass = pass && std::abs(ext.l2_doubling_ratio - std::sqrt(2.0)) <= 1e-6;

    const auto datum = [&](const GridSpec& gs, double L) {
        return gaussian_xy_datum(gs, L, 1.0, 0.25 * L);
    };
    const EstimateSuiteReport est =
        velocity_estimate_suite(datum, cfg.grid, 0.5, 2.0, cfg.kernel.epsilon_over_h, cfg.seed);
    const auto ratios_json = [](const EstimateRatios& r) {
        return json{{"h", r.h},         {"u_c2", r.u_c2},       {"u_log1", r.u_log1},
                    {"u_log_pairs", r.u_log_pairs}, {"vel_reg", r.vel_reg}, {"gm", r.gm},
                    {"log_lip", r.log_lip},         {"h2p", r.h2p},         {"vel_sing", r.vel_sing},
                    {"degenerate", r.degenerate}};
    };
    rep["velocity_estimates"] = {{"coarse", ratios_json(est.coarse)},
                                 {"fine", ratios_json(est.fine)},
                                 {"worst_rel_change", est.worst_rel_change},
                                 {"stable", est.stable}};
    pass = pass && est.stable && !est.coarse.degenerate && !est.fine.degenerate;

    rep["pass"] = pass;
    write_text_file(out / "report.json", rep.dump(2) + "\n");
    return pass ? exit_ok : exit_verification_failure;
}

/// Runs the configured scenario; always writes effective_config.json first
/// so a crashed run still records what it attempted.
inline int dispatch(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    write_text_file(fs::path(cfg.out_dir) / "effective_config.json", cfg.to_json().dump(2) + "\n");
    if (cfg.scenario == "simulate") return run_simulate(cfg);
    if (cfg.scenario == "verify-kernels") return run_verify_kernels(cfg);
    if (cfg.scenario == "illposedness") return run_illposedness(cfg);
    if (cfg.scenario == "lemma-suite") return run_lemma_suite(cfg);
    throw ConfigError("unknown scenario: " + cfg.scenario);
}

}  // namespace sqg
