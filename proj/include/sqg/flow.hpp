#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sqg/biot_savart.hpp"
#include "sqg/grid.hpp"
#include "sqg/interpolate.hpp"

namespace sqg {

struct Tracer {
    std::string label;
    Vec2 initial;
    Vec2 pos;
    bool boundary = false;  // pinned to x2 = 0: u2 vanishes there
};

struct FlowMap {
    std::vector<Tracer> tracers;
    double t = 0.0;
};

using VelocityFn = std::function<Vec2(Vec2)>;

/// Bicubic sampler over a frozen gridded velocity. Points are clamped onto
/// the grid box; escape detection is the caller's job.
struct GridVelocitySampler {
    const VelocityField* field;

    Vec2 operator()(Vec2 p) const {
        return {interpolate(field->u1, p.x1, p.x2), interpolate(field->u2, p.x1, p.x2)};
    }
};

namespace detail {

inline Vec2 rk4_step(const VelocityFn& vel, Vec2 p, double dt, bool boundary) {
    const auto f = [&](Vec2 q) {
        Vec2 v = vel(q);
        if (boundary) v.x2 = 0.0;
        return v;
    };
    const Vec2 k1 = f(p);
    const Vec2 k2 = f(p + 0.5 * dt * k1);
    const Vec2 k3 = f(p + 0.5 * dt * k2);
    const Vec2 k4 = f(p + dt * k3);
    Vec2 out = p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (boundary) out.x2 = 0.0;
    return out;
}

}  // namespace detail

/// One classical RK4 update of every tracer against a frozen sampler.
inline FlowMap step_flow(const FlowMap& map, const VelocityFn& vel, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_flow: dt must be positive");
    FlowMap out = map;
    for (Tracer& tr : out.tracers) tr.pos = detail::rk4_step(vel, tr.pos, dt, tr.boundary);
    out.t = map.t + dt;
    return out;
}

/// True if any tracer left the closed grid box.
inline bool any_escaped(const FlowMap& map, const GridSpec& g) {
    for (const Tracer& tr : map.tracers) {
        if (tr.pos.x1 < g.x1_min || tr.pos.x1 > g.x1_max() || tr.pos.x2 < 0.0 ||
            tr.pos.x2 > g.x2_max())
            return true;
    }
    return false;
}

}  // namespace sqg
