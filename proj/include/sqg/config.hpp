#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqg/grid.hpp"

namespace sqg {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full run description. JSON file plus flat dotted flag overrides; unknown
/// keys are rejected by name.
struct RunConfig {
    std::string scenario = "simulate";
    GridConfig grid;  // h = 1/128, L = 1, margin = 0.25
    struct Kernel {
        double epsilon_over_h = 2.0;
    } kernel;
    struct Time {
        double cfl = 0.5;
        double t_end = 0.5;
        int snapshot_every = 10;
    } time;
    struct Initial {
        std::string kind = "gaussian_xy";
        double A = 1.0;
        double B = 1.0;
        double r0 = 0.25;
    } initial;
    struct Illposedness {
        double A = 1.0;
        double B = 1.0;
        double r0 = 0.4;
        double t_star = 0.02;
        double x2_min = 1.0 / 512;
        double x2_max = 1.0 / 16;
        int probes = 6;
        double cfl = 1.0;
        double epsilon_over_h = 0.25;
    } illposedness;
    struct Probes {
        double x1 = 0.0;
        double x2_min = 0.0;  // 0 means 4h
        double x2_max = 0.0;  // 0 means L/4
        int count = 12;
    } probes;
    std::uint64_t seed = 42;
    std::string out_dir = "out";

    json to_json() const {
        json j;
        j["scenario"] = scenario;
        j["grid"] = {{"h", grid.h}, {"L", grid.L}, {"margin", grid.margin}};
        j["kernel"] = {{"epsilon_over_h", kernel.epsilon_over_h}};
        j["time"] = {{"cfl", time.cfl}, {"t_end", time.t_end},
                     {"snapshot_every", time.snapshot_every}};
        j["initial"] = {{"kind", initial.kind}, {"A", initial.A}, {"B", initial.B},
                        {"r0", initial.r0}};
        j["illposedness"] = {{"A", illposedness.A},
                             {"B", illposedness.B},
                             {"r0", illposedness.r0},
                             {"t_star", illposedness.t_star},
                             {"x2_min", illposedness.x2_min},
                             {"x2_max", illposedness.x2_max},
                             {"probes", illposedness.probes},
                             {"cfl", illposedness.cfl},
                             {"epsilon_over_h", illposedness.epsilon_over_h}};
        j["probes"] = {{"x1", probes.x1}, {"x2_min", probes.x2_min}, {"x2_max", probes.x2_max},
                       {"count", probes.count}};
        j["seed"] = seed;
        j["out_dir"] = out_dir;
        return j;
    }
};

namespace detail {

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "scenario",          "grid.h",
        "grid.L",            "grid.margin",
        "kernel.epsilon_over_h",
        "time.cfl",          "time.t_end",
        "time.snapshot_every",
        "initial.kind",      "initial.A",
        "initial.B",         "initial.r0",
        "illposedness.A",    "illposedness.B",
        "illposedness.r0",   "illposedness.t_star",
        "illposedness.x2_min", "illposedness.x2_max",
        "illposedness.probes", "illposedness.cfl",
        "illposedness.epsilon_over_h",
        "probes.x1",         "probes.x2_min",
        "probes.x2_max",     "probes.count",
        "seed",              "out_dir",
    };
    return keys;
}

inline void apply_key(RunConfig& c, const std::string& key, const json& v) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key: " + key);
    try {
        if (key == "scenario") c.scenario = v.get<std::string>();
        else if (key == "grid.h") c.grid.h = v.get<double>();
        else if (key == "grid.L") c.grid.L = v.get<double>();
        else if (key == "grid.margin") c.grid.margin = v.get<double>();
        else if (key == "kernel.epsilon_over_h") c.kernel.epsilon_over_h = v.get<double>();
        else if (key == "time.cfl") c.time.cfl = v.get<double>();
        else if (key == "time.t_end") c.time.t_end = v.get<double>();
        else if (key == "time.snapshot_every") c.time.snapshot_every = v.get<int>();
        else if (key == "initial.kind") c.initial.kind = v.get<std::string>();
        else if (key == "initial.A") c.initial.A = v.get<double>();
        else if (key == "initial.B") c.initial.B = v.get<double>();
        else if (key == "initial.r0") c.initial.r0 = v.get<double>();
        else if (key == "illposedness.A") c.illposedness.A = v.get<double>();
        else if (key == "illposedness.B") c.illposedness.B = v.get<double>();
        else if (key == "illposedness.r0") c.illposedness.r0 = v.get<double>();
        else if (key == "illposedness.t_star") c.illposedness.t_star = v.get<double>();
        else if (key == "illposedness.x2_min") c.illposedness.x2_min = v.get<double>();
        else if (key == "illposedness.x2_max") c.illposedness.x2_max = v.get<double>();
        else if (key == "illposedness.probes") c.illposedness.probes = v.get<int>();
        else if (key == "illposedness.cfl") c.illposedness.cfl = v.get<double>();
        else if (key == "illposedness.epsilon_over_h")
            c.illposedness.epsilon_over_h = v.get<double>();
        else if (key == "probes.x1") c.probes.x1 = v.get<double>();
        else if (key == "probes.x2_min") c.probes.x2_min = v.get<double>();
        else if (key == "probes.x2_max") c.probes.x2_max = v.get<double>();
        else if (key == "probes.count") c.probes.count = v.get<int>();
        else if (key == "seed") c.seed = v.get<std::uint64_t>();
        else if (key == "out_dir") c.out_dir = v.get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for key '" + key + "': " + e.what());
    }
}

}  // namespace detail

inline void validate(const RunConfig& c) {
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string("config: ") + name + " must be positive");
    };
    positive(c.grid.h, "grid.h");
    positive(c.grid.L, "grid.L");
    positive(c.grid.margin, "grid.margin");
    if (c.grid.margin < 4.0 * c.grid.h) throw ConfigError("config: grid.margin must be >= 4h");
    positive(c.kernel.epsilon_over_h, "kernel.epsilon_over_h");
    if (!(c.time.cfl > 0.0 && c.time.cfl <= 1.0)) throw ConfigError("config: time.cfl must lie in (0,1]");
    if (c.time.t_end < 0.0) throw ConfigError("config: time.t_end must be nonnegative");
    if (c.time.snapshot_every < 1) throw ConfigError("config: time.snapshot_every must be >= 1");
    positive(c.initial.r0, "initial.r0");
    if (c.scenario != "simulate" && c.scenario != "verify-kernels" && c.scenario != "illposedness" &&
        c.scenario != "lemma-suite")
        throw ConfigError("config: unknown scenario '" + c.scenario + "'");
}

/// Parses a JSON config body (possibly empty) and applies dotted overrides
/// on top. Flag overrides win over file values.
inline RunConfig parse_config(const std::string& json_text,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig c;
    if (!json_text.empty()) {
        json j;
        try {
            j = json::parse(json_text);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed JSON config: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("config root must be a JSON object");
        for (const auto& [section, value] : j.items()) {
            if (value.is_object()) {
                for (const auto& [key, v] : value.items())
                    detail::apply_key(c, section + "." + key, v);
            } else {
                detail::apply_key(c, section, value);
            }
        }
    }
    for (const auto& [key, text] : overrides) {
        json v;
        try {
            v = json::parse(text);
        } catch (const json::exception&) {
            v = text;  // bare strings (e.g. initial.kind values) stay strings
        }
        detail::apply_key(c, key, v);
    }
    validate(c);
    return c;
}

}  // namespace sqg
