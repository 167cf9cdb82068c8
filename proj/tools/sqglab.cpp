// sqglab: half-plane SQG laboratory. Subcommands: simulate, verify-kernels,
// illposedness, lemma-suite. Configuration is a JSON file plus flat dotted
// flag overrides; every run writes effective_config.json and report.json
// into the output directory.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sqg/config.hpp"
#include "sqg/scenarios.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sqg::ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for inviscid SQG on the half-plane"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    const auto add_override = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                                  const std::string& help) {
        sub->add_option_function<std::string>(
               flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
               help);
    };

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        add_override(sub, "--out", "out_dir", "output directory");
        add_override(sub, "--seed", "seed", "RNG seed for pair sampling");
        for (const std::string key :
             {"grid.h", "grid.L", "grid.margin", "kernel.epsilon_over_h", "time.cfl", "time.t_end",
              "time.snapshot_every", "initial.kind", "initial.A", "initial.B", "initial.r0",
              "probes.x1", "probes.x2_min", "probes.x2_max", "probes.count"})
            add_override(sub, "--" + key, key, "override config key " + key);
    };

    CLI::App* sim = app.add_subcommand("simulate", "nonlinear transport run");
    add_common(sim);
    CLI::App* ver = app.add_subcommand("verify-kernels", "kernel and identity checks");
    add_common(ver);
    CLI::App* ill = app.add_subcommand("illposedness", "Theorem-2 difference-quotient experiment");
    add_common(ill);
    add_override(ill, "--A", "illposedness.A", "coefficient of x1 x2");
    add_override(ill, "--B", "illposedness.B", "coefficient of x2^2");
    add_override(ill, "--r0", "illposedness.r0", "model region radius");
    add_override(ill, "--tstar", "illposedness.t_star", "measurement time");
    add_override(ill, "--x2-min", "illposedness.x2_min", "smallest probe height");
    add_override(ill, "--x2-max", "illposedness.x2_max", "largest probe height");
    add_override(ill, "--probes", "illposedness.probes", "number of probes");
    CLI::App* lem = app.add_subcommand("lemma-suite", "extension and velocity estimate suites");
    add_common(lem);

    CLI11_PARSE(app, argc, argv);

    try {
        std::string body;
        if (!config_path.empty()) body = slurp(config_path);
        for (CLI::App* sub : {sim, ver, ill, lem})
            if (sub->parsed()) overrides.emplace_back("scenario", sub->get_name());
        const sqg::RunConfig cfg = sqg::parse_config(body, overrides);
        return sqg::dispatch(cfg);
    } catch (const sqg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return sqg::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sqg::exit_numerical_halt;
    }
}
