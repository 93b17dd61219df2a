// Experiment runner: certificates, equilibrium oracle, simulation and rate fits.

#include "aggnash/error.hpp"
#include "aggnash/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace aggnash;

struct Common {
    std::string config;
    std::string preset;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    bool force = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment config file (JSON)");
    cmd->add_option("--preset", c.preset, "named preset (see `presets`)");
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", c.seed, "override the config seed");
    cmd->add_flag("--force", c.force, "simulate even with inadmissible parameters");
}

ExperimentConfig resolve(const Common& c) {
    if (c.config.empty() == c.preset.empty()) {
        throw Error("cli", "give exactly one of --config or --preset");
    }
    ExperimentConfig cfg = c.preset.empty() ? load_config(c.config) : preset_config(c.preset);
    if (c.seed) {
        cfg.seed = *c.seed;
    }
    cfg.force = cfg.force || c.force;
    return cfg;
}

void print_certificate(const Certificate& cert) { std::cout << certificate_to_text(cert); }

int do_run(const Common& c) {
    const ExperimentConfig cfg = resolve(c);
    const ExperimentReport r = run_experiment(cfg, std::filesystem::path(c.out));
    print_certificate(r.certificate);
    if (r.ne) {
        std::printf("equilibrium: residual=%.3g iterations=%zu unique=%s\n", r.ne->best.residual,
                    r.ne->best.iterations, r.ne->unique ? "yes" : "no");
    }
    if (r.sim) {
        const SimMonitors& m = r.sim->monitors;
        std::printf("simulation: %s, final ||x - x*|| = %.3g\n", to_string(r.sim->status),
                    (r.sim->final_state.x - r.ne->best.x).norm());
        std::printf("monitors: feasibility=%.3g averaging_drift=%.3g theta_mean=%.3g\n",
                    m.max_feasibility_violation, m.max_averaging_drift, m.max_theta_mean);
    }
    if (r.fit) {
        std::printf("rate: omega_hat=%.4f R^2=%.4f window=[%.2f, %.2f] -> %s\n", r.fit->omega_hat,
                    r.fit->r_squared, r.fit->t_lo, r.fit->t_hi, to_string(r.comparison->verdict));
    } else if (!r.fit_error.empty()) {
        std::printf("rate: %s\n", r.fit_error.c_str());
    }
    for (const auto& note : r.notes) {
        std::printf("note: %s\n", note.c_str());
    }
    std::printf("artifacts written to %s\n", c.out.c_str());
    return r.monitors_ok ? 0 : 2;
}

int do_certify(const Common& c) {
    const ExperimentReport r = certify_only(resolve(c), std::filesystem::path(c.out));
    print_certificate(r.certificate);
    return 0;
}

int do_sweep(const Common& c) {
    const auto rows = sweep_beta_min(resolve(c), std::filesystem::path(c.out));
    std::printf("wrote %zu rows to %s/beta_min_curve.csv\n", rows.size(), c.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed Nash equilibrium seeking for aggregative games"};
    app.require_subcommand(1);

    Common run_opts, cert_opts, sweep_opts;
    auto* run = app.add_subcommand("run", "certify, solve, simulate and fit");
    add_common(run, run_opts);
    auto* certify = app.add_subcommand("certify", "compute the small-gain certificate only");
    add_common(certify, cert_opts);
    auto* sweep = app.add_subcommand("sweep", "beta_min(alpha) curve over the admissible alpha range");
    add_common(sweep, sweep_opts);
    auto* presets = app.add_subcommand("presets", "list presets");
    std::string show;
    presets->add_option("--show", show, "print the config of one preset");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return do_run(run_opts);
        }
        if (*certify) {
            return do_certify(cert_opts);
        }
        if (*sweep) {
            return do_sweep(sweep_opts);
        }
        if (*presets) {
            if (!show.empty()) {
                std::cout << preset_json(show);
                return 0;
            }
            for (const auto& name : preset_names()) {
                std::printf("%-34s %s\n", name.c_str(), preset_description(name).c_str());
            }
            return 0;
        }
    } catch (const std::exception& e) {
        // aggnash::Error messages already carry the module name.
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
