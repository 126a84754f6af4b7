#include "piston/analysis.hpp"
#include "piston/circuit.hpp"
#include "piston/config.hpp"
#include "piston/model.hpp"
#include "piston/output.hpp"
#include "piston/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using piston::output::format_double;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out_dir = "out";
    std::optional<double> seed;
    std::optional<double> n_traj;
    std::optional<double> dt;
    std::optional<double> t_end;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool sim_flags = false) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--preset", o.preset, "named preset (fig2b|fig2c|fig2d|fig3)");
    cmd->add_option("--out", o.out_dir, "output directory");
    if (sim_flags) {
        cmd->add_option("--seed", o.seed, "RNG seed");
        cmd->add_option("--n-traj", o.n_traj, "ensemble size");
        cmd->add_option("--dt", o.dt, "integration step (1/kappa_C)");
        cmd->add_option("--t-end", o.t_end, "simulated time (1/kappa_C)");
        cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
    }
}

json build_config(const CommonOpts& o) {
    json cfg = json::object();
    if (!o.config_path.empty()) {
        cfg = piston::config::load_json_file(o.config_path);
    }
    if (!o.preset.empty()) cfg["preset"] = o.preset;
    cfg = piston::config::expand_preset(cfg);
    if (o.seed) cfg["seed"] = *o.seed;
    if (o.n_traj) cfg["n_traj"] = *o.n_traj;
    if (o.dt) cfg["dt"] = *o.dt;
    if (o.t_end) cfg["t_end"] = *o.t_end;
    return cfg;
}

std::string out_file(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / name).string();
}

int cmd_params(const CommonOpts& o) {
    const auto cfg = piston::config::parse_circuit(build_config(o));
    const auto eff = cfg.variant == "capacitive"
                         ? piston::circuit::effective_capacitive(cfg.capacitive)
                         : piston::circuit::effective_inductive(cfg.inductive);
    const auto derived = piston::circuit::derive_params(eff);
    const auto regime = piston::circuit::validate_regime(
        derived, eff.E_J, cfg.expected_occupation, cfg.threshold);

    json report = {
        {"variant", cfg.variant},
        {"effective",
         {{"xi", eff.xi}, {"C", eff.C}, {"C_J", eff.C_J}, {"L", eff.L},
          {"E_J", eff.E_J}}},
        {"derived",
         {{"omega0", derived.omega0},
          {"omega_p", derived.omega_p},
          {"g", derived.g},
          {"E_c", derived.E_c},
          {"Phi_r", derived.Phi_r},
          {"Phi0", derived.Phi0}}},
        {"regime", {{"threshold", regime.threshold},
                    {"all_ok", regime.all_ok()}}},
    };
    json checks = json::array();
    for (const auto& c : regime.checks) {
        checks.push_back({{"name", c.name}, {"ratio", c.ratio}, {"ok", c.ok}});
    }
    report["regime"]["checks"] = checks;

    std::printf("variant      %s\n", cfg.variant.c_str());
    std::printf("xi           %s\n", format_double(eff.xi).c_str());
    std::printf("omega0       %s rad/s\n", format_double(derived.omega0).c_str());
    std::printf("omega_p      %s rad/s\n", format_double(derived.omega_p).c_str());
    std::printf("g            %s rad/s\n", format_double(derived.g).c_str());
    std::printf("E_c          %s\n", format_double(derived.E_c).c_str());
    std::printf("Phi_r        %s Wb\n", format_double(derived.Phi_r).c_str());
    for (const auto& c : regime.checks) {
        std::printf("regime %-24s ratio %-12s %s\n", c.name.c_str(),
                    format_double(c.ratio).c_str(), c.ok ? "ok" : "FAILED");
    }
    piston::output::write_json(out_file(o, "params.json"), report);
    return 0;
}

int cmd_steady_state(const CommonOpts& o) {
    const auto cfg = piston::config::parse_sweep(build_config(o));

    piston::output::CsvWriter csv(out_file(o, "steady_state.csv"));
    csv.comment("code_version", piston::output::code_version);
    csv.comment("alpha", format_double(cfg.alpha));
    csv.comment("n_H", format_double(cfg.n_H));
    csv.comment("n_C", format_double(cfg.n_C));
    csv.header({"kappa_H_over_kappa_C", "Delta_over_kappa_H",
                "n_a_ss_over_n_H", "n_b_ss_over_n_H"});

    for (const double kH : cfg.kappa_H_list) {
        piston::model::EngineParams p{};
        p.kappa_H = kH;
        p.alpha = cfg.alpha;
        p.g = 0.0;
        p.Delta0 = 0.0;
        p.E_c = 1.0;
        p.E_J = 1.0;
        p.n_H = cfg.n_H;
        p.n_C = cfg.n_C;
        p = piston::model::make_params(p, piston::model::CouplingSpec::FromAlpha);
        for (int i = 0; i < cfg.delta_points; ++i) {
            const double x = cfg.delta_min +
                             (cfg.delta_max - cfg.delta_min) * i /
                                 (cfg.delta_points - 1);
            const auto ss =
                piston::model::steady_state_at_detuning(x * kH, p);
            csv.row({kH, x, ss.n_a_ss / cfg.n_H, ss.n_b_ss / cfg.n_H});
        }
    }
    csv.save();
    return 0;
}

int cmd_pv(const CommonOpts& o, const std::vector<double>& tau_cli) {
    json raw = build_config(o);
    if (!tau_cli.empty()) raw["tau_omega_list"] = tau_cli;
    const auto cfg = piston::config::parse_pv(raw);

    piston::output::CsvWriter csv(out_file(o, "pv.csv"));
    csv.comments(piston::output::provenance_for(cfg.params));
    csv.header({"curve_id", "tau_omega", "phi", "V", "p"});

    piston::output::CsvWriter summary(out_file(o, "pv_summary.csv"));
    summary.comments(piston::output::provenance_for(cfg.params));
    summary.header({"curve_id", "tau_omega", "loop_area", "W_cyc_first_order",
                    "phi_p_max", "phi_p_min"});

    for (std::size_t id = 0; id < cfg.tau_omega_list.size(); ++id) {
        const double tau_omega = cfg.tau_omega_list[id];
        const auto rec =
            piston::analysis::pv_curve(cfg.params, tau_omega, cfg.n_points);
        for (std::size_t i = 0; i < rec.phi.size(); ++i) {
            csv.row({static_cast<double>(id), tau_omega, rec.phi[i],
                     rec.V_samples[i], rec.p_samples[i]});
        }
        // First-order prediction pi*tau*omega*C2 = W_cyc at this rotation.
        const auto qs = piston::analysis::quasi_static_constants(cfg.params, 0.0);
        const double w_first = 3.141592653589793238462643383279502884 *
                               tau_omega * qs.C2;
        summary.row({static_cast<double>(id), tau_omega, rec.loop_area,
                     w_first, rec.phi_p_max, rec.phi_p_min});
    }
    csv.save();
    summary.save();
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    const auto cfg = piston::config::parse_simulate(build_config(o));

    const auto ensemble = piston::sim::run_ensemble(
        cfg.n_traj, cfg.model, cfg.init, cfg.params, cfg.dt, cfg.t_end,
        cfg.sample_stride, cfg.seed, o.threads);

    json manifest = {
        {"code_version", piston::output::code_version},
        {"model", piston::sim::to_string(cfg.model)},
        {"seed", cfg.seed},
        {"n_traj", cfg.n_traj},
        {"dt", cfg.dt},
        {"t_end", cfg.t_end},
        {"sample_stride", cfg.sample_stride},
        {"completed", ensemble.trajectories.size()},
    };
    json failures = json::array();
    for (const auto& f : ensemble.failures) {
        failures.push_back({{"stream_id", f.stream_id}, {"message", f.message}});
    }
    manifest["failures"] = failures;

    std::size_t clamp_total = 0;
    char name[64];
    for (const auto& tr : ensemble.trajectories) {
        std::snprintf(name, sizeof(name), "traj_%04llu.csv",
                      static_cast<unsigned long long>(tr.meta.stream_id));
        piston::output::write_trajectory_csv(out_file(o, name), tr);
        clamp_total += tr.meta.clamp_count;
    }
    manifest["clamp_count_total"] = clamp_total;

    if (ensemble.trajectories.size() >= 2) {
        // Short records get a proportionally shorter smoothing window.
        const auto& times = ensemble.trajectories.front().times;
        const double span = times.empty() ? 0.0 : times.back() - times.front();
        const auto stats = piston::analysis::ensemble_stats(
            ensemble, cfg.params, std::min(cfg.smoothing_window, span));
        piston::output::write_stats_csv(out_file(o, "stats.csv"), stats,
                                        cfg.params, cfg.seed);
    }
    piston::output::write_json(out_file(o, "manifest.json"), manifest);

    std::fprintf(stderr, "simulate: %zu/%zu trajectories completed\n",
                 ensemble.trajectories.size(), cfg.n_traj);
    return ensemble.trajectories.empty() ? 1 : 0;
}

int cmd_analyze(const CommonOpts& o, const std::string& stats_path) {
    const auto cfg = piston::config::parse_analyze(build_config(o));
    const auto stats = piston::output::read_stats_csv(stats_path);
    if (stats.times.size() < 2) {
        throw std::runtime_error("analyze: stats file too short");
    }

    const double chi_bar = piston::analysis::chi_mean(cfg.params);
    const double diffusion =
        piston::analysis::variance_diffusion_term(cfg.params);

    // Re-derive the window and normalized rates from the raw statistics so
    // the result depends only on (stats file, params).
    auto local = stats;
    local.smoothing_window = cfg.smoothing_window;
    local.chi_bar = chi_bar;
    local.diffusion_term = diffusion;
    const auto summary = piston::analysis::window_summary(local, cfg.threshold);

    json report = {
        {"code_version", piston::output::code_version},
        {"chi_bar", chi_bar},
        {"diffusion_term", diffusion},
        {"window_empty", summary.window.empty},
    };
    bool pass = !summary.window.empty;
    if (pass) {
        const bool gain_ok =
            summary.norm_gain >= cfg.gain_lo && summary.norm_gain <= cfg.gain_hi;
        const bool var_ok =
            summary.norm_var >= cfg.var_lo && summary.norm_var <= cfg.var_hi;
        const bool snr_ok = summary.snr_variation < cfg.snr_variation;
        pass = gain_ok && var_ok && snr_ok;
        report["window"] = {{"t_begin", summary.window.t_begin},
                            {"t_end", summary.window.t_end}};
        report["norm_gain"] = summary.norm_gain;
        report["norm_var"] = summary.norm_var;
        report["snr_mean"] = summary.snr_mean;
        report["snr_variation"] = summary.snr_variation;
        report["checks"] = {{"gain_ok", gain_ok},
                            {"var_ok", var_ok},
                            {"snr_ok", snr_ok}};
    }
    if (std::isfinite(summary.crossing_time)) {
        report["crossing_time"] = summary.crossing_time;
    }
    report["pass"] = pass;

    piston::output::write_json(out_file(o, "analyze.json"), report);
    std::cout << report.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Autonomous flux-piston heat engine toolkit"};
    app.require_subcommand(1);

    CommonOpts params_o, sweep_o, pv_o, sim_o, an_o;
    std::vector<double> tau_cli;
    std::string stats_path;

    auto* c_params = app.add_subcommand("params",
        "derive effective circuit parameters and check the operating regime");
    add_common(c_params, params_o);

    auto* c_sweep = app.add_subcommand("steady-state",
        "sweep the frozen-rotor steady-state occupations over detuning");
    add_common(c_sweep, sweep_o);

    auto* c_pv = app.add_subcommand("pv",
        "delayed quasi-static pV loops and work per cycle");
    add_common(c_pv, pv_o);
    c_pv->add_option("--tau-omega", tau_cli, "non-adiabaticity values");

    auto* c_sim = app.add_subcommand("simulate",
        "run a trajectory ensemble and write time series + statistics");
    add_common(c_sim, sim_o, true);

    auto* c_an = app.add_subcommand("analyze",
        "compare ensemble statistics against the analytical gain/variance laws");
    add_common(c_an, an_o);
    c_an->add_option("--stats", stats_path, "stats.csv from a simulate run")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_params->parsed()) return cmd_params(params_o);
        if (c_sweep->parsed()) return cmd_steady_state(sweep_o);
        if (c_pv->parsed()) return cmd_pv(pv_o, tau_cli);
        if (c_sim->parsed()) return cmd_simulate(sim_o);
        if (c_an->parsed()) return cmd_analyze(an_o, stats_path);
    } catch (const piston::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
