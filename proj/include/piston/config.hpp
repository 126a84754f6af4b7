#pragma once

#include "piston/circuit.hpp"
#include "piston/model.hpp"
#include "piston/sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace piston::config {

using json = nlohmann::json;

// Invalid or malformed configuration; maps to exit code 2 in the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json_file(const std::string& path);

// Shipped presets: fig2b, fig2c, fig2d, fig3.
json preset_json(const std::string& name);
std::vector<std::string> preset_names();

// Deep-merge: `overrides` wins over `base` key by key.
json merge(json base, const json& overrides);

// Expand an optional "preset" key, then apply the remaining keys on top.
json expand_preset(const json& cfg);

// Engine parameters in kappa_C units; exactly one of "alpha"/"J" given.
model::EngineParams parse_engine_params(const json& j);

struct SimulateConfig {
    sim::ModelKind model;
    model::EngineParams params;
    sim::InitialConditions init;
    double dt;
    double t_end;
    std::size_t n_traj;
    std::uint64_t seed;
    std::size_t sample_stride;
    double smoothing_window;
};
SimulateConfig parse_simulate(const json& cfg);

struct SweepConfig {
    double alpha;
    double n_H;
    double n_C;
    std::vector<double> kappa_H_list; // in kappa_C units
    double delta_min;                 // grid in kappa_H units
    double delta_max;
    int delta_points;
};
SweepConfig parse_sweep(const json& cfg);

struct PvConfig {
    model::EngineParams params;
    std::vector<double> tau_omega_list;
    int n_points;
};
PvConfig parse_pv(const json& cfg);

struct CircuitConfig {
    std::string variant; // "capacitive" | "inductive"
    circuit::CapacitiveCircuit capacitive{};
    circuit::InductiveCircuit inductive{};
    double expected_occupation;
    double threshold;
};
CircuitConfig parse_circuit(const json& cfg);

struct AnalyzeConfig {
    model::EngineParams params;
    double smoothing_window;
    double threshold; // <L^2> validity bound
    double gain_lo, gain_hi;
    double var_lo, var_hi;
    double snr_variation;
};
AnalyzeConfig parse_analyze(const json& cfg);

} // namespace piston::config
