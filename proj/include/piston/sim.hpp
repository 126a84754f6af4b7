#pragma once

#include "piston/model.hpp"
#include "piston/sde.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace piston::sim {

enum class ModelKind { Full, Reduced };

std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& s);

// Full three-mode state in the frame rotating at the filter frequency.
// The rotor is tracked as (phi, L) with L = E_c * Q; phi is unwrapped.
struct FullState {
    std::complex<double> a;
    std::complex<double> b;
    double phi;
    double L;
};

// Chamber occupation + rotor after adiabatic elimination of the filter.
struct ReducedState {
    double n_a;
    double phi;
    double L;
};

struct InitialConditions {
    double phi = 0.0;
    double L = 0.0;
    // Chamber occupation; defaults to the local thermal value n_bar(phi).
    std::optional<double> n_a;
};

struct TrajectoryMetadata {
    ModelKind model;
    model::EngineParams params;
    std::uint64_t seed;
    std::uint64_t stream_id;
    double dt;
    std::size_t sample_stride;
    std::size_t n_steps;
    std::size_t clamp_count = 0; // reduced model: steps where n_a hit 0
};

// Uniformly sampled time series of one trajectory.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> n_a;
    std::vector<double> n_b; // empty for the reduced model
    std::vector<double> phi;
    std::vector<double> L;
    TrajectoryMetadata meta;
};

struct TrajectoryFailure {
    std::uint64_t stream_id;
    std::string message;
};

struct EnsembleRecord {
    std::vector<TrajectoryRecord> trajectories;
    std::vector<TrajectoryFailure> failures;
    std::size_t count() const { return trajectories.size(); }
};

// Single Euler-Maruyama steps (Ito). The rotor angle is advanced with the
// updated momentum so the noise-free pendulum energy stays bounded.
FullState step_full(const FullState& s, const model::EngineParams& p,
                    double dt, sde::RandomStream& rng);
ReducedState step_reduced(const ReducedState& s, const model::EngineParams& p,
                          double dt, sde::RandomStream& rng,
                          std::size_t* clamp_count = nullptr);

TrajectoryRecord run_trajectory(ModelKind model, const InitialConditions& init,
                                const model::EngineParams& p, double dt,
                                double t_end, std::size_t sample_stride,
                                std::uint64_t seed, std::uint64_t stream_id);

// Trajectories with stream_id 0..n_traj-1, executed on n_threads workers.
// The result is a deterministic function of (inputs, seed), independent of
// n_threads and scheduling.
EnsembleRecord run_ensemble(std::size_t n_traj, ModelKind model,
                            const InitialConditions& init,
                            const model::EngineParams& p, double dt,
                            double t_end, std::size_t sample_stride,
                            std::uint64_t seed, unsigned n_threads = 0);

} // namespace piston::sim
