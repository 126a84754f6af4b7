#pragma once

#include "piston/model.hpp"
#include "piston/sim.hpp"

#include <vector>

namespace piston::analysis {

// Constants of the fixed-delay quasi-static expansion of the rotor force.
struct QuasiStaticConstants {
    double tau;
    double C1;          // hbar_g <n_a>_ss(Delta0) - E_J
    double C2;          // hbar_g g d<n_a>_ss/dDelta at Delta0
    double C3;          // tau E_c C2
    double W_cyc_per_Q; // pi tau E_c C2; work per cycle is this times Q
};

QuasiStaticConstants quasi_static_constants(const model::EngineParams& p,
                                            double tau);

// Momentum gain rate at angle phi (first-order delayed thermalization).
double chi(double phi, const model::EngineParams& p);

// Angle average of chi over one cycle (trapezoid, Richardson-checked).
double chi_mean(const model::EngineParams& p);

// Additive term of the variance growth law, in L = E_c Q units.
double variance_diffusion_term(const model::EngineParams& p);

// dVar_L/dt = 2 chi Var_L + diffusion term.
double variance_rate(const model::EngineParams& p, double var_L);

// Detuning maximizing the gain at the angle of strongest radiation
// pressure: -sqrt((1+alpha)/12) kappa_H.
double optimal_detuning(const model::EngineParams& p);

// One delayed quasi-static pV loop under uniform rotation.
struct CycleRecord {
    double start_time = 0.0;
    double end_time = 0.0;
    double loop_area; // closed integral of p dV
    std::vector<double> phi;
    std::vector<double> V_samples; // -cos(phi)
    std::vector<double> p_samples; // hbar_g * delayed steady-state n_a
    double phi_p_max; // angle of maximum chamber occupation
    double phi_p_min; // angle of minimum chamber occupation
};

CycleRecord pv_curve(const model::EngineParams& p, double tau_times_omega,
                     int n_points);

// Cross-trajectory statistics of the rotor momentum L. Undefined entries
// (e.g. SNR at zero variance) are NaN.
struct EnsembleStats {
    std::vector<double> times;
    std::vector<double> mean_L;
    std::vector<double> var_L;
    std::vector<double> mean_L2; // mean_L^2 + var_L
    std::vector<double> mean_phi;
    std::vector<double> snr;       // mean_L / sqrt(var_L)
    std::vector<double> rate_mean; // finite-difference d mean_L / dt
    std::vector<double> rate_var;  // finite-difference d var_L / dt
    std::vector<double> norm_gain; // rate_mean / (chi_mean * mean_L)
    std::vector<double> norm_var;  // rate_var / variance_rate(var_L)
    double smoothing_window;
    double chi_bar;
    double diffusion_term;
};

EnsembleStats ensemble_stats(const sim::EnsembleRecord& e,
                             double smoothing_window);
EnsembleStats ensemble_stats(const sim::EnsembleRecord& e,
                             const model::EngineParams& p,
                             double smoothing_window);

struct TimeRange {
    double t_begin = 0.0;
    double t_end = 0.0;
    bool empty = true;
};

// Time range where the rotor is in free rotation (ensemble-mean angle
// monotonically increasing over the trailing smoothing window) and the
// first-order expansion is valid (<L^2> below `threshold`).
TimeRange validity_window(const EnsembleStats& stats, double threshold = 0.1);
TimeRange validity_window(const sim::EnsembleRecord& e,
                          const model::EngineParams& p,
                          double smoothing_window = 200.0,
                          double threshold = 0.1);

// First sampled time with <L^2> >= threshold; NaN if never crossed.
double threshold_crossing_time(const EnsembleStats& stats,
                               double threshold = 0.1);

// Centered moving average over `width` time units, truncated at the edges.
std::vector<double> moving_average(const std::vector<double>& times,
                                   const std::vector<double>& y, double width);

// Aggregate comparison of an ensemble against the first-order gain and
// variance laws over the validity window. Aggregating the finite
// differences over the whole window keeps the sampling noise of the
// estimates far below that of the pointwise rates.
struct WindowSummary {
    TimeRange window;
    double norm_gain = 0.0;      // Delta mean_L / (chi_bar * int mean_L dt)
    double norm_var = 0.0;       // Delta var_L / int (2 chi_bar var_L + D) dt
    double snr_mean = 0.0;       // mean of the smoothed SNR over the window
    double snr_variation = 0.0;  // std / |mean| of the smoothed SNR
    double crossing_time = 0.0;  // first <L^2> >= threshold; NaN if never
};

WindowSummary window_summary(const EnsembleStats& stats,
                             double threshold = 0.1);

} // namespace piston::analysis
