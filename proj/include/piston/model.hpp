#pragma once

namespace piston::model {

// Engine parameters in units of kappa_C (hbar = 1). Exactly one of J and
// alpha is prescribed by the user; make_params fills in the other via
// alpha = 4 J^2 / (kappa_C kappa_H).
struct EngineParams {
    double kappa_C = 1.0; // cold-bath rate, unit by convention
    double kappa_H;       // hot-bath (filter) rate
    double J;             // chamber-filter coupling
    double alpha;         // cooperativity 4J^2/(kappa_C kappa_H)
    double Delta0;        // bare detuning omega_0 - omega_b
    double g;             // frequency-modulation amplitude
    double E_c;           // charging-energy rate factor
    double E_J;           // Josephson energy rate factor
    double n_H;           // hot thermal occupation
    double n_C;           // cold thermal occupation
    double hbar_g;        // force coupling; equals g with hbar = 1
};

enum class CouplingSpec { FromJ, FromAlpha };

EngineParams make_params(EngineParams p, CouplingSpec spec);
void validate(const EngineParams& p);

// Effective bath seen by the light chamber at rotor angle phi.
struct BathAtAngle {
    double n_bar; // occupation the chamber thermalizes to
    double kappa; // thermalization rate
    double f_H;   // hot-contact function
    double Delta; // detuning at this angle
};

double detuning(double phi, const EngineParams& p);
double hot_contact(double phi, const EngineParams& p);
BathAtAngle bath_at_angle(double phi, const EngineParams& p);

// Same as bath_at_angle with cos(phi) already evaluated; hot path of the
// integrators.
inline BathAtAngle bath_from_cos(double cos_phi, const EngineParams& p) {
    BathAtAngle b;
    b.Delta = p.Delta0 + p.g * cos_phi;
    b.f_H = p.alpha / (1.0 + 4.0 * b.Delta * b.Delta / (p.kappa_H * p.kappa_H));
    b.n_bar = (p.n_C + b.f_H * p.n_H) / (1.0 + b.f_H);
    b.kappa = p.kappa_C * (1.0 + b.f_H);
    return b;
}

// Frozen-rotor steady state of the two coupled modes, full expression.
struct SteadyOccupations {
    double n_a_ss;
    double n_b_ss;
};
SteadyOccupations steady_state_occupations(double phi, const EngineParams& p);
SteadyOccupations steady_state_at_detuning(double Delta, const EngineParams& p);

// d n_a_ss / d Delta, analytic.
double steady_state_slope(double Delta, const EngineParams& p);

// Deterministic rotor equations of motion (Q convention, not rescaled).
struct RotorDrift {
    double dPhi_dt;
    double dQ_dt;
};
RotorDrift rotor_drift(double phi, double Q, double n_a, const EngineParams& p);

} // namespace piston::model
