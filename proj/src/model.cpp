#include "piston/model.hpp"

#include <cmath>
#include <stdexcept>

namespace piston::model {

EngineParams make_params(EngineParams p, CouplingSpec spec) {
    if (spec == CouplingSpec::FromJ) {
        p.alpha = 4.0 * p.J * p.J / (p.kappa_C * p.kappa_H);
    } else {
        if (p.alpha < 0.0) throw std::domain_error("model: alpha must be >= 0");
        p.J = 0.5 * std::sqrt(p.alpha * p.kappa_C * p.kappa_H);
    }
    p.hbar_g = p.g;
    validate(p);
    return p;
}

void validate(const EngineParams& p) {
    if (!(p.kappa_C > 0.0)) throw std::domain_error("model: kappa_C must be > 0");
    if (!(p.kappa_H > 0.0)) throw std::domain_error("model: kappa_H must be > 0");
    if (p.g < 0.0) throw std::domain_error("model: g must be >= 0");
    if (p.n_C < 0.0 || p.n_H < p.n_C) {
        throw std::domain_error("model: occupations must satisfy n_H >= n_C >= 0");
    }
    const double alpha_from_J = 4.0 * p.J * p.J / (p.kappa_C * p.kappa_H);
    if (std::abs(alpha_from_J - p.alpha) >
        1e-9 * std::max(1.0, std::abs(p.alpha))) {
        throw std::domain_error("model: alpha inconsistent with J");
    }
}

double detuning(double phi, const EngineParams& p) {
    return p.Delta0 + p.g * std::cos(phi);
}

double hot_contact(double phi, const EngineParams& p) {
    const double d = detuning(phi, p);
    return p.alpha / (1.0 + 4.0 * d * d / (p.kappa_H * p.kappa_H));
}

BathAtAngle bath_at_angle(double phi, const EngineParams& p) {
    return bath_from_cos(std::cos(phi), p);
}

SteadyOccupations steady_state_at_detuning(double Delta, const EngineParams& p) {
    const double ksum = p.kappa_C + p.kappa_H;
    const double dn = p.alpha * (p.n_H - p.n_C);
    SteadyOccupations s;
    s.n_a_ss = p.n_C + dn / (4.0 * Delta * Delta / (p.kappa_H * ksum) +
                             (1.0 + p.alpha) * ksum / p.kappa_H);
    s.n_b_ss = p.n_H - dn / (4.0 * Delta * Delta / (p.kappa_C * ksum) +
                             (1.0 + p.alpha) * ksum / p.kappa_C);
    return s;
}

SteadyOccupations steady_state_occupations(double phi, const EngineParams& p) {
    return steady_state_at_detuning(detuning(phi, p), p);
}

double steady_state_slope(double Delta, const EngineParams& p) {
    const double ksum = p.kappa_C + p.kappa_H;
    const double denom = 4.0 * Delta * Delta / (p.kappa_H * ksum) +
                         (1.0 + p.alpha) * ksum / p.kappa_H;
    return -p.alpha * (p.n_H - p.n_C) * 8.0 * Delta /
           (p.kappa_H * ksum * denom * denom);
}

RotorDrift rotor_drift(double phi, double Q, double n_a,
                       const EngineParams& p) {
    RotorDrift d;
    d.dPhi_dt = p.E_c * Q;
    d.dQ_dt = -(p.E_J - p.hbar_g * n_a) * std::sin(phi);
    return d;
}

} // namespace piston::model
