#pragma once

#include <string>
#include <vector>

namespace piston::circuit {

// Raw circuit element values, SI units throughout this module.

// Half-wave resonator capacitively coupled to the Josephson loop.
struct CapacitiveCircuit {
    double C_tilde;  // bare resonator capacitance, F
    double CJ_tilde; // bare loop capacitance, F
    double C_c;      // coupling capacitance, F
    double L;        // resonator inductance, H
    double E_J;      // Josephson energy, J
};

// Quarter-wave resonator with galvanic (inductive) coupling.
struct InductiveCircuit {
    double C_tilde;
    double CJ_tilde;
    double L;
    double E_J;
};

// Effective oscillator-rotor parameters after the coordinate transformation.
struct EffectiveCircuit {
    double xi;       // dimensionless coupling, in (0,1)
    double C;        // effective resonator capacitance, F
    double C_J;      // effective loop capacitance, F
    double L;        // H
    double E_J;      // J
    double CJ_tilde; // bare loop capacitance, retained for the plasma frequency
};

struct DerivedParams {
    double omega0;  // cavity resonance 1/sqrt(LC), rad/s
    double omega_p; // Josephson plasma frequency, rad/s
    double g;       // frequency modulation amplitude, rad/s
    double E_c;     // charging-energy coefficient 1/(Phi0^2 C_J)
    double Phi_r;   // zero-point flux fluctuation, Wb
    double Phi0;    // reduced flux quantum, Wb
};

struct RegimeCheck {
    std::string name;
    double ratio; // quantity that must be << 1
    bool ok;
};

struct RegimeReport {
    double threshold; // ratio below which "<<" is considered satisfied
    std::vector<RegimeCheck> checks;
    bool all_ok() const;
};

EffectiveCircuit effective_capacitive(const CapacitiveCircuit& raw);
EffectiveCircuit effective_inductive(const InductiveCircuit& raw);
DerivedParams derive_params(const EffectiveCircuit& eff);

// Report-only check of the operating-regime assumptions.
RegimeReport validate_regime(const DerivedParams& p, double E_J,
                             double expected_occupation,
                             double threshold = 0.01);

} // namespace piston::circuit
