#include "piston/circuit.hpp"
#include "piston/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace piston::circuit {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw std::domain_error(std::string("circuit: ") + name +
                                " must be strictly positive");
    }
}

} // namespace

bool RegimeReport::all_ok() const {
    for (const auto& c : checks) {
        if (!c.ok) return false;
    }
    return true;
}

EffectiveCircuit effective_capacitive(const CapacitiveCircuit& raw) {
    require_positive(raw.C_tilde, "C_tilde");
    require_positive(raw.CJ_tilde, "CJ_tilde");
    require_positive(raw.C_c, "C_c");
    require_positive(raw.L, "L");
    require_positive(raw.E_J, "E_J");

    EffectiveCircuit eff;
    eff.xi = raw.C_c / (raw.C_c + raw.CJ_tilde);
    eff.C = raw.C_tilde + eff.xi * raw.CJ_tilde;
    eff.C_J = raw.CJ_tilde + raw.C_c;
    eff.L = raw.L;
    eff.E_J = raw.E_J;
    eff.CJ_tilde = raw.CJ_tilde;
    return eff;
}

EffectiveCircuit effective_inductive(const InductiveCircuit& raw) {
    require_positive(raw.C_tilde, "C_tilde");
    require_positive(raw.CJ_tilde, "CJ_tilde");
    require_positive(raw.L, "L");
    require_positive(raw.E_J, "E_J");

    EffectiveCircuit eff;
    eff.xi = raw.C_tilde / (raw.C_tilde + raw.CJ_tilde);
    eff.C = eff.xi * raw.CJ_tilde;
    eff.C_J = raw.CJ_tilde + raw.C_tilde;
    eff.L = raw.L;
    eff.E_J = raw.E_J;
    eff.CJ_tilde = raw.CJ_tilde;
    return eff;
}

DerivedParams derive_params(const EffectiveCircuit& eff) {
    require_positive(eff.xi, "xi");
    if (!(eff.xi < 1.0)) throw std::domain_error("circuit: xi must be < 1");
    require_positive(eff.C, "C");
    require_positive(eff.C_J, "C_J");
    require_positive(eff.L, "L");
    require_positive(eff.E_J, "E_J");
    require_positive(eff.CJ_tilde, "CJ_tilde");

    const double Phi0 = constants::Phi0;
    DerivedParams p;
    p.omega0 = 1.0 / std::sqrt(eff.L * eff.C);
    p.omega_p = std::sqrt(eff.E_J / (Phi0 * Phi0 * eff.CJ_tilde));
    p.g = eff.xi * eff.xi * p.omega_p * p.omega_p * eff.CJ_tilde /
          (2.0 * p.omega0 * eff.C);
    p.E_c = 1.0 / (Phi0 * Phi0 * eff.C_J);
    p.Phi_r = std::sqrt(constants::hbar / (2.0 * p.omega0 * eff.C));
    p.Phi0 = Phi0;
    return p;
}

RegimeReport validate_regime(const DerivedParams& p, double E_J,
                             double expected_occupation, double threshold) {
    RegimeReport report;
    report.threshold = threshold;

    auto add = [&](std::string name, double ratio) {
        report.checks.push_back({std::move(name), ratio, ratio < threshold});
    };

    add("g_over_omega0", p.g / p.omega0);
    add("omega_p_over_omega0", p.omega_p / p.omega0);
    // Vacuum correction to the pendulum potential must be negligible.
    add("vacuum_correction", constants::hbar * p.g / (2.0 * E_J));
    // Occupation must stay far below the potential-inversion point.
    add("occupation_over_critical",
        expected_occupation * constants::hbar * p.g / E_J);
    return report;
}

} // namespace piston::circuit
