#pragma once

namespace piston::constants {

// 2019 SI exact values.
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C

// Reduced flux quantum hbar / 2e, in weber.
inline constexpr double Phi0 = hbar / (2.0 * elementary_charge);

} // namespace piston::constants
