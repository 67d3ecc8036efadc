#pragma once

namespace tapdoe::constants {

/// Boltzmann constant in eV/K.
inline constexpr double kBoltzmannEv = 8.617333262e-5;
/// kB/h in 1/(K s) from the exact SI values; the Eyring prefactor is kBoltzmannOverPlanck * T.
inline constexpr double kBoltzmannOverPlanck = 1.380649e-23 / 6.62607015e-34;

inline constexpr double kMolPerNanomole = 1e-9;
inline constexpr double kNanomolePerMol = 1e9;

/// 1.96 standard errors span a two-sided 95% interval.
inline constexpr double kCi95Factor = 1.96;

}  // namespace tapdoe::constants
