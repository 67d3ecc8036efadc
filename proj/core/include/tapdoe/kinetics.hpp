#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tapdoe/mechanism.hpp"
#include "tapdoe/parameters.hpp"

namespace tapdoe {

struct RateConstants {
  double forward = 0.0;  ///< k_f, concentration-unit conventions per Mechanism::standard_concentration
  double reverse = 0.0;
};

/// Eyring rate constants: k_f = (kB T / h) exp(-Ga / kB T), k_r = k_f / exp(-dG / kB T).
/// k_r is zero for irreversible steps. Throws InputError for T <= 0.
RateConstants rate_constants(double delta_g, double g_activation, bool reversible, double temperature);
RateConstants rate_constants(const ReactionStep& step, double temperature);

/// Mass-action kinetics of one mechanism at fixed rate constants.
///
/// Concentrations are passed as one vector in species row order (gases first,
/// then adsorbates, then free sites). Reaction orders equal the written
/// stoichiometric coefficients.
class CompiledKinetics {
 public:
  CompiledKinetics(const Mechanism& mechanism, double temperature);
  CompiledKinetics(const Mechanism& mechanism, double temperature, const StepEnergies& energies);
  /// Explicit constants, one per step (used for hand-checked tests).
  CompiledKinetics(const Mechanism& mechanism, std::vector<RateConstants> constants);

  std::size_t species_count() const noexcept { return n_species_; }
  std::size_t step_count() const noexcept { return steps_.size(); }
  const std::vector<RateConstants>& constants() const noexcept { return constants_; }

  /// Net rate of each step (mol/m^3/s).
  void rates(std::span<const double> conc, std::span<double> out) const;
  Eigen::VectorXd rates(std::span<const double> conc) const;

  /// Species production rates dy/dt = M r.
  void production(std::span<const double> conc, std::span<double> out) const;

  /// Production rates and their Jacobian d(M r)/dy, added into `jacobian` (species x species).
  void production_jacobian(std::span<const double> conc, std::span<double> production,
                           Eigen::Ref<Eigen::MatrixXd> jacobian) const;

  /// True when the step list is empty or every rate constant is zero.
  bool inert() const noexcept { return inert_; }

 private:
  struct Term {
    std::size_t species;
    int order;
  };
  struct Step {
    std::vector<Term> forward;
    std::vector<Term> reverse;
    std::vector<std::pair<std::size_t, int>> net;  // nonzero column entries of M
    double kf = 0.0;  // effective constants including the standard-concentration scaling
    double kr = 0.0;
  };

  void compile(const Mechanism& mechanism);

  std::size_t n_species_ = 0;
  std::vector<Step> steps_;
  std::vector<RateConstants> constants_;
  bool inert_ = true;
};

/// Net rates of all steps from separate gas and surface concentration vectors.
/// Throws InputError for negative concentrations.
Eigen::VectorXd reaction_rates(const Mechanism& mechanism, const CompiledKinetics& kinetics,
                               std::span<const double> gas_conc, std::span<const double> surf_conc);
Eigen::VectorXd reaction_rates(const Mechanism& mechanism, double temperature,
                               std::span<const double> gas_conc, std::span<const double> surf_conc);

}  // namespace tapdoe
