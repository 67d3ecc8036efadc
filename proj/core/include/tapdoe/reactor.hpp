#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tapdoe/mechanism.hpp"
#include "tapdoe/parameters.hpp"

namespace tapdoe {

/// Three-zone packed bed: inert / catalyst / inert.
struct ReactorGeometry {
  std::array<double, 3> zone_lengths{0.019, 0.002, 0.019};  ///< m
  std::array<double, 3> void_fractions{0.4, 0.4, 0.4};
  double cross_section_area = 1.14e-4;   ///< m^2
  double reference_diffusivity = 0.002;  ///< m^2/s at reference mass and temperature
  double reference_mass = 40.0;          ///< amu
  double reference_temperature = 700.0;  ///< K

  double length() const noexcept { return zone_lengths[0] + zone_lengths[1] + zone_lengths[2]; }
  bool uniform_void_fraction() const noexcept {
    return void_fractions[0] == void_fractions[1] && void_fractions[1] == void_fractions[2];
  }
  void validate() const;
};

struct GasPulse {
  std::string gas;
  double intensity = 0.0;  ///< nmol
  double delay = 0.0;      ///< s
};

/// The designable knobs of one pulse experiment.
struct ExperimentDesign {
  std::vector<GasPulse> pulses;
  double temperature = 700.0;  ///< K
  double horizon = 2.5;        ///< s

  double intensity(std::string_view gas) const;
  double delay(std::string_view gas) const;
  void validate() const;
  /// Compact label such as "C3H8=1nmol@0s O2=1nmol@0s T=700K".
  std::string label() const;
};

/// Outlet flux per gas (nmol/s) on a uniform time grid shared by all gases.
struct FluxSeries {
  std::vector<double> time;  ///< s
  std::vector<std::string> gases;
  Eigen::MatrixXd values;  ///< rows = time points, cols = gases

  std::size_t gas_index(std::string_view gas) const;
  Eigen::VectorXd column(std::string_view gas) const;
  /// Rectangle-rule integral of one gas (nmol); exact for the simulator's step-averaged fluxes.
  double integral(std::string_view gas) const;
  double time_step() const;
};

/// Spatial concentration fields at one instant.
struct StateField {
  std::vector<double> x;                 ///< node positions (m), outlet node excluded
  std::vector<std::string> gases;
  Eigen::MatrixXd gas;                   ///< nodes x gases, mol/m^3 of void space
  std::vector<std::size_t> catalyst_nodes;
  std::vector<std::string> surface_species;
  Eigen::MatrixXd surface;               ///< catalyst nodes x surface species, mol/m^3 of bed
  std::vector<double> gas_weight;        ///< void volume per unit area attributed to each node (m)
  std::vector<double> catalyst_weight;   ///< catalyst bed length attributed to each catalyst node (m)
  double area = 0.0;

  double gas_inventory(std::size_t gas_index) const;          ///< nmol in the reactor
  double surface_inventory(std::size_t surface_index) const;  ///< nmol on the catalyst
};

struct SolverStats {
  std::size_t steps = 0;
  std::size_t newton_iterations = 0;
  std::size_t halvings = 0;
};

struct SimulationOptions {
  int intervals = 120;          ///< spatial intervals; the outlet node is fixed at zero
  double dt = 1e-3;             ///< output (and base integration) step, s
  double pulse_width = 1e-3;    ///< Gaussian sigma of the inlet pulse, s
  int max_halvings = 10;
  int max_newton_iterations = 60;
  double newton_rtol = 1e-10;
  double newton_atol = 1e-14;   ///< relative to the characteristic concentration
  double negativity_tolerance = 1e-12;
  /// Called after every output step when set.
  std::function<void(double, const StateField&)> observer;
};

struct SimulationResult {
  FluxSeries flux;
  StateField final_state;
  SolverStats stats;
};

/// D = D_ref * sqrt((m_ref/m) * (T/T_ref)).
double knudsen_diffusivity(double molar_mass, double temperature, const ReactorGeometry& geometry);

/// Fick's-law outlet flux in nmol/s: D * A * (-dc/dx) with dc/dx in mol/m^4.
double outlet_flux(double gradient, double diffusivity, double area);

/// Solve the pulse-response problem. Pulses enter at the inlet face as Gaussians (center = delay,
/// sigma = pulse_width); the outlet is held at zero concentration. Throws SimulationError when the
/// nonlinear solve fails after all step halvings.
SimulationResult simulate(const Mechanism& mechanism, const ReactorGeometry& geometry,
                          const ExperimentDesign& design, const ParameterSet& params,
                          const SimulationOptions& options = {});
SimulationResult simulate(const Mechanism& mechanism, const ReactorGeometry& geometry,
                          const ExperimentDesign& design, const SimulationOptions& options = {});

/// Analytic outlet flux (nmol/s) of an impulse through a uniform inert bed: zero-flux inlet,
/// zero-concentration outlet. Throws NumericalError if the series fails to converge in 200 terms.
FluxSeries inert_reference_curve(const ReactorGeometry& geometry, double diffusivity, double pulse_nmol,
                                 std::span<const double> time_grid, const std::string& gas = "inert");

/// Dimensionless standard diffusion curve F(tau) = flux * eps L^2 / (D N) at tau = t D / (eps L^2).
double standard_diffusion_curve(double tau);

}  // namespace tapdoe
