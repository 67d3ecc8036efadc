#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tapdoe/mechanism.hpp"
#include "tapdoe/parameters.hpp"
#include "tapdoe/reactor.hpp"
#include "tapdoe/synthetic.hpp"

namespace tapdoe {

/// Everything needed to turn a design and a parameter set into outlet fluxes.
struct Model {
  Mechanism mechanism;
  ReactorGeometry geometry;
  SimulationOptions options;
  unsigned threads = 0;  ///< workers for finite-difference probes; 0 = all cores

  FluxSeries simulate(const ExperimentDesign& design, const ParameterSet& params) const;
};

/// One observed experiment. Gases missing from `sigma`, or with sigma 0, carry no weight.
struct Observation {
  ExperimentDesign design;
  FluxSeries flux;
  std::map<std::string, double> sigma;  ///< nmol/s per gas
  std::uint64_t seed = 0;               ///< noise seed, kept for the run report
};

/// The "perform experiment" boundary: simulate `truth` at `design` and add noise.
Observation synthetic_observation(const Model& model, const ExperimentDesign& design, const ParameterSet& truth,
                                  const std::map<std::string, double>& sigma, std::uint64_t seed);

/// Number of weighted samples (time points x weighted gases) in the observations.
std::size_t sample_count(const std::vector<Observation>& observations);

/// Weighted residuals (observed - simulated)/sigma for one observation.
Eigen::VectorXd weighted_residuals(const Observation& observation, const FluxSeries& simulated);
Eigen::VectorXd weighted_residuals(const Model& model, const std::vector<Observation>& observations,
                                   const ParameterSet& params);

/// J = 1/2 * sum over experiments, times and gases of ((observed - simulated)/sigma)^2.
double objective(const Observation& observation, const FluxSeries& simulated);
double objective(const Model& model, const std::vector<Observation>& observations, const ParameterSet& params);

/// Residual vector r(theta) with box bounds; J = 1/2 |r|^2.
struct LeastSquaresProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residuals;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  unsigned threads = 1;  ///< workers for Jacobian columns
};

enum class FitMethod { levenberg_marquardt, bfgs };
enum class HessianMode { gauss_newton, finite_difference };

struct FitOptions {
  FitMethod method = FitMethod::levenberg_marquardt;
  int max_iterations = 100;
  double gradient_tolerance = 1e-6;  ///< infinity norm of the projected gradient of J
  double objective_tolerance = 1e-10;  ///< relative change of J between accepted iterates
  double step_tolerance = 1e-7;      ///< eV, infinity norm of an accepted step
  double jacobian_step = 1e-4;       ///< eV, central differences
  HessianMode hessian = HessianMode::gauss_newton;
  double hessian_step = 1e-4;        ///< eV
  std::function<void(int iteration, double objective)> progress;
};

struct FitIteration {
  int iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  double damping = 0.0;
};

/// Minimizer output for a bare least-squares problem.
struct MinimizeResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;  ///< of the residuals at x
  bool converged = false;
  std::string status;
  int iterations = 0;
  int evaluations = 0;
  std::vector<FitIteration> trace;
};

MinimizeResult minimize(const LeastSquaresProblem& problem, const Eigen::VectorXd& start, const FitOptions& options);

/// Central-difference Jacobian of the residuals, one column per parameter.
Eigen::MatrixXd residual_jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& x, double step);

/// Central finite-difference Hessian of a scalar function, symmetrized.
Eigen::MatrixXd finite_difference_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double step = 1e-4);

struct Uncertainty {
  Eigen::MatrixXd covariance;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd ci95;
  bool singular = false;  ///< pseudo-inverse used
};

/// covariance = H^-1 (pseudo-inverse when H is rank deficient), std error = sqrt(diag),
/// ci95 = 1.96 * std error. Throws NumericalError "not at a minimum" on a negative variance.
Uncertainty covariance_and_ci(const Eigen::MatrixXd& hessian);

struct FitResult {
  ParameterSet params;
  std::vector<std::string> names;  ///< free parameters, in column order
  double objective = 0.0;
  Eigen::MatrixXd hessian;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd ci95;
  bool converged = false;
  bool covariance_singular = false;
  std::string status;
  int iterations = 0;
  int evaluations = 0;
  std::size_t samples = 0;
  std::vector<FitIteration> trace;
  std::vector<std::string> warnings;
};

/// Local fit of the free parameters of `initial` to the observations.
FitResult fit(const Model& model, const std::vector<Observation>& observations, const ParameterSet& initial,
              const FitOptions& options = {});

/// Hessian of J over the free parameters at `params` (Gauss-Newton or finite differences).
Eigen::MatrixXd hessian(const Model& model, const std::vector<Observation>& observations,
                        const ParameterSet& params, HessianMode mode = HessianMode::gauss_newton,
                        double step = 1e-4, unsigned threads = 0);

}  // namespace tapdoe
