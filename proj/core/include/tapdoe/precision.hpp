#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tapdoe/estimation.hpp"
#include "tapdoe/reactor.hpp"
#include "tapdoe/synthetic.hpp"

namespace tapdoe {

/// Outlet-flux sensitivities: one (time x free parameter) matrix per gas, in (nmol/s)/eV.
struct DynamicSensitivity {
  std::vector<std::string> gases;
  std::vector<std::string> parameters;
  std::vector<Eigen::MatrixXd> q;
  FluxSeries nominal;

  const Eigen::MatrixXd& gas(std::string_view name) const;
};

/// Central differences of the outlet flux w.r.t. every free parameter of `theta`.
DynamicSensitivity dynamic_sensitivity(const Model& model, const ExperimentDesign& design, const ParameterSet& theta,
                                       double step = 1e-3);

/// Inverse-variance weighted information term sum_gas sigma^-2 Q^T Q (gases with sigma <= 0 skipped).
Eigen::MatrixXd information_matrix(const DynamicSensitivity& sensitivity, const std::map<std::string, double>& sigma);

/// V = [sum_gas sigma^-2 Q^T Q + prior^-1]^-1.
Eigen::MatrixXd fisher_information(const DynamicSensitivity& sensitivity, const std::map<std::string, double>& sigma,
                                   const Eigen::MatrixXd& prior_covariance);
Eigen::MatrixXd fisher_information(const std::vector<Eigen::MatrixXd>& q, const std::vector<double>& sigma,
                                   const Eigen::MatrixXd& prior_covariance);

enum class Criterion { A, D, E };
Criterion parse_criterion(std::string_view text);
std::string to_string(Criterion kind);

/// A = trace, D = determinant, E = largest eigenvalue; lower is better.
double criterion(const Eigen::MatrixXd& v, Criterion kind);

/// Rows and columns of `v` for the named parameters (in that order).
Eigen::MatrixXd restrict_to(const Eigen::MatrixXd& v, const std::vector<std::string>& names,
                            const std::vector<std::string>& subset);

/// Full-factorial grid of pulse experiments. Every gas in `intensities` is pulsed; only
/// `delayed_gas` is delayed, the others enter at t = 0. Enumeration order: intensities of
/// each gas in declared order (first gas slowest), then delay, then temperature.
struct DesignSpace {
  std::vector<std::pair<std::string, std::vector<double>>> intensities;
  std::string delayed_gas;
  std::vector<double> delays;
  std::vector<double> temperatures;
  double horizon = 2.5;

  std::vector<ExperimentDesign> enumerate() const;
  std::size_t size() const;
  void validate() const;
};

/// Intensities {0.5, 1, 2} nmol for C3H8 and O2, propane delay {0 .. 0.6} s, 600-750 K.
DesignSpace default_design_space();

struct FisherEvaluation {
  ExperimentDesign design;
  std::size_t index = 0;  ///< position in the enumeration
  Eigen::MatrixXd v;    ///< predicted covariance over all free parameters
  double value = 0.0;   ///< criterion of v, restricted to the search subset when one is set
  bool failed = false;
  std::string error;
};

struct DesignSearchOptions {
  Criterion kind = Criterion::D;
  std::vector<std::string> subset;  ///< empty = all free parameters
  double step = 1e-3;
  unsigned threads = 0;
};

/// Evaluate every design; successes sorted ascending by criterion (ties by enumeration
/// order), failures appended after them.
std::vector<FisherEvaluation> design_search(const Model& model, const ParameterSet& theta,
                                            const Eigen::MatrixXd& prior_covariance,
                                            const std::vector<ExperimentDesign>& designs,
                                            const std::map<std::string, double>& sigma,
                                            const DesignSearchOptions& options = {});

struct StudyRow {
  ExperimentDesign design;
  std::size_t index = 0;
  std::map<Criterion, double> predicted;
  std::map<Criterion, double> actual;
  Eigen::VectorXd ci95;  ///< per free parameter after the refit
  Eigen::VectorXd estimate;
  bool failed = false;
  std::string error;
};

struct PrecisionStudyOptions {
  std::vector<std::string> subset;
  double perturbation = 0.0;  ///< eV, applied to the truth before generating each experiment
  bool noise = true;          ///< add measurement noise to the generated experiments
  std::uint64_t seed = 0;
  FitOptions fit;
  double step = 1e-3;
  unsigned threads = 0;
};

/// For each design: predict V from the current fit, generate the experiment from the
/// truth with noise, refit on previous + new data and take the criteria of the refit covariance.
std::vector<StudyRow> predicted_vs_actual_study(const Model& model, const ParameterSet& truth, const FitResult& current,
                                                const std::vector<Observation>& previous,
                                                const std::vector<ExperimentDesign>& designs,
                                                const std::map<std::string, double>& sigma,
                                                const PrecisionStudyOptions& options = {});

/// Spearman rank correlation with average ranks for ties; NaN when either side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace tapdoe
