#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tapdoe/estimation.hpp"

namespace tapdoe {

struct CandidateModel {
  std::string label;
  Model model;
  ParameterSet params;  ///< free entries are the ones refit during discrimination
};

struct PairDivergence {
  std::size_t first = 0;
  std::size_t second = 0;
  double value = 0.0;
};

struct DivergenceEvaluation {
  ExperimentDesign design;
  std::size_t index = 0;
  double divergence = 0.0;
  std::vector<PairDivergence> pairs;
  bool failed = false;
  std::string error;
};

/// Hunter-Reiner divergence of precomputed model outputs:
/// sum over pairs j<k, times and gases of (f_j - f_k)^2 / sigma_gas^2.
DivergenceEvaluation hr_divergence(const std::vector<FluxSeries>& outputs, const std::map<std::string, double>& sigma);
DivergenceEvaluation hr_divergence(const std::vector<CandidateModel>& models, const ExperimentDesign& design,
                                   const std::map<std::string, double>& sigma);

/// Evaluate every design; sorted descending by divergence (ties by enumeration order),
/// failures appended after the successes.
std::vector<DivergenceEvaluation> divergence_search(const std::vector<CandidateModel>& models,
                                                    const std::vector<ExperimentDesign>& designs,
                                                    const std::map<std::string, double>& sigma, unsigned threads = 0);

enum class BicForm { printed, gaussian };
BicForm parse_bic_form(std::string_view text);
std::string to_string(BicForm form);

/// k ln(n) - 2 ln(J). Throws InputError unless J > 0.
double bic(double k, double n, double objective);
/// n ln(J/n) + k ln(n), the usual Gaussian-likelihood form.
double bic_gaussian(double k, double n, double objective);
double bic(BicForm form, double k, double n, double objective);

struct DiscriminationRow {
  std::string label;
  double objective = 0.0;
  std::size_t k = 0;
  std::size_t n = 0;
  double bic = 0.0;
  bool refitted = false;
  std::string note;  ///< refit failure or objective floor notice
  ParameterSet params;
};

struct DiscriminationOptions {
  bool refit = false;
  std::vector<std::string> refit_labels;  ///< models refit when `refit` is set; empty = all
  BicForm form = BicForm::gaussian;
  FitOptions fit;
};

/// J and BIC of every candidate against the observations, sorted by BIC ascending.
std::vector<DiscriminationRow> discriminate(const std::vector<CandidateModel>& models,
                                            const std::vector<Observation>& observations,
                                            const DiscriminationOptions& options = {});

struct DivergenceStudyRow {
  ExperimentDesign design;
  std::size_t index = 0;
  double divergence = 0.0;
  std::vector<DiscriminationRow> models;  ///< in candidate order
  bool failed = false;
  std::string error;

  double bic_of(std::string_view label) const;
};

struct DivergenceStudyOptions {
  DiscriminationOptions discrimination;
  double perturbation = 0.05;  ///< eV on the truth's free parameters, fresh draw per design
  bool noise = true;          ///< add measurement noise to the generated experiments
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Per design: divergence at the candidates' parameters, then an experiment generated from
/// the perturbed truth with noise, then discriminate().
std::vector<DivergenceStudyRow> divergence_study(const std::vector<CandidateModel>& models,
                                                 const std::string& truth_label,
                                                 const std::vector<ExperimentDesign>& designs,
                                                 const std::map<std::string, double>& sigma,
                                                 const DivergenceStudyOptions& options = {});

}  // namespace tapdoe
