#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tapdoe/config.hpp"
#include "tapdoe/divergence.hpp"
#include "tapdoe/estimation.hpp"
#include "tapdoe/precision.hpp"

namespace tapdoe {

using Logger = std::function<void(const std::string&)>;

/// Models and parameter sets derived from a RunConfig.
struct Setup {
  Model model;             ///< the fitted mechanism (first listed)
  ParameterSet initial;    ///< free entries at the initial guesses
  Model truth_model;
  ParameterSet truth;      ///< table values, same free entries as `initial`
  std::vector<CandidateModel> candidates;  ///< every listed mechanism at its file values
  std::map<std::string, double> sigma;     ///< absolute noise per gas, fixed for the whole run
};

/// Noise sigma is resolved once, from the noiseless truth trace at the configured design.
Setup build_setup(const RunConfig& config);

struct ExperimentRecord {
  ExperimentDesign design;
  std::uint64_t seed = 0;
  std::string origin;  ///< "initial" or "designed"
};

struct IterationRecord {
  int iteration = 0;
  std::optional<FisherEvaluation> chosen;  ///< design picked before this iteration's experiment
  FitResult fit;
  double achieved = 0.0;                   ///< criterion of the fit covariance
};

struct PrecisionReport {
  std::vector<ExperimentRecord> experiments;
  std::vector<IterationRecord> iterations;
  std::vector<Observation> observations;
  std::vector<FisherEvaluation> last_ranking;
  std::string stop_reason;
  std::map<std::string, double> sigma;
  std::vector<std::string> warnings;
};

/// Experiment, fit, design search, repeat. Experiments come from the truth model with noise.
PrecisionReport run_precision_workflow(const RunConfig& config, const Logger& log = {});

struct DivergenceReport {
  std::vector<DivergenceEvaluation> ranking;
  std::optional<ExperimentRecord> experiment;
  std::vector<DiscriminationRow> table;
  bool discriminating_design = true;
  std::map<std::string, double> sigma;
  std::vector<std::string> warnings;
};

/// Divergence search, one experiment from the perturbed truth, then discrimination.
DivergenceReport run_divergence_workflow(const RunConfig& config, const Logger& log = {});

struct PrecisionStudyReport {
  FitResult initial_fit;
  std::vector<StudyRow> rows;
  std::map<Criterion, double> rank_correlation;
};

PrecisionStudyReport run_precision_study(const RunConfig& config, const Logger& log = {});

struct DivergenceStudyReport {
  std::vector<DivergenceStudyRow> rows;
  std::string reference_label;  ///< delta BIC = BIC(reference) - BIC(truth)
  double rank_correlation = 0.0;
};

DivergenceStudyReport run_divergence_study(const RunConfig& config, bool refit, const Logger& log = {});

/// Designs the studies visit: the configured indices, or the whole space.
std::vector<ExperimentDesign> study_designs(const RunConfig& config);

std::string fit_report_json(const FitResult& fit);
std::string ranking_csv(const std::vector<FisherEvaluation>& ranking, const DesignSpace& space);
std::string divergence_csv(const std::vector<DivergenceEvaluation>& ranking, const DesignSpace& space);

enum class StudyKind { predicted_vs_actual, divergence_bic };
StudyKind parse_study_kind(std::string_view text);

// Command entry points. Each writes its outputs plus manifest.json under `out`.
void cmd_simulate(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
void cmd_fit(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
void cmd_doe_precision(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
void cmd_doe_divergence(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
void cmd_workflow_precision(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
void cmd_workflow_divergence(const RunConfig& config, const std::filesystem::path& out, const Logger& log = {});
void cmd_study(const RunConfig& config, StudyKind kind, const std::filesystem::path& out, const Logger& log = {});

}  // namespace tapdoe
