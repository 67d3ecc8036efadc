#include "tapdoe/divergence.hpp"

#include <algorithm>
#include <cmath>

#include "tapdoe/errors.hpp"
#include "tapdoe/parallel.hpp"
#include "tapdoe/synthetic.hpp"

namespace tapdoe {

DivergenceEvaluation hr_divergence(const std::vector<FluxSeries>& outputs, const std::map<std::string, double>& sigma) {
  if (outputs.size() < 2) throw InputError("divergence needs at least two models");
  DivergenceEvaluation out;
  const auto& ref = outputs.front();
  for (const auto& o : outputs) {
    if (o.gases != ref.gases || o.time.size() != ref.time.size()) {
      throw InputError("candidate models must share gases and time grid");
    }
  }
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    for (std::size_t k = j + 1; k < outputs.size(); ++k) {
      double d = 0.0;
      for (std::size_t g = 0; g < ref.gases.size(); ++g) {
        auto it = sigma.find(ref.gases[g]);
        if (it == sigma.end() || !(it->second > 0.0)) continue;
        const auto col = static_cast<Eigen::Index>(g);
        d += (outputs[j].values.col(col) - outputs[k].values.col(col)).squaredNorm() / (it->second * it->second);
      }
      out.pairs.push_back({j, k, d});
      out.divergence += d;
    }
  }
  return out;
}

DivergenceEvaluation hr_divergence(const std::vector<CandidateModel>& models, const ExperimentDesign& design,
                                   const std::map<std::string, double>& sigma) {
  std::vector<FluxSeries> outputs;
  for (const auto& m : models) {
    try {
      outputs.push_back(m.model.simulate(design, m.params));
    } catch (const SimulationError& e) {
      throw SimulationError(e.time(), std::string(e.what()) + " [model " + m.label + "]");
    }
  }
  auto out = hr_divergence(outputs, sigma);
  out.design = design;
  return out;
}

std::vector<DivergenceEvaluation> divergence_search(const std::vector<CandidateModel>& models,
                                                    const std::vector<ExperimentDesign>& designs,
                                                    const std::map<std::string, double>& sigma, unsigned threads) {
  if (designs.empty()) throw InputError("design space is empty");
  if (models.size() < 2) throw InputError("divergence needs at least two models");
  std::vector<DivergenceEvaluation> evals(designs.size());
  parallel_for(designs.size(), threads, [&](std::size_t i) {
    try {
      evals[i] = hr_divergence(models, designs[i], sigma);
    } catch (const NumericalError& err) {
      evals[i].failed = true;
      evals[i].error = err.what();
    }
    evals[i].design = designs[i];
    evals[i].index = i;
  });
  std::stable_sort(evals.begin(), evals.end(), [](const DivergenceEvaluation& a, const DivergenceEvaluation& b) {
    if (a.failed != b.failed) return !a.failed;
    if (a.failed) return false;
    return a.divergence > b.divergence;
  });
  return evals;
}

BicForm parse_bic_form(std::string_view text) {
  if (text == "printed") return BicForm::printed;
  if (text == "gaussian") return BicForm::gaussian;
  throw InputError("unknown bic_form '" + std::string(text) + "' (expected printed or gaussian)");
}

std::string to_string(BicForm form) { return form == BicForm::printed ? "printed" : "gaussian"; }

namespace {

constexpr double kObjectiveFloor = 1e-300;

void check_bic_inputs(double k, double n, double objective) {
  if (!(n >= 1.0)) throw InputError("BIC needs n >= 1");
  if (!(k >= 0.0)) throw InputError("BIC needs k >= 0");
  if (!(objective > 0.0)) throw InputError("BIC needs J > 0");
}

}  // namespace

double bic(double k, double n, double objective) {
  check_bic_inputs(k, n, objective);
  return k * std::log(n) - 2.0 * std::log(objective);
}

double bic_gaussian(double k, double n, double objective) {
  check_bic_inputs(k, n, objective);
  return n * std::log(objective / n) + k * std::log(n);
}

double bic(BicForm form, double k, double n, double objective) {
  return form == BicForm::printed ? bic(k, n, objective) : bic_gaussian(k, n, objective);
}

std::vector<DiscriminationRow> discriminate(const std::vector<CandidateModel>& models,
                                            const std::vector<Observation>& observations,
                                            const DiscriminationOptions& options) {
  if (models.empty()) throw InputError("no candidate models");
  const std::size_t n = sample_count(observations);
  if (n == 0) throw InputError("observations carry no weighted samples");
  std::vector<DiscriminationRow> rows;
  for (const auto& m : models) {
    DiscriminationRow row;
    row.label = m.label;
    row.k = m.params.free_count();
    row.n = n;
    row.params = m.params;
    row.objective = objective(m.model, observations, m.params);
    const bool selected = options.refit_labels.empty() ||
                          std::find(options.refit_labels.begin(), options.refit_labels.end(), m.label) !=
                              options.refit_labels.end();
    if (options.refit && selected && row.k > 0) {
      try {
        const FitResult f = fit(m.model, observations, m.params, options.fit);
        if (f.objective <= row.objective) {
          row.objective = f.objective;
          row.params = f.params;
        }
        row.refitted = true;
      } catch (const std::exception& e) {
        row.note = std::string("refit failed: ") + e.what();
      }
    }
    if (row.objective < kObjectiveFloor) {
      row.note += (row.note.empty() ? "" : "; ") + std::string("objective floored at 1e-300");
    }
    row.bic = bic(options.form, static_cast<double>(row.k), static_cast<double>(n),
                  std::max(row.objective, kObjectiveFloor));
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const DiscriminationRow& a, const DiscriminationRow& b) { return a.bic < b.bic; });
  return rows;
}

double DivergenceStudyRow::bic_of(std::string_view label) const {
  for (const auto& m : models) {
    if (m.label == label) return m.bic;
  }
  throw InputError("no model labelled '" + std::string(label) + "'");
}

std::vector<DivergenceStudyRow> divergence_study(const std::vector<CandidateModel>& models,
                                                 const std::string& truth_label,
                                                 const std::vector<ExperimentDesign>& designs,
                                                 const std::map<std::string, double>& sigma,
                                                 const DivergenceStudyOptions& options) {
  if (designs.empty()) throw InputError("design space is empty");
  auto truth = std::find_if(models.begin(), models.end(), [&](const CandidateModel& m) { return m.label == truth_label; });
  if (truth == models.end()) throw InputError("ground-truth model '" + truth_label + "' is not a candidate");
  std::vector<DivergenceStudyRow> rows(designs.size());
  parallel_for(designs.size(), options.threads, [&](std::size_t i) {
    auto& row = rows[i];
    row.design = designs[i];
    row.index = i;
    try {
      row.divergence = hr_divergence(models, designs[i], sigma).divergence;
      const std::uint64_t seed = stream_seed(options.seed, "design-" + std::to_string(i));
      const ParameterSet generator =
          perturb_parameters(truth->params, options.perturbation, stream_seed(seed, "perturbation"));
      Observation obs = synthetic_observation(truth->model, designs[i], generator,
                                              options.noise ? sigma : std::map<std::string, double>{}, seed);
      obs.sigma = sigma;
      auto table = discriminate(models, {obs}, options.discrimination);
      // back to candidate order
      for (const auto& m : models) {
        row.models.push_back(*std::find_if(table.begin(), table.end(),
                                           [&](const DiscriminationRow& r) { return r.label == m.label; }));
      }
    } catch (const NumericalError& err) {
      row.failed = true;
      row.error = err.what();
    }
  });
  return rows;
}

}  // namespace tapdoe
