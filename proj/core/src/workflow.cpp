#include "tapdoe/workflow.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "tapdoe/errors.hpp"
#include "tapdoe/io.hpp"
#include "tapdoe/plot.hpp"
#include "tapdoe/synthetic.hpp"

namespace tapdoe {

using json = nlohmann::ordered_json;

namespace {

void say(const Logger& log, const std::string& message) {
  if (log) log(message);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double finite_or_null(double v) { return std::isfinite(v) ? v : 0.0; }

json design_json(const ExperimentDesign& d) {
  json j;
  auto& pulses = j["pulses"] = json::array();
  for (const auto& p : d.pulses) pulses.push_back({{"gas", p.gas}, {"intensity_nmol", p.intensity}, {"delay_s", p.delay}});
  j["temperature_K"] = d.temperature;
  j["horizon_s"] = d.horizon;
  return j;
}

json fit_json(const FitResult& fit) {
  json j;
  j["objective"] = fit.objective;
  j["converged"] = fit.converged;
  j["status"] = fit.status;
  j["iterations"] = fit.iterations;
  j["evaluations"] = fit.evaluations;
  j["samples"] = fit.samples;
  auto& table = j["parameters"] = json::array();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    table.push_back({{"name", fit.names[i]},
                     {"value", fit.params.value(fit.names[i])},
                     {"std_error", fit.std_errors.size() > k ? fit.std_errors[k] : 0.0},
                     {"ci95", fit.ci95.size() > k ? fit.ci95[k] : 0.0}});
  }
  j["covariance_singular"] = fit.covariance_singular;
  j["warnings"] = fit.warnings;
  return j;
}

json sigma_json(const std::map<std::string, double>& sigma) {
  json j = json::object();
  for (const auto& [gas, s] : sigma) j[gas] = s;
  return j;
}

std::string design_columns_header(const DesignSpace& space) {
  std::string h;
  for (const auto& [gas, levels] : space.intensities) h += lower(gas) + "_nmol,";
  return h + "delay_s,temp_K";
}

std::string design_columns(const ExperimentDesign& d, const DesignSpace& space) {
  std::string row;
  for (const auto& [gas, levels] : space.intensities) row += format_sig9(d.intensity(gas)) + ",";
  return row + format_sig9(d.delay(space.delayed_gas)) + "," + format_sig9(d.temperature);
}

Mechanism load_checked(const MechanismEntry& entry) {
  try {
    return load_mechanism(entry.file);
  } catch (const InputError& e) {
    throw InputError(entry.file.string() + ": " + e.what());
  }
}

ParameterSet params_for(const Mechanism& mech, const std::vector<std::string>& free) {
  ParameterSet p = ParameterSet::from_mechanism(mech);
  std::vector<std::string> present;
  for (const auto& name : free) {
    if (p.find(name)) present.push_back(name);
  }
  p.set_free(present);
  return p;
}

double achieved_criterion(const FitResult& fit, const RunConfig& cfg) {
  const Eigen::MatrixXd v = cfg.subset.empty() ? fit.covariance : restrict_to(fit.covariance, fit.names, cfg.subset);
  return criterion(v, cfg.criterion);
}

std::uint64_t experiment_seed(const RunConfig& cfg, std::size_t k) {
  return stream_seed(cfg.seed, "experiment-" + std::to_string(k));
}

}  // namespace

Setup build_setup(const RunConfig& cfg) {
  Setup s;
  std::vector<Mechanism> mechs;
  for (const auto& entry : cfg.mechanisms) mechs.push_back(load_checked(entry));
  auto make_model = [&](const Mechanism& m) {
    Model model;
    model.mechanism = m;
    model.geometry = cfg.geometry;
    model.options = cfg.simulation;
    model.threads = cfg.threads;
    return model;
  };
  for (std::size_t i = 0; i < mechs.size(); ++i) {
    s.candidates.push_back({cfg.mechanisms[i].label, make_model(mechs[i]), params_for(mechs[i], cfg.free)});
  }
  s.model = s.candidates.front().model;
  ParameterSet fitted = ParameterSet::from_mechanism(mechs.front());
  fitted.set_free(cfg.free);
  s.initial = fitted;
  s.initial.reset_free(cfg.initial_reaction, cfg.initial_activation);
  s.initial.validate(s.model.mechanism);

  auto truth = std::find_if(s.candidates.begin(), s.candidates.end(),
                            [&](const CandidateModel& c) { return c.label == cfg.truth; });
  s.truth_model = truth->model;
  s.truth = truth->params;

  NoiseModel noise;
  noise.sigma = cfg.noise_sigma;
  noise.relative_to_peak = cfg.noise_relative;
  s.sigma = noise.resolve(s.truth_model.simulate(cfg.design, s.truth));
  return s;
}

PrecisionReport run_precision_workflow(const RunConfig& cfg, const Logger& log) {
  const Setup setup = build_setup(cfg);
  if (setup.truth_model.mechanism.gas_names() != setup.model.mechanism.gas_names()) {
    throw InputError("truth and fitted mechanisms must share their gases");
  }
  PrecisionReport report;
  report.sigma = setup.sigma;
  const auto designs = cfg.space.enumerate();

  auto run_experiment = [&](const ExperimentDesign& design, const std::string& origin) {
    const std::uint64_t seed = experiment_seed(cfg, report.experiments.size());
    report.observations.push_back(synthetic_observation(setup.truth_model, design, setup.truth, setup.sigma, seed));
    report.experiments.push_back({design, seed, origin});
    say(log, "experiment " + std::to_string(report.experiments.size()) + ": " + design.label());
  };

  run_experiment(cfg.design, "initial");
  FitResult current = fit(setup.model, report.observations, setup.initial, cfg.fit);
  say(log, "fit 0: J = " + format_sig9(current.objective) + " (" + current.status + ")");
  report.iterations.push_back({0, std::nullopt, current, achieved_criterion(current, cfg)});
  report.stop_reason = "maximum iterations reached";

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    DesignSearchOptions opts;
    opts.kind = cfg.criterion;
    opts.subset = cfg.subset;
    opts.step = cfg.sensitivity_step;
    opts.threads = cfg.threads;
    auto ranking = design_search(setup.model, current.params, current.covariance, designs, setup.sigma, opts);
    report.last_ranking = ranking;
    if (ranking.empty() || ranking.front().failed) {
      report.stop_reason = "every candidate design failed";
      break;
    }
    const auto& best = ranking.front();
    const double previous = report.iterations.back().achieved;
    say(log, "iteration " + std::to_string(it) + ": best " + best.design.label() + " predicted " +
                 to_string(cfg.criterion) + " = " + format_sig9(best.value));
    if (!(best.value * cfg.stop_factor <= previous)) {
      report.stop_reason = "predicted " + to_string(cfg.criterion) + " improves by less than " +
                           format_sig9(cfg.stop_factor) + "x";
      break;
    }
    run_experiment(best.design, "designed");
    current = fit(setup.model, report.observations, current.params, cfg.fit);
    say(log, "fit " + std::to_string(it) + ": J = " + format_sig9(current.objective) + " (" + current.status + ")");
    report.iterations.push_back({it, best, current, achieved_criterion(current, cfg)});
  }
  for (const auto& rec : report.iterations) {
    for (const auto& w : rec.fit.warnings) report.warnings.push_back("iteration " + std::to_string(rec.iteration) + ": " + w);
  }
  return report;
}

DivergenceReport run_divergence_workflow(const RunConfig& cfg, const Logger& log) {
  const Setup setup = build_setup(cfg);
  if (setup.candidates.size() < 2) throw InputError("divergence workflow needs at least two mechanisms");
  DivergenceReport report;
  report.sigma = setup.sigma;
  report.ranking = divergence_search(setup.candidates, cfg.space.enumerate(), setup.sigma, cfg.threads);
  const bool any = std::any_of(report.ranking.begin(), report.ranking.end(),
                               [](const DivergenceEvaluation& e) { return !e.failed && e.divergence > 0.0; });
  if (!any) {
    report.discriminating_design = false;
    report.warnings.push_back("no discriminating design exists: every candidate predicts the same fluxes");
    return report;
  }
  const auto& best = report.ranking.front();
  say(log, "max-divergence design: " + best.design.label() + " D = " + format_sig9(best.divergence));

  auto truth = std::find_if(setup.candidates.begin(), setup.candidates.end(),
                            [&](const CandidateModel& c) { return c.label == cfg.truth; });
  const std::uint64_t seed = experiment_seed(cfg, 0);
  const ParameterSet generator = perturb_parameters(truth->params, cfg.perturbation, stream_seed(seed, "perturbation"));
  const Observation obs = synthetic_observation(truth->model, best.design, generator, setup.sigma, seed);
  report.experiment = ExperimentRecord{best.design, seed, "designed"};

  DiscriminationOptions opts;
  opts.refit = cfg.refit_enabled;
  opts.refit_labels = cfg.refit;
  opts.form = cfg.bic_form;
  opts.fit = cfg.fit;
  report.table = discriminate(setup.candidates, {obs}, opts);
  for (const auto& row : report.table) {
    say(log, row.label + ": J = " + format_sig9(row.objective) + " BIC = " + format_sig9(row.bic));
    if (!row.note.empty()) report.warnings.push_back(row.label + ": " + row.note);
  }
  if (report.table.size() >= 2) {
    const double gap = report.table[1].bic - report.table[0].bic;
    if (gap < cfg.bic_gap_threshold) {
      report.warnings.push_back("discrimination lost: BIC gap between " + report.table[0].label + " and " +
                                report.table[1].label + " is " + format_sig9(gap) + " (< " +
                                format_sig9(cfg.bic_gap_threshold) + ")");
    }
  }
  return report;
}

std::vector<ExperimentDesign> study_designs(const RunConfig& cfg) {
  const auto all = cfg.space.enumerate();
  if (cfg.study_designs.empty()) return all;
  std::vector<ExperimentDesign> out;
  for (auto i : cfg.study_designs) {
    if (i >= all.size()) throw InputError("workflow.study_designs index " + std::to_string(i) + " is outside the design space");
    out.push_back(all[i]);
  }
  return out;
}

PrecisionStudyReport run_precision_study(const RunConfig& cfg, const Logger& log) {
  const Setup setup = build_setup(cfg);
  const auto designs = study_designs(cfg);
  PrecisionStudyReport report;
  const std::uint64_t seed = experiment_seed(cfg, 0);
  std::vector<Observation> previous = {synthetic_observation(setup.truth_model, cfg.design, setup.truth, setup.sigma, seed)};
  report.initial_fit = fit(setup.model, previous, setup.initial, cfg.fit);
  say(log, "initial fit: J = " + format_sig9(report.initial_fit.objective));
  PrecisionStudyOptions opts;
  opts.subset = cfg.subset;
  opts.seed = stream_seed(cfg.seed, "precision-study");
  opts.fit = cfg.fit;
  opts.step = cfg.sensitivity_step;
  opts.threads = cfg.threads;
  report.rows = predicted_vs_actual_study(setup.model, setup.truth, report.initial_fit, previous, designs, setup.sigma, opts);
  for (Criterion k : {Criterion::A, Criterion::D, Criterion::E}) {
    std::vector<double> p, a;
    for (const auto& r : report.rows) {
      if (r.failed) continue;
      p.push_back(r.predicted.at(k));
      a.push_back(r.actual.at(k));
    }
    report.rank_correlation[k] = spearman(p, a);
    say(log, to_string(k) + "-criterion rank correlation: " + format_sig9(report.rank_correlation[k]));
  }
  return report;
}

DivergenceStudyReport run_divergence_study(const RunConfig& cfg, bool refit, const Logger& log) {
  const Setup setup = build_setup(cfg);
  if (setup.candidates.size() < 2) throw InputError("divergence study needs at least two mechanisms");
  DivergenceStudyReport report;
  for (const auto& c : setup.candidates) {
    if (c.label != cfg.truth) {
      report.reference_label = c.label;
      break;
    }
  }
  DivergenceStudyOptions opts;
  opts.discrimination.refit = refit;
  opts.discrimination.refit_labels = cfg.refit;
  opts.discrimination.form = cfg.bic_form;
  opts.discrimination.fit = cfg.fit;
  opts.perturbation = cfg.perturbation;
  opts.seed = stream_seed(cfg.seed, "divergence-study");
  opts.threads = cfg.threads;
  report.rows = divergence_study(setup.candidates, cfg.truth, study_designs(cfg), setup.sigma, opts);
  std::vector<double> d, gap;
  for (const auto& r : report.rows) {
    if (r.failed) continue;
    d.push_back(r.divergence);
    gap.push_back(r.bic_of(report.reference_label) - r.bic_of(cfg.truth));
  }
  report.rank_correlation = spearman(d, gap);
  say(log, std::string(refit ? "refit" : "no refit") + ": rank correlation of divergence and delta BIC = " +
               format_sig9(report.rank_correlation));
  return report;
}

std::string fit_report_json(const FitResult& fit) { return fit_json(fit).dump(2) + "\n"; }

std::string ranking_csv(const std::vector<FisherEvaluation>& ranking, const DesignSpace& space) {
  std::string out = "rank," + design_columns_header(space) + ",criterion_value\n";
  std::size_t rank = 0;
  for (const auto& e : ranking) {
    if (e.failed) continue;
    out += std::to_string(++rank) + "," + design_columns(e.design, space) + "," + format_sig9(e.value) + "\n";
  }
  return out;
}

std::string divergence_csv(const std::vector<DivergenceEvaluation>& ranking, const DesignSpace& space) {
  std::string out = "rank," + design_columns_header(space) + ",divergence\n";
  std::size_t rank = 0;
  for (const auto& e : ranking) {
    if (e.failed) continue;
    out += std::to_string(++rank) + "," + design_columns(e.design, space) + "," + format_sig9(e.divergence) + "\n";
  }
  return out;
}

StudyKind parse_study_kind(std::string_view text) {
  if (text == "predicted-vs-actual") return StudyKind::predicted_vs_actual;
  if (text == "divergence-bic") return StudyKind::divergence_bic;
  throw InputError("unknown study kind '" + std::string(text) + "' (expected predicted-vs-actual or divergence-bic)");
}

void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, const Logger& log) {
  const Setup setup = build_setup(cfg);
  const auto result = simulate(setup.model.mechanism, cfg.geometry, cfg.design, setup.candidates.front().params,
                               cfg.simulation);
  Manifest manifest(out);
  manifest.add("flux.csv", flux_to_csv(result.flux), "outlet flux, nmol/s");
  manifest.add("flux.svg", flux_plot_svg(result.flux, nullptr, cfg.mechanisms.front().label + ": " + cfg.design.label()),
               "outlet flux plot");
  manifest.write("simulate", cfg.seed);
  say(log, "simulated " + std::to_string(result.flux.time.size()) + " time points");
}

void cmd_fit(const RunConfig& cfg, const std::filesystem::path& out, const Logger& log) {
  const Setup setup = build_setup(cfg);
  const std::uint64_t seed = experiment_seed(cfg, 0);
  const Observation obs = synthetic_observation(setup.truth_model, cfg.design, setup.truth, setup.sigma, seed);
  const FitResult result = fit(setup.model, {obs}, setup.initial, cfg.fit);
  say(log, "J = " + format_sig9(result.objective) + " (" + result.status + ")");
  const FluxSeries fitted = setup.model.simulate(cfg.design, result.params);
  json report;
  report["design"] = design_json(cfg.design);
  report["seed"] = seed;
  report["sigma"] = sigma_json(setup.sigma);
  report["fit"] = fit_json(result);
  Manifest manifest(out);
  manifest.add("observed.csv", flux_to_csv(obs.flux), "synthetic noisy observation");
  manifest.add("fitted.csv", flux_to_csv(fitted), "model flux at the fitted parameters");
  manifest.add("fit.json", report.dump(2) + "\n", "fit report");
  manifest.add("fit.svg", flux_plot_svg(fitted, &obs.flux, "fit to " + cfg.design.label()), "fit plot");
  manifest.write("fit", cfg.seed);
}

void cmd_doe_precision(const RunConfig& cfg, const std::filesystem::path& out, const Logger& log) {
  const Setup setup = build_setup(cfg);
  const std::uint64_t seed = experiment_seed(cfg, 0);
  const Observation obs = synthetic_observation(setup.truth_model, cfg.design, setup.truth, setup.sigma, seed);
  const FitResult current = fit(setup.model, {obs}, setup.initial, cfg.fit);
  say(log, "fit: J = " + format_sig9(current.objective));
  DesignSearchOptions opts;
  opts.kind = cfg.criterion;
  opts.subset = cfg.subset;
  opts.step = cfg.sensitivity_step;
  opts.threads = cfg.threads;
  const auto ranking = design_search(setup.model, current.params, current.covariance, cfg.space.enumerate(),
                                     setup.sigma, opts);
  json report;
  report["fit"] = fit_json(current);
  report["criterion"] = to_string(cfg.criterion);
  report["subset"] = cfg.subset;
  if (!ranking.empty() && !ranking.front().failed) {
    report["best"] = design_json(ranking.front().design);
    report["best_value"] = ranking.front().value;
    say(log, "best design: " + ranking.front().design.label());
  }
  auto& failures = report["failures"] = json::array();
  for (const auto& e : ranking) {
    if (e.failed) failures.push_back({{"design", design_json(e.design)}, {"error", e.error}});
  }
  Manifest manifest(out);
  manifest.add("designs.csv", ranking_csv(ranking, cfg.space), "ranked designs");
  manifest.add("report.json", report.dump(2) + "\n", "design search report");
  manifest.write("doe-precision", cfg.seed);
}

void cmd_doe_divergence(const RunConfig& cfg, const std::filesystem::path& out, const Logger& log) {
  const Setup setup = build_setup(cfg);
  const auto ranking = divergence_search(setup.candidates, cfg.space.enumerate(), setup.sigma, cfg.threads);
  json report;
  report["sigma"] = sigma_json(setup.sigma);
  if (!ranking.empty() && !ranking.front().failed) {
    report["best"] = design_json(ranking.front().design);
    report["best_divergence"] = ranking.front().divergence;
    say(log, "best design: " + ranking.front().design.label());
  }
  Manifest manifest(out);
  manifest.add("divergence.csv", divergence_csv(ranking, cfg.space), "designs ranked by divergence");
  manifest.add("report.json", report.dump(2) + "\n", "divergence search report");
  manifest.write("doe-divergence", cfg.seed);
}

void cmd_workflow_precision(const RunConfig& cfg, const std::filesystem::path& out, const Logger& log) {
  Manifest manifest(out);
  PrecisionReport report;
  json doc;
  try {
    report = run_precision_workflow(cfg, log);
  } catch (const std::exception& e) {
    doc["error"] = e.what();
    manifest.add("report.json", doc.dump(2) + "\n", "partial workflow report");
    manifest.write("workflow-precision", cfg.seed);
    throw;
  }
  doc["sigma"] = sigma_json(report.sigma);
  auto& experiments = doc["experiments"] = json::array();
  for (std::size_t k = 0; k < report.experiments.size(); ++k) {
    const auto& e = report.experiments[k];
    experiments.push_back({{"design", design_json(e.design)}, {"seed", e.seed}, {"origin", e.origin}});
    manifest.add("experiment_" + std::to_string(k + 1) + ".csv", flux_to_csv(report.observations[k].flux),
                 "observed flux of experiment " + std::to_string(k + 1));
  }
  auto& iterations = doc["iterations"] = json::array();
  for (const auto& it : report.iterations) {
    json j;
    j["iteration"] = it.iteration;
    if (it.chosen) {
      j["chosen_design"] = design_json(it.chosen->design);
      j["predicted_criterion"] = it.chosen->value;
    }
    j["achieved_criterion"] = finite_or_null(it.achieved);
    j["fit"] = fit_json(it.fit);
    iterations.push_back(j);
  }
  doc["criterion"] = to_string(cfg.criterion);
  doc["subset"] = cfg.subset;
  doc["stop_reason"] = report.stop_reason;
  doc["warnings"] = report.warnings;
  manifest.add("report.json", doc.dump(2) + "\n", "precision workflow report");
  if (!report.last_ranking.empty()) {
    manifest.add("last_ranking.csv", ranking_csv(report.last_ranking, cfg.space), "final design search ranking");
  }
  manifest.write("workflow-precision", cfg.seed);
}

void cmd_workflow_divergence(const RunConfig& cfg, const std::filesystem::path& out, const Logger& log) {
  const DivergenceReport report = run_divergence_workflow(cfg, log);
  json doc;
  doc["sigma"] = sigma_json(report.sigma);
  doc["discriminating_design"] = report.discriminating_design;
  if (report.experiment) {
    doc["experiment"] = {{"design", design_json(report.experiment->design)}, {"seed", report.experiment->seed}};
  }
  doc["refit"] = cfg.refit_enabled;
  doc["bic_form"] = to_string(cfg.bic_form);
  auto& table = doc["discrimination"] = json::array();
  for (const auto& r : report.table) {
    table.push_back({{"label", r.label}, {"J", r.objective}, {"k", r.k}, {"n", r.n}, {"BIC", r.bic},
                     {"refitted", r.refitted}, {"note", r.note}});
  }
  doc["warnings"] = report.warnings;
  Manifest manifest(out);
  manifest.add("divergence.csv", divergence_csv(report.ranking, cfg.space), "designs ranked by divergence");
  manifest.add("report.json", doc.dump(2) + "\n", "divergence workflow report");
  manifest.write("workflow-divergence", cfg.seed);
}

void cmd_study(const RunConfig& cfg, StudyKind kind, const std::filesystem::path& out, const Logger& log) {
  Manifest manifest(out);
  json summary;
  if (kind == StudyKind::predicted_vs_actual) {
    const auto report = run_precision_study(cfg, log);
    std::string csv = "index," + design_columns_header(cfg.space);
    for (Criterion k : {Criterion::A, Criterion::D, Criterion::E}) {
      csv += ",predicted_" + to_string(k) + ",actual_" + to_string(k);
    }
    for (const auto& name : report.initial_fit.names) csv += ",ci95_" + name;
    csv += "\n";
    for (const auto& r : report.rows) {
      if (r.failed) continue;
      csv += std::to_string(r.index) + "," + design_columns(r.design, cfg.space);
      for (Criterion k : {Criterion::A, Criterion::D, Criterion::E}) {
        csv += "," + format_sig9(r.predicted.at(k)) + "," + format_sig9(r.actual.at(k));
      }
      for (Eigen::Index i = 0; i < r.ci95.size(); ++i) csv += "," + format_sig9(r.ci95[i]);
      csv += "\n";
    }
    manifest.add("study_precision.csv", csv, "predicted vs actual criteria per design");
    for (Criterion k : {Criterion::A, Criterion::D, Criterion::E}) {
      std::vector<double> p, a;
      for (const auto& r : report.rows) {
        if (r.failed) continue;
        p.push_back(r.predicted.at(k));
        a.push_back(r.actual.at(k));
      }
      ScatterOptions so{to_string(k) + "-criterion", "predicted", "actual after refit", true, true};
      manifest.add("study_precision_" + to_string(k) + ".svg", scatter_svg(p, a, so), "scatter plot");
      summary["rank_correlation"][to_string(k)] = finite_or_null(report.rank_correlation.at(k));
    }
    auto& failures = summary["failures"] = json::array();
    for (const auto& r : report.rows) {
      if (r.failed) failures.push_back({{"index", r.index}, {"error", r.error}});
    }
    summary["initial_fit"] = fit_json(report.initial_fit);
  } else {
    for (bool refit : {false, true}) {
      const auto report = run_divergence_study(cfg, refit, log);
      const std::string tag = refit ? "refit" : "norefit";
      std::string csv = design_columns_header(cfg.space) + ",divergence";
      for (const auto& m : cfg.mechanisms) csv += ",bic_" + m.label;
      csv += "\n";
      std::vector<double> d, gap;
      for (const auto& r : report.rows) {
        if (r.failed) continue;
        csv += design_columns(r.design, cfg.space) + "," + format_sig9(r.divergence);
        for (const auto& m : r.models) csv += "," + format_sig9(m.bic);
        csv += "\n";
        d.push_back(r.divergence);
        gap.push_back(r.bic_of(report.reference_label) - r.bic_of(cfg.truth));
      }
      manifest.add("study_divergence_" + tag + ".csv", csv, "divergence and BIC per design");
      ScatterOptions so{std::string(refit ? "with refit" : "without refit"), "divergence",
                        "BIC(" + report.reference_label + ") - BIC(" + cfg.truth + ")", true, false};
      manifest.add("study_divergence_" + tag + ".svg", scatter_svg(d, gap, so), "scatter plot");
      summary[tag]["rank_correlation"] = finite_or_null(report.rank_correlation);
      summary[tag]["reference"] = report.reference_label;
    }
  }
  manifest.add("summary.json", summary.dump(2) + "\n", "study summary");
  manifest.write(kind == StudyKind::predicted_vs_actual ? "study predicted-vs-actual" : "study divergence-bic", cfg.seed);
}

}  // namespace tapdoe
