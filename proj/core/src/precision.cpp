#include "tapdoe/precision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "tapdoe/errors.hpp"
#include "tapdoe/parallel.hpp"

namespace tapdoe {

const Eigen::MatrixXd& DynamicSensitivity::gas(std::string_view name) const {
  for (std::size_t g = 0; g < gases.size(); ++g) {
    if (gases[g] == name) return q[g];
  }
  throw InputError("sensitivity has no gas '" + std::string(name) + "'");
}

DynamicSensitivity dynamic_sensitivity(const Model& model, const ExperimentDesign& design, const ParameterSet& theta,
                                       double step) {
  if (!(step > 0.0)) throw InputError("sensitivity step must be > 0");
  DynamicSensitivity out;
  out.parameters = theta.free_names();
  out.nominal = model.simulate(design, theta);
  out.gases = out.nominal.gases;
  const auto m = theta.free_count();
  const auto rows = out.nominal.values.rows();
  out.q.assign(out.gases.size(), Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(m)));

  // probes ignore the bounds: the sensitivity is a property of the model, not the fit
  ParameterSet probe_base = theta;
  for (const auto& name : out.parameters) probe_base.set_bounds(name, -std::numeric_limits<double>::infinity(),
                                                                std::numeric_limits<double>::infinity());
  std::vector<Eigen::MatrixXd> diffs(m);
  parallel_for(m, model.threads, [&](std::size_t i) {
    const auto& name = out.parameters[i];
    const double v = theta.value(name);
    ParameterSet up = probe_base, down = probe_base;
    up.set_value(name, v + step);
    down.set_value(name, v - step);
    FluxSeries fu, fd;
    try {
      fu = model.simulate(design, up);
      fd = model.simulate(design, down);
    } catch (const SimulationError& e) {
      throw SimulationError(e.time(), std::string(e.what()) + " [sensitivity probe of " + name + "]");
    }
    diffs[i] = (fu.values - fd.values) / (2.0 * step);
  });
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t g = 0; g < out.gases.size(); ++g) {
      out.q[g].col(static_cast<Eigen::Index>(i)) = diffs[i].col(static_cast<Eigen::Index>(g));
    }
  }
  return out;
}

Eigen::MatrixXd information_matrix(const DynamicSensitivity& sensitivity, const std::map<std::string, double>& sigma) {
  const auto m = static_cast<Eigen::Index>(sensitivity.parameters.size());
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t g = 0; g < sensitivity.gases.size(); ++g) {
    auto it = sigma.find(sensitivity.gases[g]);
    if (it == sigma.end() || !(it->second > 0.0)) continue;
    info.noalias() += sensitivity.q[g].transpose() * sensitivity.q[g] / (it->second * it->second);
  }
  return info;
}

namespace {

Eigen::MatrixXd posterior(const Eigen::MatrixXd& info, const Eigen::MatrixXd& prior_covariance) {
  if (prior_covariance.rows() != info.rows() || prior_covariance.cols() != info.cols()) {
    throw InputError("prior covariance is " + std::to_string(prior_covariance.rows()) + "x" +
                     std::to_string(prior_covariance.cols()) + " but there are " + std::to_string(info.rows()) +
                     " free parameters");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> prior_lu(prior_covariance);
  if (!prior_lu.isInvertible()) throw NumericalError("prior covariance is singular");
  Eigen::MatrixXd bracket = info + prior_lu.inverse();
  bracket = 0.5 * (bracket + bracket.transpose());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(bracket);
  if (!lu.isInvertible()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bracket);
    const auto& s = svd.singularValues();
    throw NumericalError("information bracket is singular (condition number " +
                         std::to_string(s[0] / s[s.size() - 1]) + ")");
  }
  Eigen::MatrixXd v = lu.inverse();
  return 0.5 * (v + v.transpose());
}

}  // namespace

Eigen::MatrixXd fisher_information(const DynamicSensitivity& sensitivity, const std::map<std::string, double>& sigma,
                                   const Eigen::MatrixXd& prior_covariance) {
  return posterior(information_matrix(sensitivity, sigma), prior_covariance);
}

Eigen::MatrixXd fisher_information(const std::vector<Eigen::MatrixXd>& q, const std::vector<double>& sigma,
                                   const Eigen::MatrixXd& prior_covariance) {
  if (q.size() != sigma.size()) throw InputError("need one sigma per sensitivity block");
  const auto m = prior_covariance.rows();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t g = 0; g < q.size(); ++g) {
    if (q[g].cols() != m) throw InputError("sensitivity block has the wrong number of parameters");
    if (!(sigma[g] > 0.0)) continue;
    info.noalias() += q[g].transpose() * q[g] / (sigma[g] * sigma[g]);
  }
  return posterior(info, prior_covariance);
}

Criterion parse_criterion(std::string_view text) {
  if (text == "A" || text == "a") return Criterion::A;
  if (text == "D" || text == "d") return Criterion::D;
  if (text == "E" || text == "e") return Criterion::E;
  throw InputError("unknown criterion '" + std::string(text) + "' (expected A, D or E)");
}

std::string to_string(Criterion kind) {
  switch (kind) {
    case Criterion::A: return "A";
    case Criterion::D: return "D";
    case Criterion::E: return "E";
  }
  return "?";
}

double criterion(const Eigen::MatrixXd& v, Criterion kind) {
  if (v.rows() != v.cols()) throw InputError("criterion needs a square matrix");
  if (v.rows() == 0) return kind == Criterion::D ? 1.0 : 0.0;
  switch (kind) {
    case Criterion::A: return v.trace();
    case Criterion::D: return v.determinant();
    case Criterion::E: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (v + v.transpose()), Eigen::EigenvaluesOnly);
      return eig.eigenvalues().maxCoeff();
    }
  }
  return 0.0;
}

Eigen::MatrixXd restrict_to(const Eigen::MatrixXd& v, const std::vector<std::string>& names,
                            const std::vector<std::string>& subset) {
  std::vector<Eigen::Index> idx;
  for (const auto& s : subset) {
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) throw InputError("subset parameter '" + s + "' is not a free parameter");
    idx.push_back(it - names.begin());
  }
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) out(i, j) = v(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return out;
}

std::size_t DesignSpace::size() const {
  std::size_t n = delays.size() * temperatures.size();
  for (const auto& [gas, levels] : intensities) n *= levels.size();
  return intensities.empty() ? 0 : n;
}

void DesignSpace::validate() const {
  if (size() == 0) throw InputError("design space is empty");
  bool delayed_found = false;
  for (const auto& [gas, levels] : intensities) {
    if (gas == delayed_gas) delayed_found = true;
    for (double l : levels) {
      if (!(l >= 0.0)) throw InputError("design space intensity of " + gas + " must be >= 0");
    }
  }
  if (!delayed_found && !(delays.size() == 1 && delays[0] == 0.0)) {
    throw InputError("delayed gas '" + delayed_gas + "' is not pulsed in the design space");
  }
  for (double d : delays) {
    if (!(d >= 0.0 && d < horizon)) throw InputError("design space delays must lie in [0, horizon)");
  }
  for (double t : temperatures) {
    if (!(t > 0.0)) throw InputError("design space temperatures must be > 0");
  }
}

std::vector<ExperimentDesign> DesignSpace::enumerate() const {
  validate();
  std::vector<ExperimentDesign> out;
  out.reserve(size());
  std::vector<std::size_t> level(intensities.size(), 0);
  while (true) {
    for (double delay : delays) {
      for (double temp : temperatures) {
        ExperimentDesign d;
        d.temperature = temp;
        d.horizon = horizon;
        for (std::size_t g = 0; g < intensities.size(); ++g) {
          const auto& [gas, levels] = intensities[g];
          d.pulses.push_back({gas, levels[level[g]], gas == delayed_gas ? delay : 0.0});
        }
        out.push_back(std::move(d));
      }
    }
    // odometer over the intensity levels, last gas fastest
    std::size_t g = intensities.size();
    while (g > 0) {
      --g;
      if (++level[g] < intensities[g].second.size()) break;
      level[g] = 0;
      if (g == 0) return out;
    }
    if (intensities.empty()) return out;
  }
}

DesignSpace default_design_space() {
  DesignSpace s;
  s.intensities = {{"C3H8", {0.5, 1.0, 2.0}}, {"O2", {0.5, 1.0, 2.0}}};
  s.delayed_gas = "C3H8";
  s.delays = {0.0, 0.15, 0.3, 0.45, 0.6};
  s.temperatures = {600.0, 650.0, 700.0, 750.0};
  return s;
}

std::vector<FisherEvaluation> design_search(const Model& model, const ParameterSet& theta,
                                            const Eigen::MatrixXd& prior_covariance,
                                            const std::vector<ExperimentDesign>& designs,
                                            const std::map<std::string, double>& sigma,
                                            const DesignSearchOptions& options) {
  if (designs.empty()) throw InputError("design space is empty");
  const auto names = theta.free_names();
  if (!options.subset.empty()) restrict_to(prior_covariance, names, options.subset);  // validates names
  std::vector<FisherEvaluation> evals(designs.size());
  // the designs are the parallel unit; each sensitivity runs its probes serially
  Model serial = model;
  serial.threads = 1;
  parallel_for(designs.size(), options.threads, [&](std::size_t i) {
    auto& e = evals[i];
    e.design = designs[i];
    e.index = i;
    try {
      const auto sens = dynamic_sensitivity(serial, designs[i], theta, options.step);
      e.v = fisher_information(sens, sigma, prior_covariance);
      const Eigen::MatrixXd vs = options.subset.empty() ? e.v : restrict_to(e.v, names, options.subset);
      e.value = criterion(vs, options.kind);
    } catch (const NumericalError& err) {
      e.failed = true;
      e.error = err.what();
    }
  });
  std::stable_sort(evals.begin(), evals.end(), [](const FisherEvaluation& a, const FisherEvaluation& b) {
    if (a.failed != b.failed) return !a.failed;
    if (a.failed) return false;
    return a.value < b.value;
  });
  return evals;
}

std::vector<StudyRow> predicted_vs_actual_study(const Model& model, const ParameterSet& truth, const FitResult& current,
                                                const std::vector<Observation>& previous,
                                                const std::vector<ExperimentDesign>& designs,
                                                const std::map<std::string, double>& sigma,
                                                const PrecisionStudyOptions& options) {
  if (designs.empty()) throw InputError("design space is empty");
  const auto& names = current.names;
  std::vector<StudyRow> rows(designs.size());
  Model serial = model;
  serial.threads = 1;
  auto reduce = [&](const Eigen::MatrixXd& v) {
    return options.subset.empty() ? v : restrict_to(v, names, options.subset);
  };
  parallel_for(designs.size(), options.threads, [&](std::size_t i) {
    auto& row = rows[i];
    row.design = designs[i];
    row.index = i;
    try {
      const auto sens = dynamic_sensitivity(serial, designs[i], current.params, options.step);
      const Eigen::MatrixXd v = reduce(fisher_information(sens, sigma, current.covariance));
      const std::uint64_t seed = stream_seed(options.seed, "design-" + std::to_string(i));
      const ParameterSet generator =
          perturb_parameters(truth, options.perturbation, stream_seed(seed, "perturbation"));
      std::vector<Observation> data = previous;
      const auto noise = options.noise ? sigma : std::map<std::string, double>{};
      data.push_back(synthetic_observation(serial, designs[i], generator, noise, seed));
      data.back().sigma = sigma;
      const FitResult refit = fit(serial, data, current.params, options.fit);
      const Eigen::MatrixXd actual = reduce(refit.covariance);
      for (Criterion k : {Criterion::A, Criterion::D, Criterion::E}) {
        row.predicted[k] = criterion(v, k);
        row.actual[k] = criterion(actual, k);
      }
      row.ci95 = refit.ci95;
      row.estimate = refit.params.free_values();
    } catch (const NumericalError& err) {
      row.failed = true;
      row.error = err.what();
    }
  });
  return rows;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InputError("rank correlation needs equal-length samples");
  if (a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

}  // namespace tapdoe
