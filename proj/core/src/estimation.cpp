#include "tapdoe/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "tapdoe/constants.hpp"
#include "tapdoe/errors.hpp"
#include "tapdoe/parallel.hpp"

namespace tapdoe {

FluxSeries Model::simulate(const ExperimentDesign& design, const ParameterSet& params) const {
  return tapdoe::simulate(mechanism, geometry, design, params, options).flux;
}

Observation synthetic_observation(const Model& model, const ExperimentDesign& design, const ParameterSet& truth,
                                  const std::map<std::string, double>& sigma, std::uint64_t seed) {
  Observation obs;
  obs.design = design;
  obs.flux = add_noise(model.simulate(design, truth), sigma, seed);
  obs.sigma = sigma;
  obs.seed = seed;
  return obs;
}

std::size_t sample_count(const std::vector<Observation>& observations) {
  std::size_t n = 0;
  for (const auto& obs : observations) {
    for (const auto& gas : obs.flux.gases) {
      auto it = obs.sigma.find(gas);
      if (it != obs.sigma.end() && it->second > 0.0) n += obs.flux.time.size();
    }
  }
  return n;
}

Eigen::VectorXd weighted_residuals(const Observation& observation, const FluxSeries& simulated) {
  const auto& obs = observation.flux;
  if (obs.time.size() != simulated.time.size()) {
    throw InputError("observation grid (" + std::to_string(obs.time.size()) + " points) does not match the simulator grid (" +
                     std::to_string(simulated.time.size()) + " points)");
  }
  const auto rows = static_cast<Eigen::Index>(obs.time.size());
  std::vector<std::pair<Eigen::Index, double>> weighted;
  for (std::size_t g = 0; g < obs.gases.size(); ++g) {
    auto it = observation.sigma.find(obs.gases[g]);
    if (it == observation.sigma.end() || !(it->second > 0.0)) continue;
    weighted.emplace_back(static_cast<Eigen::Index>(g), it->second);
  }
  Eigen::VectorXd r(rows * static_cast<Eigen::Index>(weighted.size()));
  Eigen::Index offset = 0;
  for (const auto& [g, sigma] : weighted) {
    const auto sim_col = static_cast<Eigen::Index>(simulated.gas_index(obs.gases[static_cast<std::size_t>(g)]));
    r.segment(offset, rows) = (obs.values.col(g) - simulated.values.col(sim_col)) / sigma;
    offset += rows;
  }
  return r;
}

namespace {

std::vector<FluxSeries> simulate_all(const Model& model, const std::vector<Observation>& observations,
                                     const ParameterSet& params) {
  std::vector<FluxSeries> out;
  out.reserve(observations.size());
  for (const auto& obs : observations) {
    try {
      out.push_back(model.simulate(obs.design, params));
    } catch (const SimulationError& e) {
      throw SimulationError(e.time(), std::string(e.what()) + " [design " + obs.design.label() + "]");
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXd weighted_residuals(const Model& model, const std::vector<Observation>& observations,
                                   const ParameterSet& params) {
  const auto sims = simulate_all(model, observations, params);
  std::vector<Eigen::VectorXd> parts;
  Eigen::Index total = 0;
  for (std::size_t k = 0; k < observations.size(); ++k) {
    parts.push_back(weighted_residuals(observations[k], sims[k]));
    total += parts.back().size();
  }
  Eigen::VectorXd r(total);
  Eigen::Index offset = 0;
  for (const auto& p : parts) {
    r.segment(offset, p.size()) = p;
    offset += p.size();
  }
  return r;
}

double objective(const Observation& observation, const FluxSeries& simulated) {
  return 0.5 * weighted_residuals(observation, simulated).squaredNorm();
}

double objective(const Model& model, const std::vector<Observation>& observations, const ParameterSet& params) {
  const auto sims = simulate_all(model, observations, params);
  double j = 0.0;
  for (std::size_t k = 0; k < observations.size(); ++k) j += objective(observations[k], sims[k]);
  return j;
}

Eigen::MatrixXd residual_jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& x, double step) {
  const auto n = x.size();
  std::vector<Eigen::VectorXd> cols(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), problem.threads, [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    Eigen::VectorXd lo = x, hi = x;
    hi[k] = problem.upper.size() ? std::min(x[k] + step, problem.upper[k]) : x[k] + step;
    lo[k] = problem.lower.size() ? std::max(x[k] - step, problem.lower[k]) : x[k] - step;
    if (!(hi[k] > lo[k])) throw InputError("parameter bounds leave no room for a finite difference");
    cols[i] = (problem.residuals(hi) - problem.residuals(lo)) / (hi[k] - lo[k]);
  });
  Eigen::MatrixXd jac(cols.empty() ? 0 : cols[0].size(), n);
  for (Eigen::Index i = 0; i < n; ++i) jac.col(i) = cols[static_cast<std::size_t>(i)];
  return jac;
}

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  Eigen::VectorXd out = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (lower.size()) out[i] = std::max(out[i], lower[i]);
    if (upper.size()) out[i] = std::min(out[i], upper[i]);
  }
  return out;
}

// Gradient components pushing against an active bound do not count toward stationarity.
double projected_gradient_norm(const Eigen::VectorXd& g, const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (lower.size() && x[i] <= lower[i] && g[i] > 0.0) continue;
    if (upper.size() && x[i] >= upper[i] && g[i] < 0.0) continue;
    norm = std::max(norm, std::abs(g[i]));
  }
  return norm;
}

struct Evaluator {
  const LeastSquaresProblem& problem;
  int count = 0;

  // +inf objective when the model cannot be evaluated at x
  std::pair<Eigen::VectorXd, double> operator()(const Eigen::VectorXd& x) {
    ++count;
    try {
      Eigen::VectorXd r = problem.residuals(x);
      const double j = 0.5 * r.squaredNorm();
      if (std::isfinite(j)) return {std::move(r), j};
    } catch (const NumericalError&) {
    }
    return {Eigen::VectorXd(), std::numeric_limits<double>::infinity()};
  }
};

MinimizeResult levenberg_marquardt(const LeastSquaresProblem& problem, const Eigen::VectorXd& start,
                                   const FitOptions& opt) {
  Evaluator eval{problem};
  MinimizeResult res;
  res.x = clamp(start, problem.lower, problem.upper);
  auto [r, j] = eval(res.x);
  if (!std::isfinite(j)) throw NumericalError("objective is not finite at the starting point");
  const auto n = res.x.size();
  double lambda = 1e-3;
  double nu = 2.0;
  res.status = "iteration limit reached";
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    Eigen::MatrixXd jac = residual_jacobian(problem, res.x, opt.jacobian_step);
    eval.count += 2 * static_cast<int>(n);
    const Eigen::MatrixXd A = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    const double gnorm = projected_gradient_norm(g, res.x, problem.lower, problem.upper);
    res.trace.push_back({iter, j, gnorm, lambda});
    if (opt.progress) opt.progress(iter, j);
    res.iterations = iter;
    if (gnorm < opt.gradient_tolerance) {
      res.converged = true;
      res.status = "gradient below tolerance";
      break;
    }
    Eigen::VectorXd scale = A.diagonal().cwiseMax(1e-12 * std::max(A.diagonal().maxCoeff(), 1e-300));
    bool accepted = false;
    bool stop = false;
    while (!accepted) {
      Eigen::MatrixXd M = A;
      M.diagonal() += lambda * scale;
      Eigen::VectorXd delta = M.ldlt().solve(-g);
      Eigen::VectorXd trial = clamp(res.x + delta, problem.lower, problem.upper);
      delta = trial - res.x;
      if (delta.lpNorm<Eigen::Infinity>() < opt.step_tolerance) {
        res.converged = true;
        res.status = "step below tolerance";
        stop = true;
        break;
      }
      auto [r_new, j_new] = eval(trial);
      const double predicted = -(g.dot(delta) + 0.5 * delta.dot(A * delta));
      if (j_new < j) {
        const double rho = predicted > 0.0 ? (j - j_new) / predicted : 1.0;
        const double change = j - j_new;
        lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2.0;
        res.x = trial;
        r = std::move(r_new);
        const double j_old = j;
        j = j_new;
        accepted = true;
        if (change <= opt.objective_tolerance * std::max(j_old, 1e-300)) {
          res.converged = true;
          res.status = "relative objective change below tolerance";
          stop = true;
        } else if (delta.lpNorm<Eigen::Infinity>() < opt.step_tolerance) {
          res.converged = true;
          res.status = "step below tolerance";
          stop = true;
        }
      } else {
        lambda *= nu;
        nu *= 2.0;
        if (lambda > 1e16) {
          res.converged = true;
          res.status = "no further decrease possible";
          stop = true;
          break;
        }
      }
    }
    res.iterations = iter + 1;
    if (stop) break;
  }
  res.objective = j;
  res.residuals = r;
  res.jacobian = residual_jacobian(problem, res.x, opt.jacobian_step);
  eval.count += 2 * static_cast<int>(n);
  res.evaluations = eval.count;
  return res;
}

MinimizeResult bfgs(const LeastSquaresProblem& problem, const Eigen::VectorXd& start, const FitOptions& opt) {
  Evaluator eval{problem};
  MinimizeResult res;
  res.x = clamp(start, problem.lower, problem.upper);
  auto [r, j] = eval(res.x);
  if (!std::isfinite(j)) throw NumericalError("objective is not finite at the starting point");
  const auto n = res.x.size();
  Eigen::MatrixXd jac = residual_jacobian(problem, res.x, opt.jacobian_step);
  eval.count += 2 * static_cast<int>(n);
  Eigen::VectorXd g = jac.transpose() * r;
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
  // first step: scale the identity by the Gauss-Newton curvature
  const double curvature = (jac.transpose() * jac).diagonal().maxCoeff();
  if (curvature > 0.0) Hinv /= curvature;
  res.status = "iteration limit reached";
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const double gnorm = projected_gradient_norm(g, res.x, problem.lower, problem.upper);
    res.trace.push_back({iter, j, gnorm, 0.0});
    if (opt.progress) opt.progress(iter, j);
    res.iterations = iter;
    if (gnorm < opt.gradient_tolerance) {
      res.converged = true;
      res.status = "gradient below tolerance";
      break;
    }
    Eigen::VectorXd dir = -Hinv * g;
    if (dir.dot(g) >= 0.0) {
      Hinv = Eigen::MatrixXd::Identity(n, n) / std::max(curvature, 1e-300);
      dir = -Hinv * g;
    }
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial, r_new;
    double j_new = j;
    for (int ls = 0; ls < 40; ++ls) {
      trial = clamp(res.x + alpha * dir, problem.lower, problem.upper);
      auto [rt, jt] = eval(trial);
      if (jt <= j + 1e-4 * g.dot(trial - res.x)) {
        r_new = std::move(rt);
        j_new = jt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    res.iterations = iter + 1;
    if (!accepted) {
      res.converged = true;
      res.status = "no further decrease possible";
      break;
    }
    const Eigen::VectorXd s = trial - res.x;
    res.x = trial;
    r = std::move(r_new);
    const double change = j - j_new;
    const double j_old = j;
    j = j_new;
    jac = residual_jacobian(problem, res.x, opt.jacobian_step);
    eval.count += 2 * static_cast<int>(n);
    const Eigen::VectorXd g_new = jac.transpose() * r;
    const Eigen::VectorXd y = g_new - g;
    g = g_new;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      const double rho = 1.0 / sy;
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    if (change <= opt.objective_tolerance * std::max(j_old, 1e-300)) {
      res.converged = true;
      res.status = "relative objective change below tolerance";
      break;
    }
    if (s.lpNorm<Eigen::Infinity>() < opt.step_tolerance) {
      res.converged = true;
      res.status = "step below tolerance";
      break;
    }
  }
  res.objective = j;
  res.residuals = r;
  res.jacobian = jac;
  res.evaluations = eval.count;
  return res;
}

}  // namespace

MinimizeResult minimize(const LeastSquaresProblem& problem, const Eigen::VectorXd& start, const FitOptions& options) {
  if (!problem.residuals) throw InputError("least-squares problem has no residual function");
  if (start.size() == 0) {
    MinimizeResult res;
    res.x = start;
    res.residuals = problem.residuals(start);
    res.objective = 0.5 * res.residuals.squaredNorm();
    res.jacobian = Eigen::MatrixXd(res.residuals.size(), 0);
    res.converged = true;
    res.status = "no free parameters";
    res.evaluations = 1;
    return res;
  }
  return options.method == FitMethod::bfgs ? bfgs(problem, start, options)
                                           : levenberg_marquardt(problem, start, options);
}

Eigen::MatrixXd finite_difference_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double step) {
  const auto n = x.size();
  Eigen::MatrixXd H(n, n);
  const double f0 = f(x);
  auto shifted = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
    Eigen::VectorXd y = x;
    y[i] += di;
    y[j] += dj;
    const double v = f(y);
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite objective in the Hessian probe of parameters " + std::to_string(i) + "," +
                           std::to_string(j));
    }
    return v;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    H(i, i) = (shifted(i, step, i, 0.0) - 2.0 * f0 + shifted(i, -step, i, 0.0)) / (step * step);
    for (Eigen::Index j = 0; j < i; ++j) {
      H(i, j) = (shifted(i, step, j, step) - shifted(i, step, j, -step) - shifted(i, -step, j, step) +
                 shifted(i, -step, j, -step)) /
                (4.0 * step * step);
      H(j, i) = H(i, j);
    }
  }
  return 0.5 * (H + H.transpose());
}

Uncertainty covariance_and_ci(const Eigen::MatrixXd& hessian) {
  if (hessian.rows() != hessian.cols()) throw InputError("Hessian must be square");
  if (!hessian.allFinite()) throw NumericalError("Hessian has non-finite entries");
  const Eigen::MatrixXd H = 0.5 * (hessian + hessian.transpose());
  Uncertainty u;
  const auto n = H.rows();
  if (n == 0) return u;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  const auto& lam = eig.eigenvalues();
  const double tol = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300) * static_cast<double>(n);
  Eigen::VectorXd inv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(lam[i]) <= tol) {
      inv[i] = 0.0;
      u.singular = true;
    } else {
      inv[i] = 1.0 / lam[i];
    }
  }
  u.covariance = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  u.covariance = 0.5 * (u.covariance + u.covariance.transpose());
  u.std_errors.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = u.covariance(i, i);
    if (v < 0.0) throw NumericalError("not at a minimum: negative variance for parameter " + std::to_string(i));
    u.std_errors[i] = std::sqrt(v);
  }
  u.ci95 = constants::kCi95Factor * u.std_errors;
  return u;
}

namespace {

LeastSquaresProblem fit_problem(const Model& model, const std::vector<Observation>& observations,
                                const ParameterSet& params) {
  LeastSquaresProblem problem;
  problem.lower = params.free_lower();
  problem.upper = params.free_upper();
  problem.threads = model.threads;
  problem.residuals = [&model, &observations, &params](const Eigen::VectorXd& x) {
    return weighted_residuals(model, observations, params.with_free_values(x));
  };
  return problem;
}

}  // namespace

Eigen::MatrixXd hessian(const Model& model, const std::vector<Observation>& observations, const ParameterSet& params,
                        HessianMode mode, double step, unsigned threads) {
  auto problem = fit_problem(model, observations, params);
  problem.threads = threads;
  const Eigen::VectorXd x = params.free_values();
  if (mode == HessianMode::gauss_newton) {
    const Eigen::MatrixXd jac = residual_jacobian(problem, x, step);
    return jac.transpose() * jac;
  }
  return finite_difference_hessian(
      [&](const Eigen::VectorXd& y) { return objective(model, observations, params.with_free_values(y)); }, x, step);
}

FitResult fit(const Model& model, const std::vector<Observation>& observations, const ParameterSet& initial,
              const FitOptions& options) {
  if (observations.empty()) throw InputError("fit needs at least one observation");
  initial.validate(model.mechanism);
  const auto problem = fit_problem(model, observations, initial);
  const MinimizeResult m = minimize(problem, initial.free_values(), options);

  FitResult out;
  out.params = initial.with_free_values(m.x);
  out.names = initial.free_names();
  out.objective = m.objective;
  out.converged = m.converged;
  out.status = m.status;
  out.iterations = m.iterations;
  out.evaluations = m.evaluations;
  out.trace = m.trace;
  out.samples = sample_count(observations);
  if (!m.converged) out.warnings.push_back("optimizer stopped before convergence: " + m.status);

  if (options.hessian == HessianMode::gauss_newton) {
    out.hessian = m.jacobian.transpose() * m.jacobian;
  } else {
    out.hessian = hessian(model, observations, out.params, HessianMode::finite_difference, options.hessian_step,
                          model.threads);
  }
  const Uncertainty u = covariance_and_ci(out.hessian);
  out.covariance = u.covariance;
  out.std_errors = u.std_errors;
  out.ci95 = u.ci95;
  out.covariance_singular = u.singular;
  if (u.singular) out.warnings.push_back("Hessian is singular; covariance from the pseudo-inverse");
  return out;
}

}  // namespace tapdoe
