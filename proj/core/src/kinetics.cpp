#include "tapdoe/kinetics.hpp"

#include <cmath>

#include "tapdoe/constants.hpp"
#include "tapdoe/errors.hpp"

namespace tapdoe {

RateConstants rate_constants(double delta_g, double g_activation, bool reversible, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InputError("temperature must be positive, got " + std::to_string(temperature));
  }
  const double kt = constants::kBoltzmannEv * temperature;
  RateConstants k;
  k.forward = constants::kBoltzmannOverPlanck * temperature * std::exp(-g_activation / kt);
  // k_r = k_f / K_eq with K_eq = exp(-dG/kT)
  k.reverse = reversible ? k.forward * std::exp(delta_g / kt) : 0.0;
  return k;
}

RateConstants rate_constants(const ReactionStep& step, double temperature) {
  return rate_constants(step.delta_g, step.g_activation, step.reversible, temperature);
}

namespace {

std::vector<RateConstants> constants_from(const Mechanism& mechanism, double temperature,
                                          const StepEnergies* energies) {
  std::vector<RateConstants> out;
  const auto& steps = mechanism.steps();
  for (std::size_t j = 0; j < steps.size(); ++j) {
    double dg = steps[j].delta_g;
    double ga = steps[j].g_activation;
    if (energies != nullptr) {
      dg = energies->delta_g.at(j);
      ga = energies->g_activation.at(j);
    }
    out.push_back(rate_constants(dg, ga, steps[j].reversible, temperature));
  }
  return out;
}

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

CompiledKinetics::CompiledKinetics(const Mechanism& mechanism, double temperature)
    : CompiledKinetics(mechanism, constants_from(mechanism, temperature, nullptr)) {}

CompiledKinetics::CompiledKinetics(const Mechanism& mechanism, double temperature, const StepEnergies& energies)
    : CompiledKinetics(mechanism, constants_from(mechanism, temperature, &energies)) {}

CompiledKinetics::CompiledKinetics(const Mechanism& mechanism, std::vector<RateConstants> constants)
    : constants_(std::move(constants)) {
  if (constants_.size() != mechanism.steps().size()) {
    throw InputError("rate constant count does not match step count");
  }
  compile(mechanism);
}

void CompiledKinetics::compile(const Mechanism& mechanism) {
  n_species_ = mechanism.species().size();
  const double c0 = mechanism.standard_concentration();
  const auto& steps = mechanism.steps();
  steps_.clear();
  inert_ = true;
  for (std::size_t j = 0; j < steps.size(); ++j) {
    Step s;
    int forward_order = 0, reverse_order = 0;
    std::vector<int> net(n_species_, 0);
    for (const auto& t : steps[j].reactants) {
      auto idx = mechanism.index_of(t.species);
      s.forward.push_back({idx, t.coefficient});
      forward_order += t.coefficient;
      net[idx] -= t.coefficient;
    }
    for (const auto& t : steps[j].products) {
      auto idx = mechanism.index_of(t.species);
      s.reverse.push_back({idx, t.coefficient});
      reverse_order += t.coefficient;
      net[idx] += t.coefficient;
    }
    if (s.forward.size() + s.reverse.size() > 64) throw InputError("too many terms in one step");
    for (std::size_t i = 0; i < n_species_; ++i) {
      if (net[i] != 0) s.net.emplace_back(i, net[i]);
    }
    // r = c0 k prod (c/c0)^nu  =>  effective constant k c0^(1 - order)
    s.kf = constants_[j].forward * std::pow(c0, 1 - forward_order);
    s.kr = constants_[j].reverse * std::pow(c0, 1 - reverse_order);
    if (s.kf != 0.0 || s.kr != 0.0) inert_ = false;
    steps_.push_back(std::move(s));
  }
}

void CompiledKinetics::rates(std::span<const double> conc, std::span<double> out) const {
  for (std::size_t j = 0; j < steps_.size(); ++j) {
    const auto& s = steps_[j];
    double f = s.kf;
    for (const auto& t : s.forward) f *= ipow(conc[t.species], t.order);
    double b = s.kr;
    if (b != 0.0) {
      for (const auto& t : s.reverse) b *= ipow(conc[t.species], t.order);
    }
    out[j] = f - b;
  }
}

Eigen::VectorXd CompiledKinetics::rates(std::span<const double> conc) const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(steps_.size()));
  rates(conc, std::span<double>(r.data(), steps_.size()));
  return r;
}

void CompiledKinetics::production(std::span<const double> conc, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& s : steps_) {
    double f = s.kf;
    for (const auto& t : s.forward) f *= ipow(conc[t.species], t.order);
    double b = s.kr;
    if (b != 0.0) {
      for (const auto& t : s.reverse) b *= ipow(conc[t.species], t.order);
    }
    const double r = f - b;
    for (const auto& [i, nu] : s.net) out[i] += nu * r;
  }
}

void CompiledKinetics::production_jacobian(std::span<const double> conc, std::span<double> production,
                                           Eigen::Ref<Eigen::MatrixXd> jacobian) const {
  std::fill(production.begin(), production.end(), 0.0);
  double dr[64];
  std::size_t dr_idx[64];
  for (const auto& s : steps_) {
    std::size_t nd = 0;
    auto mass_action = [&](const std::vector<Term>& terms, double k, double sign) {
      double value = k;
      for (const auto& t : terms) value *= ipow(conc[t.species], t.order);
      if (k == 0.0) return value;
      for (std::size_t a = 0; a < terms.size(); ++a) {
        double d = k * terms[a].order * ipow(conc[terms[a].species], terms[a].order - 1);
        for (std::size_t b = 0; b < terms.size(); ++b) {
          if (b != a) d *= ipow(conc[terms[b].species], terms[b].order);
        }
        dr[nd] = sign * d;
        dr_idx[nd] = terms[a].species;
        ++nd;
      }
      return value;
    };
    const double r = mass_action(s.forward, s.kf, 1.0) - mass_action(s.reverse, s.kr, -1.0);
    for (const auto& [i, nu] : s.net) {
      production[i] += nu * r;
      for (std::size_t d = 0; d < nd; ++d) {
        jacobian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(dr_idx[d])) += nu * dr[d];
      }
    }
  }
}

Eigen::VectorXd reaction_rates(const Mechanism& mechanism, const CompiledKinetics& kinetics,
                               std::span<const double> gas_conc, std::span<const double> surf_conc) {
  if (gas_conc.size() != mechanism.gas_count() || surf_conc.size() != mechanism.surface_count()) {
    throw InputError("concentration vector sizes do not match the mechanism");
  }
  std::vector<double> y;
  y.reserve(gas_conc.size() + surf_conc.size());
  for (double c : gas_conc) {
    if (c < 0.0) throw InputError("negative gas concentration");
    y.push_back(c);
  }
  for (double c : surf_conc) {
    if (c < 0.0) throw InputError("negative surface concentration");
    y.push_back(c);
  }
  return kinetics.rates(y);
}

Eigen::VectorXd reaction_rates(const Mechanism& mechanism, double temperature, std::span<const double> gas_conc,
                               std::span<const double> surf_conc) {
  return reaction_rates(mechanism, CompiledKinetics(mechanism, temperature), gas_conc, surf_conc);
}

}  // namespace tapdoe
