#include "tapdoe/parameters.hpp"

#include <algorithm>
#include <set>

#include "tapdoe/errors.hpp"
#include "tapdoe/mechanism.hpp"

namespace tapdoe {

ParameterSet ParameterSet::from_mechanism(const Mechanism& mechanism) {
  ParameterSet set;
  const auto& steps = mechanism.steps();
  for (std::size_t j = 0; j < steps.size(); ++j) {
    set.entries_.push_back({"dG" + std::to_string(j), steps[j].delta_g, false, kReactionLower, kReactionUpper, j,
                            EnergyKind::reaction});
  }
  for (std::size_t j = 0; j < steps.size(); ++j) {
    set.entries_.push_back({"Ga" + std::to_string(j), steps[j].g_activation, false, kActivationLower,
                            kActivationUpper, j, EnergyKind::activation});
  }
  return set;
}

std::optional<std::size_t> ParameterSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

const Parameter& ParameterSet::at(std::string_view name) const {
  auto idx = find(name);
  if (!idx) throw InputError("unknown parameter '" + std::string(name) + "'");
  return entries_[*idx];
}

void ParameterSet::set_free(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  std::vector<std::size_t> order;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw InputError("parameter '" + n + "' listed twice");
    auto idx = find(n);
    if (!idx) throw InputError("unknown parameter '" + n + "'");
    order.push_back(*idx);
  }
  for (auto& e : entries_) e.free = false;
  for (auto i : order) entries_[i].free = true;
  free_order_ = std::move(order);
}

void ParameterSet::set_value(std::string_view name, double value) {
  auto idx = find(name);
  if (!idx) throw InputError("unknown parameter '" + std::string(name) + "'");
  entries_[*idx].value = value;
}

void ParameterSet::set_bounds(std::string_view name, double lower, double upper) {
  auto idx = find(name);
  if (!idx) throw InputError("unknown parameter '" + std::string(name) + "'");
  if (!(lower <= upper)) throw InputError("invalid bounds for '" + std::string(name) + "'");
  entries_[*idx].lower = lower;
  entries_[*idx].upper = upper;
}

void ParameterSet::reset_free(double reaction, double activation) {
  for (auto i : free_order_) {
    entries_[i].value = entries_[i].kind == EnergyKind::reaction ? reaction : activation;
  }
}

std::vector<std::string> ParameterSet::free_names() const {
  std::vector<std::string> out;
  for (auto i : free_order_) out.push_back(entries_[i].name);
  return out;
}

Eigen::VectorXd ParameterSet::free_values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(free_order_.size()));
  for (std::size_t i = 0; i < free_order_.size(); ++i) v[static_cast<Eigen::Index>(i)] = entries_[free_order_[i]].value;
  return v;
}

Eigen::VectorXd ParameterSet::free_lower() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(free_order_.size()));
  for (std::size_t i = 0; i < free_order_.size(); ++i) v[static_cast<Eigen::Index>(i)] = entries_[free_order_[i]].lower;
  return v;
}

Eigen::VectorXd ParameterSet::free_upper() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(free_order_.size()));
  for (std::size_t i = 0; i < free_order_.size(); ++i) v[static_cast<Eigen::Index>(i)] = entries_[free_order_[i]].upper;
  return v;
}

ParameterSet ParameterSet::with_free_values(const Eigen::Ref<const Eigen::VectorXd>& values) const {
  if (static_cast<std::size_t>(values.size()) != free_order_.size()) {
    throw InputError("free value count does not match the parameter set");
  }
  ParameterSet copy = *this;
  for (std::size_t i = 0; i < free_order_.size(); ++i) {
    copy.entries_[free_order_[i]].value = values[static_cast<Eigen::Index>(i)];
  }
  return copy;
}

StepEnergies ParameterSet::energies() const {
  StepEnergies e;
  std::size_t n_steps = 0;
  for (const auto& p : entries_) n_steps = std::max(n_steps, p.step + 1);
  e.delta_g.assign(n_steps, 0.0);
  e.g_activation.assign(n_steps, 0.0);
  for (const auto& p : entries_) {
    (p.kind == EnergyKind::reaction ? e.delta_g : e.g_activation)[p.step] = p.value;
  }
  return e;
}

void ParameterSet::validate(const Mechanism& mechanism) const {
  std::set<std::string> names;
  std::vector<int> seen(2 * mechanism.steps().size(), 0);
  for (const auto& p : entries_) {
    if (!names.insert(p.name).second) throw InputError("duplicate parameter name '" + p.name + "'");
    if (p.step >= mechanism.steps().size()) {
      throw InputError("parameter '" + p.name + "' maps to a step missing from " + mechanism.name());
    }
    ++seen[2 * p.step + (p.kind == EnergyKind::activation ? 1 : 0)];
    if (p.free && (p.value < p.lower || p.value > p.upper)) {
      throw InputError("free parameter '" + p.name + "' = " + std::to_string(p.value) + " outside its bounds");
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    throw InputError("parameter set does not cover every step energy of " + mechanism.name() + " exactly once");
  }
}

}  // namespace tapdoe
