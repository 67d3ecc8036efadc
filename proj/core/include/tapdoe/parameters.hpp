#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace tapdoe {

class Mechanism;

enum class EnergyKind { reaction, activation };

struct Parameter {
  std::string name;
  double value = 0.0;  ///< eV
  bool free = false;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t step = 0;
  EnergyKind kind = EnergyKind::reaction;
};

/// Per-step free energies handed to the kinetics compiler.
struct StepEnergies {
  std::vector<double> delta_g;
  std::vector<double> g_activation;
};

/// Ordered kinetic parameters of a mechanism.
///
/// Entries are named `dG<j>` (reaction free energy of step j) and `Ga<j>`
/// (activation free energy of step j), j counted from 0 in file order.
/// Free entries are optimized; fixed entries are pinned to their values.
class ParameterSet {
 public:
  ParameterSet() = default;

  /// One reaction and one activation entry per step, all fixed, bounds at defaults.
  static ParameterSet from_mechanism(const Mechanism& mechanism);

  static constexpr double kReactionLower = -2.0;
  static constexpr double kReactionUpper = 1.0;
  static constexpr double kActivationLower = 0.0;
  static constexpr double kActivationUpper = 3.0;

  const std::vector<Parameter>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  const Parameter& at(std::string_view name) const;
  double value(std::string_view name) const { return at(name).value; }

  /// Mark exactly `names` free (all others fixed), in the given order.
  void set_free(const std::vector<std::string>& names);
  void set_value(std::string_view name, double value);
  void set_bounds(std::string_view name, double lower, double upper);

  /// Set every free reaction energy to `reaction` and every free activation energy
  /// to `activation` (initial guesses).
  void reset_free(double reaction, double activation);

  std::size_t free_count() const noexcept { return free_order_.size(); }
  std::vector<std::string> free_names() const;
  Eigen::VectorXd free_values() const;
  Eigen::VectorXd free_lower() const;
  Eigen::VectorXd free_upper() const;
  ParameterSet with_free_values(const Eigen::Ref<const Eigen::VectorXd>& values) const;

  /// Index of the i-th free entry inside entries().
  std::size_t free_entry(std::size_t i) const { return free_order_.at(i); }

  StepEnergies energies() const;

  /// Throws InputError when a free value is outside its bounds or names are inconsistent.
  void validate(const Mechanism& mechanism) const;

 private:
  std::vector<Parameter> entries_;
  std::vector<std::size_t> free_order_;
};

}  // namespace tapdoe
