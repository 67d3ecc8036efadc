#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace tapdoe {

enum class SpeciesKind { gas, adsorbate, site };

std::string_view to_string(SpeciesKind kind);

struct Species {
  std::string name;
  SpeciesKind kind = SpeciesKind::gas;
  /// amu, gas species only.
  double molar_mass = 0.0;
  /// Site type an adsorbate occupies; for a site species this is its own symbol.
  std::string site_type;
  /// Initial free-site concentration (mol/m^3 of catalyst bed), site species only.
  double site_concentration = 0.0;
  /// Optional elemental composition, e.g. {C:3, H:8}; empty when not declared.
  std::map<std::string, int> composition;
};

struct StoichTerm {
  std::string species;
  int coefficient = 1;
};

struct ReactionStep {
  std::vector<StoichTerm> reactants;
  std::vector<StoichTerm> products;
  double delta_g = 0.0;       ///< eV
  double g_activation = 0.0;  ///< eV
  bool reversible = true;
  int source_line = 0;
};

/// Species-by-step signed coefficients (products minus reactants).
/// Rows follow Mechanism::species(): gases, then adsorbates, then free sites.
struct StoichiometryMatrix {
  std::vector<std::string> row_names;
  Eigen::MatrixXi entries;
};

/// A validated, immutable reaction mechanism.
///
/// Species are stored in canonical row order (gases, adsorbates, sites), each
/// group keeping declaration order. Construction checks every invariant:
/// unique names, declared site types, positive gas masses, per-step site
/// balance and, where compositions are declared, elemental balance.
class Mechanism {
 public:
  static Mechanism create(std::string name, std::vector<Species> species,
                          std::vector<ReactionStep> steps, double standard_concentration = 1.0);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Species>& species() const noexcept { return species_; }
  const std::vector<ReactionStep>& steps() const noexcept { return steps_; }

  std::size_t gas_count() const noexcept { return n_gas_; }
  std::size_t surface_count() const noexcept { return species_.size() - n_gas_; }
  std::size_t adsorbate_count() const noexcept { return n_adsorbate_; }
  std::size_t site_count() const noexcept { return species_.size() - n_gas_ - n_adsorbate_; }

  std::vector<std::string> gas_names() const;
  std::vector<std::string> surface_names() const;

  std::optional<std::size_t> find(std::string_view species_name) const;
  std::size_t index_of(std::string_view species_name) const;

  /// Sites occupied by one unit of a species, per site type (free site = 1, adsorbate = 1).
  /// Returns empty for gases.
  std::optional<std::string> site_type_of(std::size_t species_index) const;

  /// Reference concentration c0 (mol/m^3) used to make mass-action terms dimensionless:
  /// r = c0 * k * prod (c/c0)^nu.
  double standard_concentration() const noexcept { return standard_concentration_; }

  /// Initial surface composition: free sites at their declared concentration, adsorbates empty.
  std::vector<double> initial_surface() const;

  /// Non-fatal findings (e.g. activation energy below the reaction energy).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Empty placeholder; only create() and the parsers produce usable mechanisms.
  Mechanism() = default;

 private:

  std::string name_;
  std::vector<Species> species_;
  std::vector<ReactionStep> steps_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_gas_ = 0;
  std::size_t n_adsorbate_ = 0;
  double standard_concentration_ = 1.0;
  std::vector<std::string> warnings_;
};

/// Content equality (species, steps, energies, standard concentration); the name is ignored.
bool operator==(const Mechanism& a, const Mechanism& b);

/// Parse the line-oriented mechanism format ([gas], [site], [adsorbate], [steps],
/// optional [kinetics]). Throws ParseError with the offending line.
Mechanism parse_mechanism(std::string_view text, std::string name = "mechanism");
Mechanism load_mechanism(const std::string& path);

/// Inverse of parse_mechanism; parse(serialize(m)) reproduces m.
std::string serialize_mechanism(const Mechanism& mechanism);

StoichiometryMatrix stoichiometry_matrix(const Mechanism& mechanism);

/// Parse a simple chemical formula such as "C3H8" or "CO2" into element counts.
std::map<std::string, int> parse_formula(std::string_view formula);

}  // namespace tapdoe
