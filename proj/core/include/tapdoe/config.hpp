#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tapdoe/divergence.hpp"
#include "tapdoe/estimation.hpp"
#include "tapdoe/precision.hpp"
#include "tapdoe/reactor.hpp"

namespace tapdoe {

struct MechanismEntry {
  std::string label;
  std::filesystem::path file;
};

/// Everything a CLI run needs, read from an INI-style file.
struct RunConfig {
  std::filesystem::path source;  ///< config file, empty when built in code

  // [mechanism]
  std::vector<MechanismEntry> mechanisms;  ///< first entry is the fitted model
  std::string truth;                       ///< label of the data-generating mechanism
  std::vector<std::string> free;           ///< free parameter names
  double initial_reaction = -0.3;
  double initial_activation = 1.5;
  std::vector<std::string> refit;          ///< labels refit during discrimination; empty = all

  // [reactor_sim]
  ReactorGeometry geometry;
  SimulationOptions simulation;

  // [design]
  ExperimentDesign design;

  // [synthetic_data]
  double noise_relative = 0.01;
  std::map<std::string, double> noise_sigma;
  std::uint64_t seed = 1;
  double perturbation = 0.05;  ///< eV, divergence study

  // [estimation]
  FitOptions fit;

  // [design_space]
  DesignSpace space = default_design_space();

  // [doe_precision]
  Criterion criterion = Criterion::D;
  std::vector<std::string> subset;
  double sensitivity_step = 1e-3;

  // [doe_divergence]
  bool refit_enabled = false;
  BicForm bic_form = BicForm::gaussian;
  double bic_gap_threshold = 10.0;

  // [workflow]
  int max_iterations = 2;
  double stop_factor = 10.0;
  unsigned threads = 0;
  std::vector<std::size_t> study_designs;  ///< enumeration indices; empty = whole space

  void validate() const;
};

/// Parse config text; relative file paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace tapdoe
