#pragma once

#include <string>
#include <vector>

#include "tapdoe/estimation.hpp"

namespace tapdoe {

struct SensitivityEntry {
  std::string name;
  double value = 0.0;
  bool identifiable = false;  ///< |value| above the threshold
};

/// Normalized output sensitivity of every parameter entry (free or not):
/// |df/dp| / |f| over all gases and times, by central differences. Parameters below
/// `threshold` are flagged non-identifiable. An inert mechanism gives exact zeros.
std::vector<SensitivityEntry> sensitivity_screen(const Model& model, const ExperimentDesign& design,
                                                 const ParameterSet& params, double threshold = 1e-3,
                                                 double step = 1e-3);

/// Objective-gradient variant: dJ/dp against observed data for every parameter entry.
std::vector<SensitivityEntry> sensitivity_screen(const Model& model, const std::vector<Observation>& observations,
                                                 const ParameterSet& params, double threshold = 1e-3,
                                                 double step = 1e-3);

}  // namespace tapdoe
