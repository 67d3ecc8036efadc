#include "tapdoe/screening.hpp"

#include <cmath>
#include <limits>

#include "tapdoe/parallel.hpp"

namespace tapdoe {

namespace {

// All entries fixed, so probes may leave the fitting bounds.
ParameterSet pinned(const ParameterSet& params) {
  ParameterSet out = params;
  out.set_free({});
  return out;
}

template <class Eval>
std::vector<SensitivityEntry> screen(const ParameterSet& params, unsigned threads, double threshold, double step,
                                     Eval&& eval) {
  const ParameterSet base = pinned(params);
  const auto& entries = base.entries();
  std::vector<SensitivityEntry> out(entries.size());
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    ParameterSet up = base, down = base;
    up.set_value(entries[i].name, entries[i].value + step);
    down.set_value(entries[i].name, entries[i].value - step);
    out[i].name = entries[i].name;
    out[i].value = eval(up, down) / (2.0 * step);
    out[i].identifiable = std::abs(out[i].value) > threshold;
  });
  return out;
}

}  // namespace

std::vector<SensitivityEntry> sensitivity_screen(const Model& model, const ExperimentDesign& design,
                                                 const ParameterSet& params, double threshold, double step) {
  const FluxSeries nominal = model.simulate(design, pinned(params));
  const double norm = nominal.values.norm();
  return screen(params, model.threads, threshold, step, [&](const ParameterSet& up, const ParameterSet& down) {
    if (norm == 0.0) return 0.0;
    return (model.simulate(design, up).values - model.simulate(design, down).values).norm() / norm;
  });
}

std::vector<SensitivityEntry> sensitivity_screen(const Model& model, const std::vector<Observation>& observations,
                                                 const ParameterSet& params, double threshold, double step) {
  return screen(params, model.threads, threshold, step, [&](const ParameterSet& up, const ParameterSet& down) {
    return objective(model, observations, up) - objective(model, observations, down);
  });
}

}  // namespace tapdoe
