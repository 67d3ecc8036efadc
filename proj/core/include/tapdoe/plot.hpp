#pragma once

#include <string>
#include <vector>

#include "tapdoe/reactor.hpp"

namespace tapdoe {

/// Flux-vs-time figure, one panel per gas. `overlay` (same gases and grid) is drawn
/// as markers on top of the lines when non-empty, e.g. observed data over a fit.
std::string flux_plot_svg(const FluxSeries& lines, const FluxSeries* overlay = nullptr, const std::string& title = "");

struct ScatterOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, const ScatterOptions& options);

}  // namespace tapdoe
