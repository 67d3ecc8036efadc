#include <cmath>
#include <numbers>

#include "tapdoe/constants.hpp"
#include "tapdoe/errors.hpp"
#include "tapdoe/reactor.hpp"

namespace tapdoe {

namespace {

constexpr int kMaxTerms = 200;
// below this the image (short-time) series converges in a few terms
constexpr double kSeriesSwitch = 0.1;

double eigen_series(double tau) {
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int n = 0; n < kMaxTerms; ++n) {
    const double k = n + 0.5;
    const double term = (n % 2 == 0 ? 1.0 : -1.0) * (2 * n + 1) * std::exp(-k * k * pi * pi * tau);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) || term == 0.0) return pi * sum;
  }
  throw NumericalError("diffusion eigen-series did not converge at tau=" + std::to_string(tau));
}

double image_series(double tau) {
  const double pi = std::numbers::pi;
  const double pre = 1.0 / (std::sqrt(pi) * tau * std::sqrt(tau));
  double sum = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double m = 2 * k + 1;
    const double term = (k % 2 == 0 ? 1.0 : -1.0) * m * std::exp(-m * m / (4 * tau));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) || term == 0.0) return pre * sum;
  }
  throw NumericalError("diffusion image series did not converge at tau=" + std::to_string(tau));
}

}  // namespace

double standard_diffusion_curve(double tau) {
  if (!std::isfinite(tau)) throw InputError("tau must be finite");
  if (tau <= 0.0) return 0.0;
  return tau < kSeriesSwitch ? image_series(tau) : eigen_series(tau);
}

FluxSeries inert_reference_curve(const ReactorGeometry& geometry, double diffusivity, double pulse_nmol,
                                 std::span<const double> time_grid, const std::string& gas) {
  geometry.validate();
  if (!geometry.uniform_void_fraction()) {
    throw InputError("the analytic inert curve needs a uniform void fraction");
  }
  if (!(diffusivity > 0.0)) throw InputError("diffusivity must be > 0");
  const double eps = geometry.void_fractions[0];
  const double L = geometry.length();
  const double t_scale = eps * L * L / diffusivity;

  FluxSeries out;
  out.gases = {gas};
  out.time.assign(time_grid.begin(), time_grid.end());
  out.values.resize(static_cast<Eigen::Index>(time_grid.size()), 1);
  for (std::size_t k = 0; k < time_grid.size(); ++k) {
    out.values(static_cast<Eigen::Index>(k), 0) =
        standard_diffusion_curve(time_grid[k] / t_scale) * pulse_nmol / t_scale;
  }
  return out;
}

}  // namespace tapdoe
