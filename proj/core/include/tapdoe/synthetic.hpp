#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>

#include "tapdoe/parameters.hpp"
#include "tapdoe/reactor.hpp"

namespace tapdoe {

/// Standard-normal draws that are identical on every platform: mt19937_64 bits,
/// 53-bit uniforms and the Box-Muller transform (std::normal_distribution is
/// implementation-defined, so it is not used).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double operator()();

 private:
  double uniform();
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed of the sub-stream named `label` (a gas or parameter name) under `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view label);

/// Homoscedastic Gaussian noise. A gas listed in `sigma` uses that absolute value
/// (nmol/s); any other gas gets `relative_to_peak` times the peak of its trace.
struct NoiseModel {
  std::map<std::string, double> sigma;
  double relative_to_peak = 0.01;
  std::uint64_t seed = 0;

  /// Absolute per-gas sigma for the given noiseless trace.
  std::map<std::string, double> resolve(const FluxSeries& reference) const;
};

/// in + N(0, sigma_gas^2) per sample; each gas draws from its own sub-stream.
FluxSeries add_noise(const FluxSeries& flux, const std::map<std::string, double>& sigma, std::uint64_t seed);
FluxSeries add_noise(const FluxSeries& flux, const NoiseModel& noise);

/// Shift every free entry by N(0, sigma^2); fixed entries are untouched. Values are not
/// clipped to their bounds.
ParameterSet perturb_parameters(const ParameterSet& params, double sigma, std::uint64_t seed);

}  // namespace tapdoe
