#include "tapdoe/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "tapdoe/errors.hpp"

namespace tapdoe {

double NormalStream::uniform() {
  // (0, 1]: never zero, so the log below is finite
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double phi = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

std::uint64_t stream_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : label) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed + hash + 0x9e3779b97f4a7c15ULL;  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::map<std::string, double> NoiseModel::resolve(const FluxSeries& reference) const {
  if (!(relative_to_peak >= 0.0)) throw InputError("relative noise level must be >= 0");
  std::map<std::string, double> out;
  for (std::size_t g = 0; g < reference.gases.size(); ++g) {
    const auto& gas = reference.gases[g];
    auto it = sigma.find(gas);
    if (it != sigma.end()) {
      if (!(it->second >= 0.0)) throw InputError("noise sigma of " + gas + " must be >= 0");
      out[gas] = it->second;
    } else {
      const double peak = reference.values.rows() > 0
                              ? reference.values.col(static_cast<Eigen::Index>(g)).cwiseAbs().maxCoeff()
                              : 0.0;
      out[gas] = relative_to_peak * peak;
    }
  }
  return out;
}

FluxSeries add_noise(const FluxSeries& flux, const std::map<std::string, double>& sigma, std::uint64_t seed) {
  FluxSeries out = flux;
  for (std::size_t g = 0; g < flux.gases.size(); ++g) {
    auto it = sigma.find(flux.gases[g]);
    const double s = it == sigma.end() ? 0.0 : it->second;
    if (!(s >= 0.0)) throw InputError("noise sigma of " + flux.gases[g] + " must be >= 0");
    if (s == 0.0) continue;
    NormalStream normal(stream_seed(seed, flux.gases[g]));
    auto col = out.values.col(static_cast<Eigen::Index>(g));
    for (Eigen::Index t = 0; t < col.size(); ++t) col[t] += s * normal();
  }
  return out;
}

FluxSeries add_noise(const FluxSeries& flux, const NoiseModel& noise) {
  return add_noise(flux, noise.resolve(flux), noise.seed);
}

ParameterSet perturb_parameters(const ParameterSet& params, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InputError("perturbation sigma must be >= 0");
  ParameterSet out = params;
  if (sigma == 0.0) return out;
  for (const auto& p : params.entries()) {
    if (!p.free) continue;
    NormalStream normal(stream_seed(seed, p.name));
    out.set_value(p.name, p.value + sigma * normal());
  }
  return out;
}

}  // namespace tapdoe
