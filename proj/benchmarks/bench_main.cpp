#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "tapdoe/kinetics.hpp"
#include "tapdoe/mechanism.hpp"
#include "tapdoe/parameters.hpp"
#include "tapdoe/precision.hpp"
#include "tapdoe/reactor.hpp"

namespace {

const tapdoe::Mechanism& mechanism(int which) {
  static const std::vector<tapdoe::Mechanism> all = {
      tapdoe::load_mechanism(std::string(TAPDOE_DATA_DIR) + "/mech1.mech"),
      tapdoe::load_mechanism(std::string(TAPDOE_DATA_DIR) + "/mech2.mech"),
      tapdoe::load_mechanism(std::string(TAPDOE_DATA_DIR) + "/mech3.mech"),
  };
  return all[static_cast<std::size_t>(which)];
}

tapdoe::ExperimentDesign exp1() {
  tapdoe::ExperimentDesign d;
  d.pulses = {{"C3H8", 1.0, 0.0}, {"O2", 1.0, 0.0}};
  return d;
}

void BM_Simulate(benchmark::State& state) {
  const auto& m = mechanism(static_cast<int>(state.range(0)));
  tapdoe::SimulationOptions o;
  o.intervals = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(tapdoe::simulate(m, tapdoe::ReactorGeometry{}, exp1(), o));
}
BENCHMARK(BM_Simulate)->Args({0, 120})->Args({1, 120})->Args({2, 120})->Args({0, 240})->Unit(benchmark::kMillisecond);

void BM_ProductionJacobian(benchmark::State& state) {
  const auto& m = mechanism(0);
  const tapdoe::CompiledKinetics k(m, 700.0);
  const std::size_t n = k.species_count();
  std::vector<double> conc(n, 1e-3), prod(n);
  Eigen::MatrixXd jac(n, n);
  for (auto _ : state) {
    jac.setZero();
    k.production_jacobian(conc, prod, jac);
    benchmark::DoNotOptimize(jac.data());
  }
}
BENCHMARK(BM_ProductionJacobian);

void BM_FisherCriterion(benchmark::State& state) {
  const auto p = static_cast<Eigen::Index>(state.range(0));
  std::vector<Eigen::MatrixXd> q(5, Eigen::MatrixXd::Random(2500, p));
  const std::vector<double> sigma(5, 0.01);
  const Eigen::MatrixXd prior = Eigen::MatrixXd::Identity(p, p);
  for (auto _ : state) {
    const auto v = tapdoe::fisher_information(q, sigma, prior);
    benchmark::DoNotOptimize(tapdoe::criterion(v, tapdoe::Criterion::D));
  }
}
BENCHMARK(BM_FisherCriterion)->Arg(2)->Arg(7);

}  // namespace

BENCHMARK_MAIN();
