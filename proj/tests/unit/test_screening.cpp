#include <gtest/gtest.h>

#include <algorithm>

#include "tapdoe/screening.hpp"
#include "test_helpers.hpp"

using namespace tapdoe;
using tapdoe::testing::exp1;
using tapdoe::testing::inert_mechanism;
using tapdoe::testing::mech1;

namespace {

const SensitivityEntry& find(const std::vector<SensitivityEntry>& v, const std::string& name) {
  auto it = std::find_if(v.begin(), v.end(), [&](const SensitivityEntry& e) { return e.name == name; });
  if (it == v.end()) throw std::runtime_error("missing entry " + name);
  return *it;
}

std::vector<SensitivityEntry> mech1_screen() {
  static const auto result = [] {
    Model m;
    m.mechanism = mech1();
    m.threads = 1;
    return sensitivity_screen(m, exp1(), ParameterSet::from_mechanism(m.mechanism));
  }();
  return result;
}

}  // namespace

TEST(Screening, CoversEveryEntry) {
  const auto s = mech1_screen();
  EXPECT_EQ(s.size(), ParameterSet::from_mechanism(mech1()).entries().size());
}

TEST(Screening, DeepCombustionEnergyIsNotIdentifiable) {
  // step 6 at dG = -8 is irreversible in practice; its reverse rate never shows up in the fluxes
  const auto s = mech1_screen();
  const auto& e = find(s, "dG6");
  EXPECT_LT(e.value, 1e-3);
  EXPECT_FALSE(e.identifiable);
}

TEST(Screening, FittedSubsetIsAboveThreshold) {
  const auto s = mech1_screen();
  for (const auto* name : {"dG0", "dG2", "Ga1", "Ga3", "Ga5"}) {
    EXPECT_TRUE(find(s, name).identifiable) << name << " = " << find(s, name).value;
  }
}

TEST(Screening, InertMechanismHasNothingToScreen) {
  Model m;
  m.mechanism = inert_mechanism();
  m.threads = 1;
  ExperimentDesign d;
  d.pulses = {{"Ar", 1.0, 0.0}};
  d.temperature = 700;
  EXPECT_TRUE(sensitivity_screen(m, d, ParameterSet::from_mechanism(m.mechanism)).empty());
}

TEST(Screening, ZeroIntensityGivesExactZeros) {
  Model m;
  m.mechanism = mech1();
  m.threads = 1;
  auto d = exp1();
  for (auto& p : d.pulses) p.intensity = 0.0;
  const auto s = sensitivity_screen(m, d, ParameterSet::from_mechanism(m.mechanism));
  ASSERT_FALSE(s.empty());
  for (const auto& e : s) {
    EXPECT_EQ(e.value, 0.0);
    EXPECT_FALSE(e.identifiable);
  }
}

TEST(Screening, ObjectiveGradientPointsBackToTruth) {
  Model m;
  m.mechanism = mech1();
  m.threads = 1;
  const auto p = ParameterSet::from_mechanism(m.mechanism);
  auto obs = synthetic_observation(m, exp1(), p, {}, 1);
  obs.sigma = {{"C3H8", 0.04}, {"O2", 0.027}, {"C3H6", 0.004}, {"H2O", 0.015}, {"CO2", 0.006}};
  auto shifted = p;
  shifted.set_value("Ga3", 1.55);
  const auto at_truth = sensitivity_screen(m, std::vector<Observation>{obs}, p, 1e-3, 1e-4);
  const auto away = sensitivity_screen(m, std::vector<Observation>{obs}, shifted, 1e-3, 1e-4);
  // at a zero-residual minimum the central difference only carries its O(h^2) error
  EXPECT_GT(find(away, "Ga3").value, 0.0);
  EXPECT_LT(std::abs(find(at_truth, "Ga3").value), 1e-2 * find(away, "Ga3").value);
}
