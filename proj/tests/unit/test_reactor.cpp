#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "tapdoe/errors.hpp"
#include "tapdoe/mechanism.hpp"
#include "tapdoe/parameters.hpp"
#include "tapdoe/reactor.hpp"
#include "test_helpers.hpp"

using namespace tapdoe;
using tapdoe::testing::exp1;
using tapdoe::testing::inert_mechanism;
using tapdoe::testing::mech1;

namespace {

ExperimentDesign inert_design(double intensity = 1.0) {
  ExperimentDesign d;
  d.pulses = {{"Ar", intensity, 0.0}};
  d.temperature = 700.0;
  return d;
}

double peak_time(const FluxSeries& f, std::size_t col = 0) {
  Eigen::Index at = 0;
  f.values.col(static_cast<Eigen::Index>(col)).maxCoeff(&at);
  return f.time[static_cast<std::size_t>(at)];
}

// Golden-section maximization of the standard curve on [a, b].
double curve_argmax(double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  while (b - a > 1e-10) {
    if (standard_diffusion_curve(c) > standard_diffusion_curve(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST(KnudsenDiffusivity, ReferencePointIsIdentity) {
  ReactorGeometry g;
  EXPECT_DOUBLE_EQ(knudsen_diffusivity(g.reference_mass, g.reference_temperature, g), g.reference_diffusivity);
}

TEST(KnudsenDiffusivity, FourTimesHeavierHalvesD) {
  ReactorGeometry g;
  EXPECT_NEAR(knudsen_diffusivity(4 * g.reference_mass, g.reference_temperature, g), g.reference_diffusivity / 2, 1e-15);
}

TEST(KnudsenDiffusivity, OxygenAgainstArgonReference) {
  ReactorGeometry g;
  g.reference_mass = 40.0;
  const double d = knudsen_diffusivity(32.0, g.reference_temperature, g);
  EXPECT_NEAR(d / g.reference_diffusivity, std::sqrt(40.0 / 32.0), 1e-12);
  EXPECT_NEAR(d / g.reference_diffusivity, 1.118, 5e-4);
}

TEST(KnudsenDiffusivity, RejectsNonPositiveInputs) {
  ReactorGeometry g;
  EXPECT_THROW(knudsen_diffusivity(0.0, 700.0, g), InputError);
  EXPECT_THROW(knudsen_diffusivity(40.0, -1.0, g), InputError);
}

TEST(OutletFlux, UniformProfileGivesZero) { EXPECT_EQ(outlet_flux(0.0, 0.002, 1.14e-4), 0.0); }

TEST(OutletFlux, LinearProfile) {
  // c(x) = c0 (1 - x/L): gradient -c0/L
  const double c0 = 3e-4, L = 0.04, D = 0.002, A = 1.14e-4;
  EXPECT_NEAR(outlet_flux(-c0 / L, D, A), D * A * c0 / L * 1e9, 1e-15);
}

TEST(Geometry, Validation) {
  ReactorGeometry g;
  EXPECT_NO_THROW(g.validate());
  g.zone_lengths[1] = 0.0;
  EXPECT_THROW(g.validate(), InputError);
  g = ReactorGeometry{};
  g.void_fractions[2] = 1.0;
  EXPECT_THROW(g.validate(), InputError);
  g = ReactorGeometry{};
  g.cross_section_area = -1.0;
  EXPECT_THROW(g.validate(), InputError);
}

TEST(Design, Validation) {
  auto d = exp1();
  EXPECT_NO_THROW(d.validate());
  d.pulses[0].intensity = -1.0;
  EXPECT_THROW(d.validate(), InputError);
  d = exp1();
  d.pulses[0].delay = d.horizon;
  EXPECT_THROW(d.validate(), InputError);
  d = exp1();
  d.temperature = 0.0;
  EXPECT_THROW(d.validate(), InputError);
  EXPECT_EQ(exp1().intensity("O2"), 1.0);
  EXPECT_EQ(exp1().intensity("CO2"), 0.0);
}

TEST(StandardCurve, IntegratesToOne) {
  // trapezoid on a fine grid plus the leading eigen term integrated beyond tau = 5
  const double pi = std::numbers::pi;
  const int n = 50000;
  const double h = 5.0 / n;
  double sum = 0.5 * standard_diffusion_curve(5.0) * h;
  for (int i = 1; i < n; ++i) sum += standard_diffusion_curve(i * h) * h;
  sum += 4.0 / pi * std::exp(-pi * pi / 4.0 * 5.0);
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(StandardCurve, PeakAtOneSixth) {
  EXPECT_NEAR(curve_argmax(0.05, 0.5), 1.0 / 6.0, 1e-3);
}

TEST(StandardCurve, SeriesAgreeAcrossSwitch) {
  const double below = standard_diffusion_curve(0.1 - 1e-12);
  const double above = standard_diffusion_curve(0.1 + 1e-12);
  EXPECT_NEAR(below, above, 1e-9 * above);
  EXPECT_EQ(standard_diffusion_curve(0.0), 0.0);
  EXPECT_EQ(standard_diffusion_curve(-1.0), 0.0);
}

TEST(InertReferenceCurve, IntegralEqualsPulse) {
  ReactorGeometry g;
  std::vector<double> t;
  for (int k = 1; k <= 40000; ++k) t.push_back(k * 1e-4);
  const auto f = inert_reference_curve(g, 0.002, 2.5, t);
  EXPECT_NEAR(f.integral("inert"), 2.5, 2.5 * 1e-4);
}

TEST(InertReferenceCurve, DoublingDHalvesPeakTime) {
  ReactorGeometry g;
  std::vector<double> t;
  for (int k = 1; k <= 20000; ++k) t.push_back(k * 1e-5);
  const double t1 = peak_time(inert_reference_curve(g, 0.002, 1.0, t));
  const double t2 = peak_time(inert_reference_curve(g, 0.004, 1.0, t));
  EXPECT_NEAR(t2, t1 / 2, 1e-5);
  EXPECT_NEAR(t1, 0.4 * 0.04 * 0.04 / (6 * 0.002), 2e-5);
}

TEST(InertReferenceCurve, NeedsUniformVoidFraction) {
  ReactorGeometry g;
  g.void_fractions = {0.4, 0.5, 0.4};
  std::vector<double> t{0.1};
  EXPECT_THROW(inert_reference_curve(g, 0.002, 1.0, t), InputError);
}

TEST(Simulate, ZeroIntensityGivesZeroFlux) {
  auto d = exp1();
  for (auto& p : d.pulses) p.intensity = 0.0;
  const auto r = simulate(mech1(), ReactorGeometry{}, d);
  EXPECT_EQ(r.flux.values.rows(), 2500);
  EXPECT_EQ(r.flux.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulate, InertIntegralEqualsPulseOnDefaultGrid) {
  for (double n : {0.5, 1.0, 2.0}) {
    const auto r = simulate(inert_mechanism(), ReactorGeometry{}, inert_design(n));
    // horizon 2.5 s leaves a tail of order exp(-pi^2/4 * 2.5 / 0.32) ~ 4e-9
    EXPECT_NEAR(r.flux.integral("Ar"), n, 0.01 * n);
    EXPECT_NEAR(r.flux.integral("Ar") + r.final_state.gas_inventory(0), n, 1e-6 * n);
  }
}

TEST(Simulate, InertPeakTimeNearOneSixthOnDefaultGrid) {
  const auto r = simulate(inert_mechanism(), ReactorGeometry{}, inert_design());
  const double expected = 0.4 * 0.04 * 0.04 / (6 * 0.002);
  EXPECT_NEAR(peak_time(r.flux), expected, 0.05 * expected);
}

TEST(Simulate, InertMatchesAnalyticCurveAtFineResolution) {
  ReactorGeometry g;
  SimulationOptions o;
  o.dt = 1e-4;
  o.pulse_width = 1e-4;
  const auto r = simulate(inert_mechanism(), g, inert_design(), o);
  const auto ref = inert_reference_curve(g, 0.002, 1.0, r.flux.time, "Ar");
  const double peak = ref.values.maxCoeff();
  EXPECT_LT((r.flux.values - ref.values).cwiseAbs().maxCoeff(), 0.02 * peak);
}

TEST(Simulate, MechanismOneProducesProducts) {
  const auto r = simulate(mech1(), ReactorGeometry{}, exp1());
  EXPECT_EQ(r.flux.gases, (std::vector<std::string>{"C3H8", "O2", "C3H6", "H2O", "CO2"}));
  for (const char* g : {"CO2", "H2O", "C3H6"}) {
    EXPECT_GT(r.flux.column(g).maxCoeff(), 0.01) << g;
    EXPECT_GT(r.flux.integral(g), 0.01) << g;
  }
  // products appear after the reactant peak
  EXPECT_GT(peak_time(r.flux, r.flux.gas_index("CO2")), peak_time(r.flux, r.flux.gas_index("C3H8")));
  EXPECT_EQ(r.stats.halvings, 0u);
  EXPECT_GE(r.flux.values.minCoeff(), 0.0);
}

TEST(Simulate, CarbonAndSitesConserved) {
  const auto& m = mech1();
  SimulationOptions o;
  double worst_site = 0.0;
  const double sites0 = 0.015;
  o.observer = [&](double, const StateField& s) {
    for (Eigen::Index k = 0; k < s.surface.rows(); ++k) {
      worst_site = std::max(worst_site, std::abs(s.surface.row(k).sum() - sites0) / sites0);
    }
  };
  const auto r = simulate(m, ReactorGeometry{}, exp1(), o);
  const auto& f = r.flux;
  const auto& st = r.final_state;
  auto gas_left = [&](const char* g) { return st.gas_inventory(f.gas_index(g)); };
  auto surf = [&](const char* s) {
    const auto it = std::find(st.surface_species.begin(), st.surface_species.end(), s);
    return st.surface_inventory(static_cast<std::size_t>(it - st.surface_species.begin()));
  };
  const double out = 3 * (f.integral("C3H8") + gas_left("C3H8")) + 3 * (f.integral("C3H6") + gas_left("C3H6")) +
                     (f.integral("CO2") + gas_left("CO2"));
  const double held = 3 * (surf("C3H8*") + surf("C3H6*") + surf("C3H4*"));
  EXPECT_NEAR(out + held, 3.0, 0.02 * 3.0);
  EXPECT_LT(worst_site, 1e-8);
}

TEST(Simulate, GridConvergence) {
  const auto coarse = simulate(mech1(), ReactorGeometry{}, exp1());
  SimulationOptions fine;
  fine.intervals = 240;
  fine.dt = 5e-4;
  const auto f = simulate(mech1(), ReactorGeometry{}, exp1(), fine);
  for (const auto& g : coarse.flux.gases) {
    EXPECT_NEAR(f.flux.integral(g), coarse.flux.integral(g), 0.01 * coarse.flux.integral(g)) << g;
  }
}

TEST(Simulate, Deterministic) {
  const auto a = simulate(mech1(), ReactorGeometry{}, exp1());
  const auto b = simulate(mech1(), ReactorGeometry{}, exp1());
  EXPECT_TRUE((a.flux.values.array() == b.flux.values.array()).all());
}

TEST(Simulate, ParameterSetOverridesFileEnergies) {
  auto p = ParameterSet::from_mechanism(mech1());
  const auto base = simulate(mech1(), ReactorGeometry{}, exp1(), p);
  const auto plain = simulate(mech1(), ReactorGeometry{}, exp1());
  EXPECT_TRUE((base.flux.values.array() == plain.flux.values.array()).all());
  p.set_value("Ga3", 1.7);
  const auto slower = simulate(mech1(), ReactorGeometry{}, exp1(), p);
  EXPECT_LT(slower.flux.integral("C3H6"), base.flux.integral("C3H6"));
}

TEST(Simulate, UnknownPulseGasRejected) {
  auto d = exp1();
  d.pulses.push_back({"Xe", 1.0, 0.0});
  EXPECT_THROW(simulate(mech1(), ReactorGeometry{}, d), InputError);
}

TEST(Simulate, DelayedPulseArrivesLater) {
  auto d = exp1();
  d.pulses[0].delay = 0.6;
  const auto r = simulate(mech1(), ReactorGeometry{}, d);
  EXPECT_GT(peak_time(r.flux, 0), 0.6);
  EXPECT_LT(peak_time(r.flux, 1), 0.3);
}

TEST(FluxSeriesTest, IntegralIsRectangleRule) {
  FluxSeries f;
  f.time = {0.1, 0.2, 0.3};
  f.gases = {"A"};
  f.values.resize(3, 1);
  f.values << 1.0, 2.0, 3.0;
  EXPECT_NEAR(f.time_step(), 0.1, 1e-15);
  EXPECT_NEAR(f.integral("A"), 0.6, 1e-15);
  EXPECT_THROW(f.gas_index("B"), InputError);
}
