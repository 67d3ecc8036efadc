#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tapdoe/divergence.hpp"
#include "tapdoe/errors.hpp"
#include "test_helpers.hpp"

using namespace tapdoe;
using tapdoe::testing::data_path;
using tapdoe::testing::exp1;

namespace {

FluxSeries constant_series(std::size_t n, double a, double b) {
  FluxSeries f;
  f.gases = {"A", "B"};
  for (std::size_t k = 0; k < n; ++k) f.time.push_back(1e-3 * static_cast<double>(k + 1));
  f.values.resize(static_cast<Eigen::Index>(n), 2);
  f.values.col(0).setConstant(a);
  f.values.col(1).setConstant(b);
  return f;
}

FluxSeries random_series(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto f = constant_series(n, 0.0, 0.0);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = u(rng);
  return f;
}

CandidateModel candidate(const std::string& label, const std::string& file) {
  CandidateModel c;
  c.label = label;
  c.model.mechanism = load_mechanism(data_path(file));
  c.model.threads = 1;
  c.params = ParameterSet::from_mechanism(c.model.mechanism);
  return c;
}

std::map<std::string, double> sigma1() {
  return {{"C3H8", 0.04}, {"O2", 0.027}, {"C3H6", 0.004}, {"H2O", 0.015}, {"CO2", 0.006}};
}

std::vector<ExperimentDesign> three_designs() {
  std::vector<ExperimentDesign> out;
  for (double t : {600.0, 700.0, 750.0}) {
    auto d = exp1();
    d.temperature = t;
    out.push_back(d);
  }
  return out;
}

}  // namespace

TEST(HrDivergence, IdenticalOutputsGiveZero) {
  const auto f = constant_series(10, 1.0, 2.0);
  const auto e = hr_divergence({f, f}, {{"A", 1.0}, {"B", 1.0}});
  EXPECT_EQ(e.divergence, 0.0);
}

TEST(HrDivergence, ConstantOffsetOnOneGas) {
  const std::size_t tau = 37;
  const double delta = 0.3;
  const auto e = hr_divergence({constant_series(tau, 1.0, 2.0), constant_series(tau, 1.0 + delta, 2.0)},
                               {{"A", 1.0}, {"B", 1.0}});
  EXPECT_NEAR(e.divergence, static_cast<double>(tau) * delta * delta, 1e-12);
}

TEST(HrDivergence, HandEvaluationWithWeights) {
  // pairs (0,1): 5*(1/4 + 4/1); (0,2): 5*(9/4); (1,2): 5*(4/4 + 4/1)
  const auto a = constant_series(5, 0.0, 0.0), b = constant_series(5, 1.0, 2.0), c = constant_series(5, 3.0, 0.0);
  const auto e = hr_divergence({a, b, c}, {{"A", 2.0}, {"B", 1.0}});
  const double expected = 5 * (0.25 + 4.0) + 5 * 2.25 + 5 * (1.0 + 4.0);
  EXPECT_NEAR(e.divergence, expected, 1e-9 * expected);
  ASSERT_EQ(e.pairs.size(), 3u);
}

TEST(HrDivergence, SymmetricAdditiveNonNegative) {
  std::mt19937_64 rng(9);
  const std::map<std::string, double> s{{"A", 0.3}, {"B", 1.7}};
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_series(rng, 30), b = random_series(rng, 30), c = random_series(rng, 30);
    const auto e = hr_divergence({a, b, c}, s);
    const auto r = hr_divergence({c, a, b}, s);
    EXPECT_NEAR(e.divergence, r.divergence, 1e-12 * e.divergence);
    const double pairwise = hr_divergence({a, b}, s).divergence + hr_divergence({a, c}, s).divergence +
                            hr_divergence({b, c}, s).divergence;
    EXPECT_NEAR(e.divergence, pairwise, 1e-12 * pairwise);
    double sum = 0.0;
    for (const auto& p : e.pairs) {
      EXPECT_GE(p.value, 0.0);
      sum += p.value;
    }
    EXPECT_NEAR(sum, e.divergence, 1e-12 * sum);
    EXPECT_GT(e.divergence, 0.0);
  }
}

TEST(HrDivergence, NeedsTwoModels) {
  EXPECT_THROW(hr_divergence({constant_series(3, 1, 1)}, {{"A", 1.0}}), InputError);
}

TEST(DivergenceSearch, SingleDesignIsReturned) {
  const auto m1 = candidate("mech1", "mech1.mech"), m2 = candidate("mech2", "mech2.mech");
  const auto r = divergence_search({m1, m2}, {exp1()}, sigma1(), 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].design.label(), exp1().label());
  EXPECT_GT(r[0].divergence, 0.0);
}

TEST(DivergenceSearch, IdenticalModelsGiveStableZeroRanking) {
  const auto m1 = candidate("a", "mech1.mech"), m2 = candidate("b", "mech1.mech");
  const auto r = divergence_search({m1, m2}, three_designs(), sigma1(), 1);
  ASSERT_EQ(r.size(), 3u);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].divergence, 0.0);
    EXPECT_EQ(r[i].index, i);
  }
}

TEST(DivergenceSearch, RankingInvariantToSigmaScaling) {
  const auto m1 = candidate("mech1", "mech1.mech"), m2 = candidate("mech2", "mech2.mech");
  const auto s = sigma1();
  auto scaled = s;
  const double c = 3.7;
  for (auto& [g, v] : scaled) v *= c;
  const auto a = divergence_search({m1, m2}, three_designs(), s, 1);
  const auto b = divergence_search({m1, m2}, three_designs(), scaled, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].index, b[i].index);
    EXPECT_NEAR(b[i].divergence, a[i].divergence / (c * c), 1e-12 * a[i].divergence);
    if (i > 0) EXPECT_GE(a[i - 1].divergence, a[i].divergence);
  }
}

TEST(Bic, UnitObjective) {
  for (double k : {0.0, 3.0, 7.0}) EXPECT_NEAR(bic(k, 500.0, 1.0), k * std::log(500.0), 1e-12);
}

TEST(Bic, KZeroJe) { EXPECT_NEAR(bic(0.0, 10.0, std::exp(1.0)), -2.0, 1e-12); }

TEST(Bic, HandEvaluations) {
  const double k = 7, n = 12500, j = 6230.1661;
  const double printed = k * std::log(n) - 2 * std::log(j);
  const double gaussian = n * std::log(j / n) + k * std::log(n);
  EXPECT_NEAR(bic(k, n, j), printed, 1e-9 * std::abs(printed));
  EXPECT_NEAR(bic_gaussian(k, n, j), gaussian, 1e-9 * std::abs(gaussian));
  EXPECT_EQ(bic(BicForm::printed, k, n, j), bic(k, n, j));
  EXPECT_EQ(bic(BicForm::gaussian, k, n, j), bic_gaussian(k, n, j));
}

TEST(Bic, NonPositiveObjectiveRejected) {
  EXPECT_THROW(bic(1, 10, 0.0), InputError);
  EXPECT_THROW(bic(1, 10, -1.0), InputError);
  EXPECT_THROW(bic_gaussian(1, 10, 0.0), InputError);
}

TEST(Bic, StrictlyIncreasingInK) {
  for (BicForm f : {BicForm::printed, BicForm::gaussian}) {
    for (double k = 0; k < 10; ++k) EXPECT_LT(bic(f, k, 100, 3.0), bic(f, k + 1, 100, 3.0));
  }
}

TEST(Bic, FormParsing) {
  EXPECT_EQ(parse_bic_form("printed"), BicForm::printed);
  EXPECT_EQ(parse_bic_form("gaussian"), BicForm::gaussian);
  EXPECT_THROW(parse_bic_form("other"), InputError);
}

TEST(Discriminate, TrueModelSelfIdentifies) {
  auto m1 = candidate("mech1", "mech1.mech"), m2 = candidate("mech2", "mech2.mech"),
       m3 = candidate("mech3", "mech3.mech");
  for (auto* c : {&m1, &m2, &m3}) c->params.set_free({"dG0", "Ga3"});
  auto obs = synthetic_observation(m2.model, exp1(), m2.params, {}, 1);
  obs.sigma = sigma1();
  for (BicForm form : {BicForm::gaussian, BicForm::printed}) {
    DiscriminationOptions o;
    o.form = form;
    const auto rows = discriminate({m1, m2, m3}, {obs}, o);
    ASSERT_EQ(rows.size(), 3u);
    // the printed form rewards a large J, so only the Gaussian form ranks the truth first
    if (form == BicForm::gaussian) EXPECT_EQ(rows[0].label, "mech2");
    for (const auto& r : rows) {
      if (r.label == "mech2") {
        EXPECT_EQ(r.objective, 0.0);
        EXPECT_NE(r.note.find("floored"), std::string::npos);
      } else {
        EXPECT_GT(r.objective, 0.0);
      }
      EXPECT_EQ(r.k, 2u);
      EXPECT_EQ(r.n, 2500u * 5u);
    }
  }
}

TEST(DivergenceStudy, ExactSelfMatchWithoutNoise) {
  const auto m1 = candidate("mech1", "mech1.mech"), m2 = candidate("mech2", "mech2.mech"),
             m3 = candidate("mech3", "mech3.mech");
  DivergenceStudyOptions o;
  o.perturbation = 0.0;
  o.noise = false;
  o.threads = 1;
  const auto rows = divergence_study({m1, m2, m3}, "mech2", three_designs(), sigma1(), o);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    ASSERT_FALSE(row.failed) << row.error;
    EXPECT_LT(row.bic_of("mech2"), row.bic_of("mech1"));
    EXPECT_LT(row.bic_of("mech2"), row.bic_of("mech3"));
    EXPECT_EQ(row.models[0].label, "mech1");
  }
  EXPECT_THROW(divergence_study({m1, m2}, "mech9", three_designs(), sigma1(), o), InputError);
  EXPECT_THROW(divergence_study({m1, m2}, "mech2", {}, sigma1(), o), InputError);
}
