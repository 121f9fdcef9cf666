#include <gtest/gtest.h>

#include <random>

#include "hatmatch/error.hpp"
#include "hatmatch/fixed_effects.hpp"
#include "oracles.hpp"

using namespace hatmatch;

namespace {

FeDesign random_design(std::mt19937& gen, int units, int periods, bool unbalanced) {
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> w(0.2, 3.0);
  FeDesign d;
  d.regressor_names = {"x1", "x2"};
  d.regressors.assign(2, {});
  std::vector<double> ue(units), pe(periods);
  for (auto& v : ue) v = 5 * n(gen);
  for (auto& v : pe) v = 2 * n(gen);
  for (int u = 0; u < units; ++u)
    for (int t = 0; t < periods; ++t) {
      if (unbalanced && gen() % 4 == 0 && t != 0 && t != periods - 1) continue;
      const double x1 = n(gen), x2 = (u % 2) * (t > periods / 2) + 0.3 * n(gen);
      d.regressors[0].push_back(x1);
      d.regressors[1].push_back(x2);
      d.y.push_back(1.5 * x1 - 0.7 * x2 + ue[u] + pe[t] + n(gen));
      d.weights.push_back(w(gen));
      d.unit.push_back(u);
      d.period.push_back(t);
      d.cluster.push_back(u);
    }
  return d;
}

}  // namespace

TEST(FixedEffects, WithinAndDummySolversAgree) {
  std::mt19937 gen(17);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = random_design(gen, 8 + rep % 5, 6 + rep % 4, rep % 2);
    for (auto se : {SeType::Classical, SeType::Robust, SeType::Clustered}) {
      const auto a = fit_two_way_fe(d, se, FeSolver::Within);
      const auto b = fit_two_way_fe(d, se, FeSolver::Dummy);
      for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(a.coef[k], b.coef[k], 1e-8);
        EXPECT_NEAR(a.se[k], b.se[k], 1e-8);
      }
      EXPECT_NEAR(a.r2, b.r2, 1e-8);
    }
  }
}

TEST(FixedEffects, MatchesDenseDummyOracle) {
  std::mt19937 gen(23);
  for (int rep = 0; rep < 10; ++rep) {
    const auto d = random_design(gen, 7, 5, true);
    const auto fit = fit_two_way_fe(d);
    const auto ref = oracle::dummy_wls(d.y, d.weights, d.regressors, d.unit, d.period);
    EXPECT_NEAR(fit.coef[0], ref[0], 1e-8);
    EXPECT_NEAR(fit.coef[1], ref[1], 1e-8);
  }
}

TEST(FixedEffects, CollinearRegressorIsNamed) {
  std::mt19937 gen(3);
  auto d = random_design(gen, 6, 5, false);
  // x2 constant within unit -> absorbed by the unit effects.
  for (std::size_t i = 0; i < d.y.size(); ++i) d.regressors[1][i] = d.unit[i] * 0.5;
  try {
    fit_two_way_fe(d);
    FAIL();
  } catch (const DegenerateFitError& e) {
    EXPECT_EQ(e.dimension(), "x2");
  }
}

TEST(FixedEffects, SeTypesParse) {
  EXPECT_EQ(parse_se_type("clustered"), SeType::Clustered);
  EXPECT_EQ(to_string(SeType::Robust), "robust");
  EXPECT_THROW(parse_se_type("bootstrap"), InvalidInput);
}
