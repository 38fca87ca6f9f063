#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "swipt/oracle.hpp"
#include "swipt/waterfill.hpp"

namespace swipt {
namespace {

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double capacity(const WaterfillProblem& pb, const std::vector<double>& p) {
  double c = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) c += pb.w * std::log2(1.0 + p[i] * pb.gammas[i]);
  return c;
}

TEST(WaterFill, SingleCarrierTakesEverything) {
  const auto s = water_fill({1.0}, 1.0, 3.0);
  ASSERT_EQ(s.powers.size(), 1u);
  EXPECT_NEAR(s.powers[0], 3.0, 1e-12);
  EXPECT_NEAR(std::log2(1.0 + s.powers[0]), 2.0, 1e-12);
  EXPECT_LT(s.kkt_residual, 1e-9);
}

TEST(WaterFill, WeakCarrierStaysDry) {
  // Stationary point of log2(1+P1) + log2(1+(3-P1)/4) sits at P1 = 3.
  const auto s = water_fill({1.0, 0.25}, 1.0, 3.0);
  EXPECT_NEAR(s.powers[0], 3.0, 1e-9);
  EXPECT_NEAR(s.powers[1], 0.0, 1e-9);
  WaterfillProblem pb{{1.0, 0.25}, 1.0, 3.0, {}, 0.0};
  EXPECT_NEAR(capacity(pb, s.powers), 2.0, 1e-9);
}

TEST(WaterFill, EqualSlopesSplitEqually) {
  const auto s = water_fill(std::vector<double>(7, 0.3), 2.0, 14.0);
  for (double p : s.powers) EXPECT_NEAR(p, 2.0, 1e-12);
}

TEST(WaterFill, AllZeroSlopesAreDegenerate) {
  const auto s = water_fill({0.0, 0.0}, 1.0, 5.0);
  EXPECT_EQ(s.status, WaterfillStatus::degenerate);
  EXPECT_EQ(total(s.powers), 0.0);
}

TEST(WaterFill, RejectsInvalidProblem) {
  EXPECT_THROW(water_fill({-1.0}, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(water_fill({1.0}, 1.0, -1.0), std::invalid_argument);
  WaterfillProblem pb{{0.0, 1.0}, 1.0, 1.0, {1.0, 1.0}, 0.1};
  EXPECT_THROW(water_fill_with_harvest(pb), std::invalid_argument);
}

TEST(WaterFill, ZeroHarvestFloorMatchesPlain) {
  WaterfillProblem pb{{1.3, 0.4, 2.2, 0.05}, 1.5, 4.0, {1e-3, 3e-3, 2e-3, 4e-3}, 0.0};
  const auto a = water_fill_with_harvest(pb);
  const auto b = water_fill(pb.gammas, pb.w, pb.budget);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(a.powers[i], b.powers[i]);
  EXPECT_EQ(a.harvest_multiplier, 0.0);
}

TEST(WaterFillHarvest, TightFloorExample) {
  // Optimum on the line 1e-3 P1 + 2e-3 P2 = 3.5e-3 with P1 + P2 = 2.
  WaterfillProblem pb{{1.0, 1.0}, 1.0, 2.0, {1e-3, 2e-3}, 3.5e-3};
  const auto s = water_fill_with_harvest(pb);
  ASSERT_EQ(s.status, WaterfillStatus::optimal);
  EXPECT_NEAR(s.powers[0], 0.5, 1e-8);
  EXPECT_NEAR(s.powers[1], 1.5, 1e-8);
  EXPECT_NEAR(capacity(pb, s.powers), std::log2(1.5) + std::log2(2.5), 1e-8);
  EXPECT_GT(s.harvest_multiplier, 0.0);
  EXPECT_LT(s.kkt_residual, 1e-6);
  EXPECT_GE(s.c1_slack, 0.0);
}

TEST(WaterFillHarvest, FloorAtMaxHarvestIsCorner) {
  WaterfillProblem pb{{1.0, 0.5, 2.0}, 1.0, 2.0, {1e-3, 3e-3, 2e-3}, 2.0 * 3e-3};
  const auto s = water_fill_with_harvest(pb);
  ASSERT_TRUE(s.feasible());
  EXPECT_NEAR(s.powers[1], 2.0, 1e-9);
  EXPECT_NEAR(s.powers[0] + s.powers[2], 0.0, 1e-9);
  EXPECT_NEAR(s.c1_slack, 0.0, 1e-12);
  EXPECT_LT(s.kkt_residual, 1e-6);
}

TEST(WaterFillHarvest, UnreachableFloorIsInfeasible) {
  WaterfillProblem pb{{1.0, 1.0}, 1.0, 2.0, {1e-3, 2e-3}, 4.1e-3};
  const auto s = water_fill_with_harvest(pb);
  EXPECT_EQ(s.status, WaterfillStatus::infeasible);
  EXPECT_FALSE(s.feasible());
  EXPECT_LT(s.c1_slack, 0.0);
  WaterfillProblem zero{{1.0}, 1.0, 0.0, {1.0}, 1e-3};
  EXPECT_EQ(water_fill_with_harvest(zero).status, WaterfillStatus::infeasible);
}

TEST(KktResidual, ExactSolutionAndPerturbation) {
  WaterfillProblem pb{{1.0}, 1.0, 3.0, {}, 0.0};
  WaterfillSolution exact;
  exact.powers = {3.0};
  exact.budget_multiplier = 1.0 / (std::numbers::ln2 * 4.0);
  EXPECT_LT(kkt_residual(pb, exact), 1e-9);

  WaterfillProblem pb2{{1.3, 0.4, 2.2}, 1.0, 4.0, {1e-3, 3e-3, 2e-3}, 7e-3};
  const auto s = water_fill_with_harvest(pb2);
  for (std::size_t i = 0; i < 3; ++i) {
    if (s.powers[i] <= 0.0) continue;
    WaterfillSolution bumped = s;
    bumped.powers[i] *= 1.01;
    EXPECT_GT(kkt_residual(pb2, bumped), s.kkt_residual) << i;
  }
}

TEST(KktResidual, BruteForceOptimumScoresLow) {
  WaterfillProblem pb{{1.0, 1.0}, 1.0, 2.0, {1e-3, 2e-3}, 3.5e-3};
  oracle::SimplexInstance inst{pb.gammas, pb.harvest_weights, pb.w, pb.budget, pb.harvest_min};
  oracle::OracleConfig cfg;
  cfg.power_grid_points = 20001;  // step 1e-4
  const auto o = oracle::brute_force_simplex(inst, cfg);
  ASSERT_TRUE(o.feasible);
  EXPECT_NEAR(o.powers[0], 0.5, 1e-4);
  const auto fitted = fit_multipliers(pb, o.powers);
  EXPECT_LT(fitted.kkt_residual, 1e-6);
}

struct RandomProblem {
  WaterfillProblem pb;
  double max_harvest = 0.0;
};

RandomProblem random_problem(std::mt19937_64& rng, std::size_t n, double floor_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomProblem r;
  r.pb.w = 1.0 + 10.0 * u(rng);
  r.pb.budget = std::pow(10.0, -1.0 + 3.0 * u(rng));
  for (std::size_t i = 0; i < n; ++i) {
    r.pb.gammas.push_back(std::pow(10.0, -2.0 + 3.0 * u(rng)));
    r.pb.harvest_weights.push_back(1e-6 * std::exp(-std::log(u(rng) + 1e-12)));  // exponential-ish spread
  }
  r.max_harvest = r.pb.budget * *std::max_element(r.pb.harvest_weights.begin(), r.pb.harvest_weights.end());
  r.pb.harvest_min = floor_fraction * r.max_harvest;
  return r;
}

TEST(WaterFillProperty, BudgetExhaustedAndKktSmall) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 64);
    const double frac = k % 3 == 0 ? 0.0 : u(rng);
    const auto r = random_problem(rng, n, frac);
    const auto s = water_fill_with_harvest(r.pb);
    ASSERT_TRUE(s.feasible());
    EXPECT_NEAR(total(s.powers) / r.pb.budget, 1.0, 1e-9) << k;
    EXPECT_LT(s.kkt_residual, 1e-6) << k;
    EXPECT_GE(s.harvested, r.pb.harvest_min * (1.0 - 1e-12)) << k;
    for (double p : s.powers) EXPECT_GE(p, 0.0);
  }
}

TEST(WaterFillProperty, HarvestMonotoneInGammaIsNeverViolated) {
  std::mt19937_64 rng(405);
  for (int k = 0; k < 500; ++k) {
    const auto r = random_problem(rng, 16, 0.999);
    EXPECT_NO_THROW(water_fill_with_harvest(r.pb));
  }
}

TEST(WaterFillProperty, GammaHintGivesSameAnswer) {
  std::mt19937_64 rng(406);
  for (int k = 0; k < 300; ++k) {
    const auto r = random_problem(rng, 12, 0.7);
    const auto cold = water_fill_with_harvest(r.pb);
    for (double scale : {0.01, 0.9, 1.0, 30.0}) {
      WaterfillOptions opt;
      opt.gamma_hint = cold.harvest_multiplier * scale;
      const auto warm = water_fill_with_harvest(r.pb, opt);
      EXPECT_NEAR(capacity(r.pb, warm.powers), capacity(r.pb, cold.powers), 1e-8 * capacity(r.pb, cold.powers));
      EXPECT_LT(warm.kkt_residual, 1e-6);
    }
  }
}

class OracleEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(OracleEquivalence, MatchesSimplexGrid) {
  const std::size_t n = GetParam();
  std::mt19937_64 rng(500 + n);
  oracle::OracleConfig cfg;
  cfg.power_grid_points = n <= 2 ? 2001 : (n == 3 ? 201 : 41);
  cfg.refine_levels = n <= 2 ? 0 : 12;
  for (int k = 0; k < 25; ++k) {
    const auto r = random_problem(rng, n, k % 2 == 0 ? 0.0 : 0.6);
    const auto s = water_fill_with_harvest(r.pb);
    const oracle::SimplexInstance inst{r.pb.gammas, r.pb.harvest_weights, r.pb.w, r.pb.budget, r.pb.harvest_min};
    const auto o = oracle::brute_force_simplex(inst, cfg);
    ASSERT_TRUE(o.feasible);
    const double cs = capacity(r.pb, s.powers);
    EXPECT_GE(cs, o.capacity_bps * (1.0 - 1e-9)) << k;
    EXPECT_LE(cs, o.capacity_bps * 1.005) << k;
  }
}

INSTANTIATE_TEST_SUITE_P(SmallN, OracleEquivalence, ::testing::Values(1u, 2u, 3u, 4u));

}  // namespace
}  // namespace swipt
