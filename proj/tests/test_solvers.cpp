#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swipt/channelgen.hpp"
#include "swipt/harness.hpp"
#include "swipt/oracle.hpp"
#include "swipt/solvers.hpp"

namespace swipt {
namespace {

// Reference scenario with a harvest floor the 10 m link can actually deliver.
SystemParams reachable_params(double inr_db = 10.0) {
  SystemParams p = reference_params();
  p.p_min_req = dbm_to_watt(-45.0);
  p.sigma_i2 = interference_from_inr(p, inr_db);
  return p;
}

ChannelRealization channel_for(const SystemParams& p, std::uint64_t seed) {
  return generate_channel(p, channel_config_from(p), seed);
}

TEST(Algorithms, NamesRoundTrip) {
  for (auto a : {Algorithm::optimal, Algorithm::subopt1, Algorithm::subopt2}) {
    EXPECT_EQ(algorithm_from_string(to_string(a)), a);
  }
  EXPECT_THROW(algorithm_from_string("greedy"), std::invalid_argument);
}

TEST(SolveOptimal, NoFloorPicksRhoOneAndPlainWaterFilling) {
  SystemParams p = reachable_params();
  p.p_min_req = 0.0;
  const auto ch = channel_for(p, 3);
  const auto r = solve_optimal(ch, p);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.policy.rho, 1.0);
  const auto wf = water_fill(sinr_coefficients(p, ch, 1.0), p.subcarrier_bandwidth(), effective_power_budget(p));
  for (std::size_t i = 0; i < ch.size(); ++i) EXPECT_NEAR(r.policy.powers[i], wf.powers[i], 1e-12);
}

TEST(SolveOptimal, UnreachableFloorIsInfeasible) {
  SystemParams p = reference_params();  // 0 dBm floor, about -5 dBm reachable
  const auto ch = channel_for(p, 1);
  const auto r = solve_optimal(ch, p);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.capacity_bps, 0.0);
}

TEST(SolveOptimal, TwoCarrierDeskInstanceMatchesJointGrid) {
  // Slopes (1, 1) and harvest weights (1e-3, 2e-3) at rho = 0.5, budget 2.
  SystemParams p;
  p.n_subcarriers = 2;
  p.bandwidth_total = 2.0;
  p.sigma_zs2 = 0.5;
  p.sigma_za2 = 0.0;
  p.p_max = 2.0;
  p.p_pg = 100.0;
  p.p_c = 1.0;
  p.epsilon = 1.0;
  p.eta = 1.0;
  p.p_min_req = 0.6 * 3.5e-3;
  ChannelRealization ch;
  ch.fading_power = {1e-3 / 0.5, 2e-3 / 0.5};
  ch.path_loss = 1.0;
  const auto r = solve_optimal(ch, p);
  oracle::OracleConfig cfg;
  cfg.power_grid_points = 2001;
  cfg.rho_grid_points = 2001;
  const auto o = oracle::brute_force_joint(ch, p, cfg);
  ASSERT_TRUE(r.feasible);
  ASSERT_TRUE(o.feasible);
  EXPECT_GE(r.capacity_bps, o.capacity_bps * 0.995);
  EXPECT_LE(r.capacity_bps, o.capacity_bps * 1.002);
}

TEST(SolveOptimal, RefinementNeverWorseThanGrid) {
  const SystemParams p = reachable_params();
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto r = solve_optimal(channel_for(p, s), p);
    ASSERT_TRUE(r.feasible);
    EXPECT_GE(r.residuals.at("refined_capacity_bps"), r.capacity_bps);
    EXPECT_LE(r.residuals.at("refined_capacity_bps"), r.capacity_bps * 1.002);
    EXPECT_LT(r.residuals.at("waterfill_kkt_max"), 1e-6);
  }
}

TEST(RhoUpdate, Examples) {
  SystemParams p;
  p.eta = 0.5;
  p.p_min_req = 0.0;
  ChannelRealization ch;
  ch.fading_power = {1.0, 3.0};
  ch.path_loss = 0.1;
  const std::vector<double> powers{2.0, 1.0};  // eta l sum = 0.5 * 0.1 * 5 = 0.25
  EXPECT_EQ(rho_update(powers, ch, p).value(), 1.0);
  p.p_min_req = 0.125;
  EXPECT_NEAR(rho_update(powers, ch, p).value(), 0.5, 1e-15);
  p.p_min_req = 0.25;
  EXPECT_NEAR(rho_update(powers, ch, p).value(), 0.0, 1e-15);
  p.p_min_req = 0.26;
  EXPECT_FALSE(rho_update(powers, ch, p).has_value());
}

TEST(RhoUpdate, StrictlyIncreasingInEachPower) {
  const SystemParams p = reachable_params();
  const auto ch = channel_for(p, 9);
  std::vector<double> powers(ch.size(), effective_power_budget(p) / static_cast<double>(ch.size()));
  const double base = rho_update(powers, ch, p).value();
  ASSERT_GT(base, 0.0);
  ASSERT_LT(base, 1.0);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    auto bumped = powers;
    bumped[i] += 1e-3;
    EXPECT_GT(rho_update(bumped, ch, p).value(), base) << i;
  }
}

TEST(CoordinateAscent, NoFloorMatchesOptimalInOneIteration) {
  SystemParams p = reachable_params();
  p.p_min_req = 0.0;
  const auto ch = channel_for(p, 4);
  const auto ca = solve_coordinate_ascent(ch, p);
  const auto opt = solve_optimal(ch, p);
  EXPECT_EQ(ca.policy.rho, 1.0);
  EXPECT_DOUBLE_EQ(ca.capacity_bps, opt.capacity_bps);
  EXPECT_LE(ca.iterations, 2);
  EXPECT_EQ(ca.residuals.at("converged"), 1.0);
}

TEST(CoordinateAscent, ObjectiveTraceNondecreasing) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t s = 1; s <= 40; ++s) {
    SystemParams p = reachable_params(20.0 * u(rng));
    p.p_max = dbm_to_watt(10.0 + 36.0 * u(rng));
    const auto r = solve_coordinate_ascent(channel_for(p, s), p);
    ASSERT_TRUE(r.feasible);
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
      EXPECT_GE(r.objective_trace[k], r.objective_trace[k - 1] - 1e-9) << s;
    }
    EXPECT_NEAR(r.harvested / p.p_min_req, 1.0, 1e-6);
  }
}

TEST(CoordinateAscent, SmallInstanceNearOptimal) {
  SystemParams p = reachable_params();
  p.n_subcarriers = 4;
  p.bandwidth_total = 20e6 / 32.0;
  const auto ch = channel_for(p, 12);
  const auto ca = solve_coordinate_ascent(ch, p);
  const auto opt = solve_optimal(ch, p);
  ASSERT_TRUE(opt.feasible);
  EXPECT_GE(ca.capacity_bps, 0.98 * opt.capacity_bps);
}

TEST(CoordinateAscent, InfeasibleStartGivesZeroCapacity) {
  const SystemParams p = reference_params();
  const auto r = solve_coordinate_ascent(channel_for(p, 1), p);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.capacity_bps, 0.0);
}

TEST(ApproxCapacity, Examples) {
  SystemParams p;
  p.n_subcarriers = 1;
  p.bandwidth_total = 1.0;
  p.sigma_zs2 = 1.0;
  p.sigma_za2 = 0.0;
  ChannelRealization ch;
  ch.fading_power = {1.0};
  ch.path_loss = 1.0;
  // Gamma = 1 at rho = 1: SINR = P
  const double exact_1000 = subcarrier_capacity(1000.0, 1.0, 1.0);
  EXPECT_LT(std::abs(approx_capacity(1000.0, 1.0, ch, p, 0) - exact_1000) / exact_1000, 0.0015);
  EXPECT_NEAR(approx_capacity(1.0, 1.0, ch, p, 0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(subcarrier_capacity(1.0, 1.0, 1.0), 1.0);
  for (double x : {1e-3, 0.5, 2.0, 1e6}) EXPECT_LE(approx_capacity(x, 1.0, ch, p, 0), subcarrier_capacity(x, 1.0, 1.0));
  EXPECT_THROW(approx_capacity(0.0, 1.0, ch, p, 0), std::domain_error);
  EXPECT_THROW(approx_capacity(1.0, 0.0, ch, p, 0), std::domain_error);
}

TEST(HighSinr, NoFloorEqualPowersFullRho) {
  SystemParams p = reachable_params();
  p.p_min_req = 0.0;
  const auto ch = channel_for(p, 2);
  const auto r = solve_high_sinr(ch, p);
  EXPECT_EQ(r.policy.rho, 1.0);
  for (double x : r.policy.powers) EXPECT_DOUBLE_EQ(x, effective_power_budget(p) / 128.0);
}

TEST(HighSinr, HarvestFloorIsTight) {
  const SystemParams p = reachable_params();
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto r = solve_high_sinr(channel_for(p, s), p);
    ASSERT_TRUE(r.feasible);
    EXPECT_NEAR(r.harvested / p.p_min_req, 1.0, 1e-9);
    EXPECT_LT(r.residuals.at("budget_slack"), 1e-12);
  }
}

TEST(HighSinr, FlatChannelMatchesOptimal) {
  SystemParams p = reachable_params(0.0);
  p.sigma_i2 = 0.0;
  p.p_max = 1e3;
  p.p_pg = 1e6;  // budget limited by p_max only
  ChannelRealization ch;
  ch.fading_power.assign(p.n_subcarriers, 1.0);
  ch.path_loss = channel_for(p, 1).path_loss;
  const auto hs = solve_high_sinr(ch, p);
  const auto opt = solve_optimal(ch, p);
  ASSERT_TRUE(hs.feasible);
  EXPECT_NEAR(hs.capacity_bps / opt.capacity_bps, 1.0, 0.01);
  EXPECT_LT(hs.residuals.at("power_stationarity"), 1e-9);  // flat channel: equal prices
}

TEST(HighSinr, GapShrinksWithSnrOnSyntheticChannel) {
  // Quiet receiver so SINR spans low to very high over the sweep.
  SystemParams p = reachable_params(0.0);
  p.sigma_i2 = 0.0;
  p.sigma_zs2 = dbm_to_watt(-90.0);
  p.p_min_req = dbm_to_watt(-60.0);
  p.p_pg = 1e9;
  const auto ch = channel_for(p, 5);
  double prev_gap = 1.0;
  for (double dbm = 0.0; dbm <= 60.0; dbm += 6.0) {
    p.p_max = dbm_to_watt(dbm);
    const auto opt = solve_optimal(ch, p);
    const auto hs = solve_high_sinr(ch, p);
    ASSERT_TRUE(opt.feasible && hs.feasible);
    const double gap = (opt.capacity_bps - hs.capacity_bps) / opt.capacity_bps;
    EXPECT_LE(gap, prev_gap + 1e-4) << dbm;
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 0.01);
}

TEST(HighSinr, UnreachableFloorIsInfeasible) {
  const SystemParams p = reference_params();
  const auto r = solve_high_sinr(channel_for(p, 1), p);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.capacity_bps, 0.0);
}

TEST(Dominance, OptimalBeatsSuboptimalUpToGridSlack) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t s = 1; s <= 30; ++s) {
    SystemParams p = reachable_params(20.0 * u(rng));
    p.p_max = dbm_to_watt(10.0 + 36.0 * u(rng));
    const auto ch = channel_for(p, s);
    const auto opt = solve_optimal(ch, p);
    const auto ca = solve_coordinate_ascent(ch, p);
    const auto hs = solve_high_sinr(ch, p);
    EXPECT_GE(opt.capacity_bps, ca.capacity_bps * (1.0 - 0.002)) << s;
    EXPECT_GE(opt.capacity_bps, hs.capacity_bps * (1.0 - 0.002)) << s;
  }
}

TEST(SuboptimalRho, NondecreasingInPmax) {
  const SystemParams base = reachable_params();
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto ch = channel_for(base, s);
    double prev_ca = -1.0, prev_hs = -1.0;
    for (double dbm = 10.0; dbm <= 46.0; dbm += 4.0) {
      SystemParams p = base;
      p.p_max = dbm_to_watt(dbm);
      const auto ca = solve_coordinate_ascent(ch, p);
      const auto hs = solve_high_sinr(ch, p);
      if (!ca.feasible || !hs.feasible) continue;
      EXPECT_GE(ca.policy.rho, prev_ca - 1e-12) << s << ' ' << dbm;
      EXPECT_GE(hs.policy.rho, prev_hs - 1e-12) << s << ' ' << dbm;
      prev_ca = ca.policy.rho;
      prev_hs = hs.policy.rho;
    }
  }
}

}  // namespace
}  // namespace swipt
