#pragma once

// Solver-versus-oracle comparison on random small instances.

#include <cstdint>
#include <random>
#include <string>

#include "swipt/channelgen.hpp"
#include "swipt/harness.hpp"
#include "swipt/oracle.hpp"
#include "swipt/solvers.hpp"

namespace swipt {

inline constexpr double kOracleLowerSlack = 0.005;  // solver may trail the oracle by 0.5 %
inline constexpr double kOracleUpperSlack = 0.002;  // and beat it by at most the rho-grid slack

struct SmallInstance {
  ChannelRealization channel;
  SystemParams params;
  double p_max_dbm = 0.0;
  double inr_db = -1.0;  // < 0: no interference
};

/// Reference-scenario noise figures with n subcarriers, a random P_max in [10, 46] dBm and a
/// random INR in {none, 10, 20} dB. With `harvest_half` the harvest floor is set
/// to half of the maximum harvestable power (all budget on the best subcarrier at rho = 0).
inline SmallInstance random_small_instance(std::size_t n, std::uint64_t seed, bool harvest_half) {
  SmallInstance inst;
  inst.params = reference_params();
  inst.params.n_subcarriers = n;
  inst.params.bandwidth_total = 20e6 / 128.0 * static_cast<double>(n);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  inst.p_max_dbm = 10.0 + 36.0 * detail::unit_uniform(rng);
  inst.params.p_max = dbm_to_watt(inst.p_max_dbm);
  const int inr_pick = static_cast<int>(rng() % 3);
  inst.inr_db = inr_pick == 0 ? -1.0 : (inr_pick == 1 ? 10.0 : 20.0);
  inst.params.sigma_i2 = inst.inr_db < 0.0 ? 0.0 : interference_from_inr(inst.params, inst.inr_db);
  inst.channel = generate_channel(inst.params, channel_config_from(inst.params), seed);
  inst.params.p_min_req = 0.0;
  if (harvest_half) {
    const double max_harvest = effective_power_budget(inst.params) * detail::max_fading(inst.channel) *
                               inst.channel.large_scale() * inst.params.eta;
    inst.params.p_min_req = 0.5 * max_harvest;
  }
  return inst;
}

/// Grids that keep the oracle within its slack at n <= 4 in a few seconds.
inline oracle::OracleConfig oracle_config_for(std::size_t n) {
  oracle::OracleConfig cfg;
  cfg.rho_grid_points = 2001;
  if (n <= 2) {
    cfg.power_grid_points = 2001;
    cfg.refine_levels = 0;
  } else if (n == 3) {
    cfg.power_grid_points = 41;
    cfg.refine_levels = 16;
  } else {
    cfg.power_grid_points = 21;
    cfg.refine_levels = 16;
  }
  return cfg;
}

struct CrossCheckOutcome {
  bool solver_feasible = false;
  bool oracle_feasible = false;
  double solver_capacity = 0.0;
  double oracle_capacity = 0.0;
  double solver_rho = 0.0;
  double oracle_rho = 0.0;
  double relative_difference = 0.0;  // (solver - oracle) / oracle
  bool pass = false;
};

inline CrossCheckOutcome cross_check(const SmallInstance& inst, const oracle::OracleConfig& ocfg) {
  CrossCheckOutcome out;
  const SolveResult s = solve_optimal(inst.channel, inst.params);
  const oracle::OracleResult o = oracle::brute_force_joint(inst.channel, inst.params, ocfg);
  out.solver_feasible = s.feasible;
  out.oracle_feasible = o.feasible;
  out.solver_capacity = s.capacity_bps;
  out.oracle_capacity = o.capacity_bps;
  out.solver_rho = s.policy.rho;
  out.oracle_rho = o.rho;
  if (!s.feasible || !o.feasible) {
    out.pass = s.feasible == o.feasible;
    return out;
  }
  out.relative_difference = o.capacity_bps > 0.0 ? (s.capacity_bps - o.capacity_bps) / o.capacity_bps : 0.0;
  out.pass = s.capacity_bps >= o.capacity_bps * (1.0 - kOracleLowerSlack) &&
             s.capacity_bps <= o.capacity_bps * (1.0 + kOracleUpperSlack);
  return out;
}

}  // namespace swipt
