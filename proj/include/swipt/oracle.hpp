#pragma once

// Brute-force reference solvers for small instances. Slow on purpose and
// independent of the water-filling machinery: only the capacity and harvest
// formulas from the model are shared.
//
// Capacity and harvest both increase in every P_i, so only the full-budget
// face of the power simplex is enumerated.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "swipt/model.hpp"

namespace swipt::oracle {

struct OracleConfig {
  std::size_t power_grid_points = 2001;  // per dimension on the budget face
  std::size_t rho_grid_points = 2001;
  std::size_t max_subcarriers = 4;
  /// Zoom levels after the exhaustive grid (0 = pure enumeration). Each level
  /// halves the step and re-searches a (2r+1)^(n-1) window around the incumbent.
  int refine_levels = 0;
  int refine_radius = 3;

  void validate(std::size_t n) const {
    if (power_grid_points < 3 || rho_grid_points < 3) throw std::invalid_argument("OracleConfig: grid points must be >= 3");
    if (n > max_subcarriers) throw std::invalid_argument("OracleConfig: too many subcarriers for brute force");
    if (refine_levels < 0 || refine_radius < 1) throw std::invalid_argument("OracleConfig: bad refinement settings");
  }
};

/// Abstract fixed-rho instance: slopes, harvest weights, budget, floor.
struct SimplexInstance {
  std::vector<double> gammas;
  std::vector<double> harvest_weights;
  double w = 1.0;
  double budget = 0.0;
  double harvest_min = 0.0;
};

struct OracleResult {
  bool feasible = false;
  std::vector<double> powers;
  double rho = 0.0;
  double capacity_bps = 0.0;
  double harvested = 0.0;
};

namespace detail {

inline double capacity(const SimplexInstance& inst, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::log1p(p[i] * inst.gammas[i]);
  return inst.w * acc / std::log(2.0);
}

inline double harvest(const SimplexInstance& inst, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * inst.harvest_weights[i];
  return acc;
}

// Visits every composition (k_0..k_{n-1}) of `steps` into n non-negative parts.
inline void for_each_composition(std::size_t n, std::size_t steps,
                                 const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> k(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t dim, std::size_t left) {
    if (dim + 1 == n) {
      k[dim] = left;
      fn(k);
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      k[dim] = v;
      rec(dim + 1, left - v);
    }
  };
  rec(0, steps);
}

}  // namespace detail

/// Best full-budget allocation meeting the harvest floor.
inline OracleResult brute_force_simplex(const SimplexInstance& inst, const OracleConfig& cfg) {
  const std::size_t n = inst.gammas.size();
  cfg.validate(n);
  OracleResult best;
  double best_cap = -std::numeric_limits<double>::infinity();
  const double floor = inst.harvest_min * (1.0 - kConstraintRelTol);
  std::vector<double> p(n, 0.0);

  auto consider = [&](const std::vector<double>& cand) {
    if (inst.harvest_min > 0.0 && detail::harvest(inst, cand) < floor) return;
    const double c = detail::capacity(inst, cand);
    if (c > best_cap) {
      best_cap = c;
      best.powers = cand;
    }
  };

  if (n == 1) {
    consider({inst.budget});
  } else {
    const std::size_t steps = cfg.power_grid_points - 1;
    const double unit = inst.budget / static_cast<double>(steps);
    detail::for_each_composition(n, steps, [&](const std::vector<std::size_t>& k) {
      for (std::size_t i = 0; i < n; ++i) p[i] = unit * static_cast<double>(k[i]);
      consider(p);
    });

    // Pattern-search zoom in the first n-1 coordinates; the last absorbs the rest.
    double step = unit;
    const int r = cfg.refine_radius;
    for (int level = 0; level < cfg.refine_levels && !best.powers.empty(); ++level) {
      step *= 0.5;
      for (int repeat = 0; repeat < 64; ++repeat) {
        const std::vector<double> center = best.powers;
        std::vector<int> offset(n - 1, -r);
        bool edge_hit = false;
        const std::vector<double> before = best.powers;
        while (true) {
          double used = 0.0;
          bool ok = true;
          for (std::size_t i = 0; i + 1 < n; ++i) {
            p[i] = center[i] + step * offset[i];
            if (p[i] < 0.0) {
              if (p[i] > -1e-12 * inst.budget) {
                p[i] = 0.0;
              } else {
                ok = false;
                break;
              }
            }
            used += p[i];
          }
          if (ok) {
            p[n - 1] = inst.budget - used;
            if (p[n - 1] < 0.0 && p[n - 1] > -1e-12 * inst.budget) p[n - 1] = 0.0;
            if (p[n - 1] >= 0.0) consider(p);
          }
          std::size_t d = 0;
          while (d < n - 1 && offset[d] == r) offset[d++] = -r;
          if (d == n - 1) break;
          ++offset[d];
        }
        if (best.powers != before) {
          for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(best.powers[i] - before[i]) >= step * (r - 0.5)) edge_hit = true;
          }
        }
        if (!edge_hit) break;  // incumbent is interior to the window
      }
    }
  }

  if (best.powers.empty()) return best;
  best.feasible = true;
  best.capacity_bps = best_cap;
  best.harvested = detail::harvest(inst, best.powers);
  return best;
}

inline SimplexInstance instance_at_rho(const ChannelRealization& channel, const SystemParams& params, double rho) {
  SimplexInstance inst;
  const std::size_t n = channel.size();
  inst.gammas.resize(n);
  inst.harvest_weights.resize(n);
  const double l = channel.large_scale();
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = rho * (params.sigma_za2 + params.interference(i)) + params.sigma_zs2;
    inst.gammas[i] = denom > 0.0 ? rho * l * channel.fading_power[i] / denom : 0.0;
    inst.harvest_weights[i] = channel.fading_power[i] * l * params.eta * (1.0 - rho);
  }
  inst.w = params.bandwidth_total / static_cast<double>(params.n_subcarriers);
  inst.budget = std::min(params.p_max, (params.p_pg - params.p_c) / params.epsilon);
  inst.harvest_min = params.p_min_req;
  return inst;
}

inline OracleResult brute_force_fixed_rho(const ChannelRealization& channel, const SystemParams& params, double rho,
                                          const OracleConfig& cfg = {}) {
  OracleResult r = brute_force_simplex(instance_at_rho(channel, params, rho), cfg);
  r.rho = rho;
  if (r.feasible) {
    AllocationPolicy policy{r.powers, rho};
    if (!check_feasibility(policy, channel, params).feasible) {
      throw std::logic_error("oracle produced an infeasible allocation");
    }
  }
  return r;
}

/// Exhaustive rho grid on [0, 1] times brute_force_fixed_rho; ties keep the smaller rho.
inline OracleResult brute_force_joint(const ChannelRealization& channel, const SystemParams& params,
                                      const OracleConfig& cfg = {}) {
  cfg.validate(channel.size());
  OracleResult best;
  for (std::size_t k = 0; k < cfg.rho_grid_points; ++k) {
    const double rho = static_cast<double>(k) / static_cast<double>(cfg.rho_grid_points - 1);
    const OracleResult r = brute_force_fixed_rho(channel, params, rho, cfg);
    if (!r.feasible) continue;
    if (!best.feasible || r.capacity_bps > best.capacity_bps) best = r;
  }
  return best;
}

}  // namespace swipt::oracle
