#pragma once

// The three allocation algorithms:
//  - solve_optimal:           full search over the common splitting ratio, each
//                             point solved exactly by harvest-constrained water-filling.
//  - solve_coordinate_ascent: alternate power update (water-filling at fixed rho)
//                             and rho update (C1 boundary at fixed powers).
//  - solve_high_sinr:         log2(1+x) ~ log2(x) relaxation; equal power, rho from C1.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swipt/model.hpp"
#include "swipt/waterfill.hpp"

namespace swipt {

enum class Algorithm { optimal, subopt1, subopt2 };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::optimal:
      return "optimal";
    case Algorithm::subopt1:
      return "subopt1";
    case Algorithm::subopt2:
      return "subopt2";
  }
  return "unknown";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "optimal") return Algorithm::optimal;
  if (s == "subopt1") return Algorithm::subopt1;
  if (s == "subopt2") return Algorithm::subopt2;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected optimal, subopt1 or subopt2)");
}

struct OptimalConfig {
  /// 1000 equally spaced intervals on [0, 1].
  std::size_t rho_grid_points = 1001;
  bool include_endpoints = true;
  /// Golden-section refinement of rho around the grid winner, reported as diagnostics.
  bool refine = true;

  void validate() const {
    if (rho_grid_points < 2) throw std::invalid_argument("OptimalConfig: rho_grid_points must be >= 2");
  }
};

struct CoordAscentConfig {
  int n_max = 5;
  double delta = 1.0;  // bit/s
  /// Starting powers; empty means equal power at the effective budget.
  std::vector<double> init_powers;

  void validate() const {
    if (n_max < 1) throw std::invalid_argument("CoordAscentConfig: n_max must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("CoordAscentConfig: delta must be > 0");
  }
};

namespace detail {

inline void finalize(SolveResult& r, const ChannelRealization& channel, const SystemParams& params) {
  r.capacity_bps = system_capacity(r.policy, channel, params);
  r.spectral_efficiency = r.capacity_bps / params.bandwidth_total;
  r.harvested = harvested_power(r.policy, channel, params);
  r.feasible = check_feasibility(r.policy, channel, params).feasible;
  if (!r.feasible) {
    r.capacity_bps = 0.0;
    r.spectral_efficiency = 0.0;
  }
}

inline WaterfillProblem fixed_rho_problem(const ChannelRealization& channel, const SystemParams& params,
                                          double rho, double budget) {
  WaterfillProblem pb;
  pb.gammas = sinr_coefficients(params, channel, rho);
  pb.harvest_weights = harvest_weights(params, channel, rho);
  pb.w = params.subcarrier_bandwidth();
  pb.budget = budget;
  pb.harvest_min = params.p_min_req;
  return pb;
}

inline double max_fading(const ChannelRealization& channel) {
  return *std::max_element(channel.fading_power.begin(), channel.fading_power.end());
}

}  // namespace detail

/// Power allocation at a fixed splitting ratio; rho = 0 has no information
/// flow, so it reduces to the feasibility question of the max-harvest corner.
inline WaterfillSolution water_fill_at_rho(const ChannelRealization& channel, const SystemParams& params,
                                           double rho, const WaterfillOptions& opt = {}) {
  const double budget = effective_power_budget(params);
  if (rho == 0.0) {
    WaterfillSolution s;
    s.powers.assign(channel.size(), 0.0);
    const auto best = static_cast<std::size_t>(
        std::max_element(channel.fading_power.begin(), channel.fading_power.end()) - channel.fading_power.begin());
    s.powers[best] = budget;
    s.harvested = budget * channel.fading_power[best] * channel.large_scale() * params.eta;
    s.c1_slack = s.harvested - params.p_min_req;
    s.status = s.harvested >= params.p_min_req * (1.0 - kConstraintRelTol) ? WaterfillStatus::degenerate
                                                                            : WaterfillStatus::infeasible;
    return s;
  }
  return water_fill_with_harvest(detail::fixed_rho_problem(channel, params, rho, budget), opt);
}

inline SolveResult solve_optimal(const ChannelRealization& channel, const SystemParams& params,
                                 const OptimalConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = channel.size();
  const double budget = effective_power_budget(params);
  const double harvest_scale = channel.large_scale() * params.eta * detail::max_fading(channel);

  SolveResult best = infeasible_result(n);
  double best_capacity = -1.0;
  WaterfillSolution best_wf;
  double max_kkt = 0.0;
  double gamma_hint = 0.0;
  int evaluated = 0;
  const std::size_t first = cfg.include_endpoints ? 0 : 1;
  const std::size_t last = cfg.include_endpoints ? cfg.rho_grid_points - 1 : cfg.rho_grid_points - 2;
  for (std::size_t k = first; k <= last; ++k) {
    const double rho = static_cast<double>(k) / static_cast<double>(cfg.rho_grid_points - 1);
    // Max harvest shrinks with rho: once unreachable it stays unreachable.
    if (budget * harvest_scale * (1.0 - rho) < params.p_min_req * (1.0 - kConstraintRelTol)) break;
    WaterfillOptions opt;
    opt.gamma_hint = gamma_hint;
    const WaterfillSolution wf = water_fill_at_rho(channel, params, rho, opt);
    ++evaluated;
    if (!wf.feasible()) continue;
    gamma_hint = wf.harvest_multiplier;
    double capacity = 0.0;
    if (rho > 0.0) {
      max_kkt = std::max(max_kkt, wf.kkt_residual);
      capacity = capacity_from_slopes(wf.powers, sinr_coefficients(params, channel, rho),
                                      params.subcarrier_bandwidth());
    }
    if (capacity > best_capacity) {  // strict: ties keep the smaller rho
      best_capacity = capacity;
      best.policy.powers = wf.powers;
      best.policy.rho = rho;
      best_wf = wf;
    }
  }
  best.iterations = evaluated;
  if (best_capacity < 0.0) return best;

  detail::finalize(best, channel, params);
  best.duals["mu"] = best_wf.budget_multiplier;
  best.duals["gamma"] = best_wf.harvest_multiplier;
  best.residuals["waterfill_kkt"] = best_wf.kkt_residual;
  best.residuals["waterfill_kkt_max"] = max_kkt;
  best.residuals["c1_relative_slack"] =
      params.p_min_req > 0.0 ? (best.harvested - params.p_min_req) / params.p_min_req : 0.0;

  if (cfg.refine && best.policy.rho > 0.0) {
    // Continuous refinement of rho inside the neighbouring grid cells.
    const double step = 1.0 / static_cast<double>(cfg.rho_grid_points - 1);
    double a = std::max(step * 1e-6, best.policy.rho - step);
    double b = std::min(1.0, best.policy.rho + step);
    auto eval = [&](double rho) {
      const WaterfillSolution wf = water_fill_at_rho(channel, params, rho);
      if (!wf.feasible()) return -1.0;
      return capacity_from_slopes(wf.powers, sinr_coefficients(params, channel, rho), params.subcarrier_bandwidth());
    };
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
      if (f1 >= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = eval(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = eval(x2);
      }
    }
    double rho_ref = f1 >= f2 ? x1 : x2;
    double cap_ref = std::max(f1, f2);
    if (cap_ref < best.capacity_bps) {
      rho_ref = best.policy.rho;
      cap_ref = best.capacity_bps;
    }
    const WaterfillSolution wf = water_fill_at_rho(channel, params, rho_ref);
    best.residuals["refined_rho"] = rho_ref;
    best.residuals["refined_capacity_bps"] = cap_ref;
    best.residuals["refined_harvested_w"] = wf.harvested;
  }
  return best;
}

/// Largest rho meeting C1 at fixed powers; capacity is increasing in rho, so
/// the C1 boundary is the optimum of the rho subproblem. Empty when even
/// rho = 0 cannot meet the harvest requirement.
inline std::optional<double> rho_update(const std::vector<double>& powers, const ChannelRealization& channel,
                                        const SystemParams& params) {
  if (params.p_min_req <= 0.0) return 1.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) weighted += powers[i] * channel.fading_power[i];
  const double available = params.eta * channel.large_scale() * weighted;
  if (!(available > 0.0) || available < params.p_min_req * (1.0 - kConstraintRelTol)) return std::nullopt;
  return std::clamp(1.0 - params.p_min_req / available, 0.0, 1.0);
}

inline SolveResult solve_coordinate_ascent(const ChannelRealization& channel, const SystemParams& params,
                                           const CoordAscentConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = channel.size();
  const double budget = effective_power_budget(params);

  AllocationPolicy current;
  current.powers = cfg.init_powers.empty() ? std::vector<double>(n, budget / static_cast<double>(n)) : cfg.init_powers;
  const auto rho0 = rho_update(current.powers, channel, params);
  if (!rho0) return infeasible_result(n);
  current.rho = *rho0;
  double objective = system_capacity(current, channel, params);

  SolveResult r;
  r.objective_trace.push_back(objective);
  WaterfillSolution last_wf;
  double max_kkt = 0.0;
  bool converged = false;
  int n_iter = 0;
  while (n_iter < cfg.n_max) {
    ++n_iter;
    AllocationPolicy next;
    if (current.rho > 0.0) {
      last_wf = water_fill_at_rho(channel, params, current.rho);
      if (!last_wf.feasible()) break;  // cannot happen from a feasible iterate
      max_kkt = std::max(max_kkt, last_wf.kkt_residual);
      next.powers = last_wf.powers;
    } else {
      next.powers = current.powers;  // no information flow at rho = 0; keep the harvest-feasible powers
    }
    const auto rho = rho_update(next.powers, channel, params);
    if (!rho) break;
    next.rho = *rho;
    double next_objective = system_capacity(next, channel, params);
    if (next_objective < objective) {
      // The incumbent is feasible for both blocks, so an exact block update cannot
      // lose; a drop here is rounding in the water-filling tolerances.
      next = current;
      next_objective = objective;
    }
    r.objective_trace.push_back(next_objective);
    const bool done = std::abs(next_objective - objective) < cfg.delta;
    current = std::move(next);
    objective = next_objective;
    if (done) {
      converged = true;
      break;
    }
  }
  r.policy = std::move(current);
  r.iterations = n_iter;
  detail::finalize(r, channel, params);
  r.duals["mu"] = last_wf.budget_multiplier;
  r.duals["gamma"] = last_wf.harvest_multiplier;
  r.residuals["waterfill_kkt"] = last_wf.kkt_residual;
  r.residuals["waterfill_kkt_max"] = max_kkt;
  r.residuals["converged"] = converged ? 1.0 : 0.0;
  return r;
}

/// High-SINR capacity W log2(P rho l g |H|^2 / (rho (sa + sI) + ss)); may be negative.
inline double approx_capacity(double p_i, double rho_info, const ChannelRealization& channel,
                              const SystemParams& params, std::size_t i) {
  if (!(p_i > 0.0) || !(rho_info > 0.0)) throw std::domain_error("approx_capacity: power and rho must be > 0");
  return params.subcarrier_bandwidth() * std::log2(p_i * sinr_coefficient(params, channel, rho_info, i));
}

/// KKT stationarity of the relaxed problem (variables P_i, rho^I_i, rho^E_i with
/// rho^I + rho^E = 1 and a common rho^E) at a given point. Multipliers are
/// recovered from the rho^I and aggregated rho^E conditions; the residual is the
/// spread of the power condition W/(P_i ln2) = mu - gamma h_i across subcarriers.
struct HighSinrKkt {
  double mu = 0.0;
  double gamma = 0.0;
  double power_stationarity = 0.0;
  double budget_slack = 0.0;
};

inline HighSinrKkt high_sinr_kkt(const AllocationPolicy& policy, const ChannelRealization& channel,
                                 const SystemParams& params) {
  const std::size_t n = channel.size();
  const double w = params.subcarrier_bandwidth();
  const double rho_i = policy.rho;
  const double rho_e = 1.0 - policy.rho;
  HighSinrKkt k;
  // d/d rho^I of W log2(rho / (rho s + ss)) = W ss / (ln2 rho (rho s + ss))
  double nu_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = params.sigma_za2 + params.interference(i);
    nu_sum += w * params.sigma_zs2 / (std::numbers::ln2 * rho_i * (rho_i * s + params.sigma_zs2));
  }
  // d/d rho^E of -gamma P_min / rho^E summed over the consensus block
  if (params.p_min_req > 0.0 && rho_e > 0.0) k.gamma = rho_e * rho_e * nu_sum / params.p_min_req;
  const double hscale = channel.large_scale() * params.eta;
  std::vector<double> prices(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prices[i] = w / (policy.powers[i] * std::numbers::ln2) + k.gamma * hscale * channel.fading_power[i];
    mean += prices[i];
  }
  k.mu = mean / static_cast<double>(n);
  for (double p : prices) k.power_stationarity = std::max(k.power_stationarity, std::abs(p - k.mu) / k.mu);
  const double budget = effective_power_budget(params);
  k.budget_slack = std::abs(budget - policy.total_power()) / budget;
  return k;
}

inline SolveResult solve_high_sinr(const ChannelRealization& channel, const SystemParams& params) {
  const std::size_t n = channel.size();
  const double budget = effective_power_budget(params);
  SolveResult r;
  r.policy.powers.assign(n, budget / static_cast<double>(n));
  double rho_e = 0.0;
  if (params.p_min_req > 0.0) {
    double weighted = 0.0;
    for (double p_h : channel.fading_power) weighted += p_h;
    weighted *= budget / static_cast<double>(n) * params.eta * channel.large_scale();
    if (!(weighted > 0.0) || params.p_min_req > weighted * (1.0 + kConstraintRelTol)) return infeasible_result(n);
    rho_e = std::min(1.0, params.p_min_req / weighted);
  }
  r.policy.rho = 1.0 - rho_e;
  r.iterations = 1;
  detail::finalize(r, channel, params);
  if (r.policy.rho > 0.0 && budget > 0.0) {
    const HighSinrKkt k = high_sinr_kkt(r.policy, channel, params);
    r.duals["mu"] = k.mu;
    r.duals["gamma"] = k.gamma;
    r.residuals["power_stationarity"] = k.power_stationarity;
    r.residuals["budget_slack"] = k.budget_slack;
  }
  return r;
}

inline SolveResult solve(Algorithm algorithm, const ChannelRealization& channel, const SystemParams& params,
                         const OptimalConfig& optimal_cfg = {}, const CoordAscentConfig& ca_cfg = {}) {
  switch (algorithm) {
    case Algorithm::optimal:
      return solve_optimal(channel, params, optimal_cfg);
    case Algorithm::subopt1:
      return solve_coordinate_ascent(channel, params, ca_cfg);
    case Algorithm::subopt2:
      return solve_high_sinr(channel, params);
  }
  throw std::logic_error("solve: unhandled algorithm");
}

}  // namespace swipt
