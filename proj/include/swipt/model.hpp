#pragma once

// Link model for an OFDM power-splitting SWIPT receiver: SINR slopes,
// capacity, harvested power and the constraint set. Everything is in SI units.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swipt {

/// Relative slack used when testing the closed constraint set.
inline constexpr double kConstraintRelTol = 1e-9;

struct SystemParams {
  double bandwidth_total = 20e6;  // Hz
  std::size_t n_subcarriers = 128;
  double sigma_zs2 = 0.0;  // W, signal-processing noise per subcarrier
  double sigma_za2 = 0.0;  // W, antenna noise per subcarrier
  double sigma_i2 = 0.0;   // W, interference per subcarrier
  /// Optional per-subcarrier interference; overrides sigma_i2 when non-empty.
  std::vector<double> sigma_i2_per_subcarrier;
  double p_max = 0.0;  // W
  double p_pg = 0.0;   // W
  double p_c = 0.0;    // W
  double epsilon = 1.0;
  double eta = 1.0;
  double p_min_req = 0.0;  // W
  double carrier_freq = 470e6;
  double distance = 10.0;
  double rician_k = 1.0;  // linear

  double subcarrier_bandwidth() const { return bandwidth_total / static_cast<double>(n_subcarriers); }

  double interference(std::size_t i) const {
    return sigma_i2_per_subcarrier.empty() ? sigma_i2 : sigma_i2_per_subcarrier[i];
  }

  /// Throws std::invalid_argument naming the first violated field.
  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("SystemParams: ") + what);
    };
    require(bandwidth_total > 0.0, "bandwidth_total must be > 0");
    require(n_subcarriers >= 1, "n_subcarriers must be >= 1");
    require(sigma_zs2 >= 0.0 && sigma_za2 >= 0.0 && sigma_i2 >= 0.0, "noise powers must be >= 0");
    require(sigma_i2_per_subcarrier.empty() || sigma_i2_per_subcarrier.size() == n_subcarriers,
            "sigma_i2_per_subcarrier must have n_subcarriers entries");
    for (double v : sigma_i2_per_subcarrier) require(v >= 0.0, "interference powers must be >= 0");
    require(p_max >= 0.0 && p_pg >= 0.0 && p_c >= 0.0 && p_min_req >= 0.0, "powers must be >= 0");
    require(p_pg > p_c, "p_pg must exceed p_c");
    require(epsilon >= 1.0, "epsilon must be >= 1");
    require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  }
};

struct ChannelRealization {
  std::vector<double> fading_power;  // |H_i|^2
  double path_loss = 1.0;            // l, linear attenuation
  double shadowing = 1.0;            // g
  std::uint64_t seed = 0;

  std::size_t size() const { return fading_power.size(); }
  double large_scale() const { return path_loss * shadowing; }

  void validate() const {
    if (fading_power.empty()) throw std::invalid_argument("ChannelRealization: no subcarriers");
    for (double h : fading_power) {
      if (!(h > 0.0)) throw std::invalid_argument("ChannelRealization: fading power must be > 0");
    }
    if (!(path_loss > 0.0 && path_loss <= 1.0)) {
      throw std::invalid_argument("ChannelRealization: path_loss must lie in (0, 1]");
    }
    if (!(shadowing > 0.0)) throw std::invalid_argument("ChannelRealization: shadowing must be > 0");
  }
};

/// Per-subcarrier powers plus the single splitting ratio shared by all subcarriers.
struct AllocationPolicy {
  std::vector<double> powers;
  double rho = 1.0;

  double total_power() const {
    double s = 0.0;
    for (double p : powers) s += p;
    return s;
  }
};

struct ConstraintReport {
  double harvested = 0.0;
  bool harvest_ok = false;  // C1
  double sum_power = 0.0;
  bool budget_ok = false;  // C2
  double grid_draw = 0.0;
  bool grid_ok = false;  // C3
  bool feasible = false;
};

struct SolveResult {
  AllocationPolicy policy;
  double capacity_bps = 0.0;
  double spectral_efficiency = 0.0;
  double harvested = 0.0;
  bool feasible = false;
  int iterations = 0;
  std::map<std::string, double> duals;
  std::map<std::string, double> residuals;
  /// Objective value after every iteration (coordinate ascent only).
  std::vector<double> objective_trace;
};

/// Per-watt SINR slope on subcarrier i at splitting ratio rho.
inline double sinr_coefficient(const SystemParams& params, const ChannelRealization& channel, double rho,
                               std::size_t i) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("sinr_coefficient: rho outside [0, 1]");
  const double denom = rho * (params.sigma_za2 + params.interference(i)) + params.sigma_zs2;
  if (!(denom > 0.0)) throw std::domain_error("sinr_coefficient: zero noise denominator");
  return rho * channel.large_scale() * channel.fading_power[i] / denom;
}

/// All n_F slopes at once.
inline std::vector<double> sinr_coefficients(const SystemParams& params, const ChannelRealization& channel,
                                             double rho) {
  std::vector<double> out(channel.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sinr_coefficient(params, channel, rho, i);
  return out;
}

/// W harvested per W transmitted on each subcarrier: |H_i|^2 g l eta (1 - rho).
inline std::vector<double> harvest_weights(const SystemParams& params, const ChannelRealization& channel,
                                           double rho) {
  std::vector<double> out(channel.size());
  const double scale = channel.large_scale() * params.eta * (1.0 - rho);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * channel.fading_power[i];
  return out;
}

inline double subcarrier_capacity(double p_i, double gamma_i, double w) {
  if (p_i < 0.0 || gamma_i < 0.0) throw std::domain_error("subcarrier_capacity: negative power or slope");
  return w * std::log1p(p_i * gamma_i) / std::numbers::ln2;
}

/// Sum capacity for explicit slopes; shared by the solvers and the oracle.
inline double capacity_from_slopes(std::span<const double> powers, std::span<const double> gammas, double w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) acc += std::log1p(powers[i] * gammas[i]);
  return w * acc / std::numbers::ln2;
}

inline double system_capacity(const AllocationPolicy& policy, const ChannelRealization& channel,
                              const SystemParams& params) {
  const double w = params.subcarrier_bandwidth();
  double total = 0.0;
  for (std::size_t i = 0; i < policy.powers.size(); ++i) {
    if (policy.powers[i] == 0.0) continue;
    total += subcarrier_capacity(policy.powers[i], sinr_coefficient(params, channel, policy.rho, i), w);
  }
  return total;
}

inline double harvested_power(const AllocationPolicy& policy, const ChannelRealization& channel,
                              const SystemParams& params) {
  double acc = 0.0;
  for (std::size_t i = 0; i < policy.powers.size(); ++i) acc += policy.powers[i] * channel.fading_power[i];
  return acc * channel.large_scale() * params.eta * (1.0 - policy.rho);
}

inline ConstraintReport check_feasibility(const AllocationPolicy& policy, const ChannelRealization& channel,
                                          const SystemParams& params) {
  ConstraintReport r;
  r.harvested = harvested_power(policy, channel, params);
  r.sum_power = policy.total_power();
  r.grid_draw = params.p_c + params.epsilon * r.sum_power;
  r.harvest_ok = r.harvested >= params.p_min_req * (1.0 - kConstraintRelTol);
  r.budget_ok = r.sum_power <= params.p_max * (1.0 + kConstraintRelTol);
  r.grid_ok = r.grid_draw <= params.p_pg * (1.0 + kConstraintRelTol);
  r.feasible = r.harvest_ok && r.budget_ok && r.grid_ok;
  return r;
}

/// C2 and C3 are both linear in the sum power, so they collapse to one bound.
inline double effective_power_budget(const SystemParams& params) {
  if (!(params.p_pg > params.p_c)) throw std::invalid_argument("effective_power_budget: p_pg must exceed p_c");
  return std::min(params.p_max, (params.p_pg - params.p_c) / params.epsilon);
}

/// Marks the result infeasible and applies the zero-capacity accounting rule.
inline SolveResult infeasible_result(std::size_t n_subcarriers) {
  SolveResult r;
  r.policy.powers.assign(n_subcarriers, 0.0);
  r.policy.rho = 0.0;
  r.feasible = false;
  r.capacity_bps = 0.0;
  r.spectral_efficiency = 0.0;
  return r;
}

}  // namespace swipt
