#pragma once

// Water-filling with an optional weighted-sum harvesting floor.
//
// Maximizes  sum_i w log2(1 + P_i Gamma_i)
// subject to sum_i P_i <= budget,  sum_i h_i P_i >= harvest_min,  P_i >= 0.
//
// Stationarity of the Lagrangian on active subcarriers reads
//   w Gamma_i / (ln2 (1 + P_i Gamma_i)) = mu - gamma h_i,
// so P_i = [w / (ln2 (mu - gamma h_i)) - 1 / Gamma_i]^+. For a fixed gamma the
// budget multiplier mu is found by a bracketed Newton/bisection search on the
// (convex, decreasing) allocated sum; gamma is then searched until the harvest
// floor is met with equality. Harvest is nondecreasing in gamma; this is
// checked at every outer step.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace swipt {

struct WaterfillProblem {
  std::vector<double> gammas;
  double w = 1.0;
  double budget = 0.0;
  /// Harvested W per transmitted W; empty means no harvesting term.
  std::vector<double> harvest_weights;
  /// 0 disables the harvest floor.
  double harvest_min = 0.0;

  double harvest_weight(std::size_t i) const { return harvest_weights.empty() ? 0.0 : harvest_weights[i]; }

  void validate() const {
    if (gammas.empty()) throw std::invalid_argument("WaterfillProblem: no subcarriers");
    if (!harvest_weights.empty() && harvest_weights.size() != gammas.size()) {
      throw std::invalid_argument("WaterfillProblem: harvest_weights size mismatch");
    }
    if (!(w > 0.0)) throw std::invalid_argument("WaterfillProblem: w must be > 0");
    if (!(budget >= 0.0)) throw std::invalid_argument("WaterfillProblem: budget must be >= 0");
    if (!(harvest_min >= 0.0)) throw std::invalid_argument("WaterfillProblem: harvest_min must be >= 0");
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      if (!(gammas[i] >= 0.0) || !std::isfinite(gammas[i])) {
        throw std::invalid_argument("WaterfillProblem: gammas must be finite and >= 0");
      }
      const double h = harvest_weight(i);
      if (!(h >= 0.0)) throw std::invalid_argument("WaterfillProblem: harvest weights must be >= 0");
      if (h > 0.0 && gammas[i] == 0.0) {
        throw std::invalid_argument("WaterfillProblem: harvest weight on a subcarrier with zero SINR slope");
      }
    }
  }
};

enum class WaterfillStatus {
  optimal,
  degenerate,  // no subcarrier with a positive slope, or a zero budget
  infeasible,  // harvest floor unreachable within the budget
};

struct WaterfillSolution {
  std::vector<double> powers;
  double budget_multiplier = 0.0;   // mu (lambda * epsilon + beta)
  double harvest_multiplier = 0.0;  // gamma
  double kkt_residual = 0.0;
  double c1_slack = 0.0;  // harvested - harvest_min
  double harvested = 0.0;
  WaterfillStatus status = WaterfillStatus::optimal;
  int outer_iterations = 0;
  int inner_iterations = 0;

  bool feasible() const { return status != WaterfillStatus::infeasible; }
};

struct WaterfillOptions {
  double budget_rel_tol = 1e-10;
  double harvest_rel_tol = 1e-9;
  int max_iterations = 200;
  /// Warm start for the harvest multiplier; <= 0 means none.
  double gamma_hint = 0.0;
};

/// Thrown when harvested power is observed to decrease in the harvest multiplier.
class MonotonicityViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline double harvest_of(const WaterfillProblem& pb, const std::vector<double>& powers) {
  if (pb.harvest_weights.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) acc += pb.harvest_weights[i] * powers[i];
  return acc;
}

/// Plain water level (gamma = 0) by sorting; returns mu.
inline double exact_water_level(const WaterfillProblem& pb, std::vector<double>& powers) {
  const double a = pb.w / std::numbers::ln2;
  std::vector<std::size_t> order;
  order.reserve(pb.gammas.size());
  for (std::size_t i = 0; i < pb.gammas.size(); ++i) {
    if (pb.gammas[i] > 0.0) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return pb.gammas[x] > pb.gammas[y] || (pb.gammas[x] == pb.gammas[y] && x < y);
  });
  // level = a / mu; the k best subcarriers are active when level > 1/Gamma of each of them.
  double inv_sum = 0.0;
  double level = 0.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double inv = 1.0 / pb.gammas[order[k]];
    const double candidate = (pb.budget + inv_sum + inv) / static_cast<double>(k + 1);
    if (candidate <= inv) break;
    inv_sum += inv;
    level = candidate;
    active = k + 1;
  }
  std::fill(powers.begin(), powers.end(), 0.0);
  for (std::size_t k = 0; k < active; ++k) {
    const std::size_t i = order[k];
    powers[i] = std::max(0.0, level - 1.0 / pb.gammas[i]);
  }
  return a / level;
}

struct LevelEval {
  double sum;
  double slope;  // d sum / d t, <= 0
};

// Prices are written as t + gamma (h_top - h_i) with t = mu - gamma h_top, which
// keeps full relative precision when mu sits just above the singular point.
inline LevelEval allocated_sum(const WaterfillProblem& pb, double a, double gamma, double h_top, double t) {
  LevelEval e{0.0, 0.0};
  for (std::size_t i = 0; i < pb.gammas.size(); ++i) {
    const double g = pb.gammas[i];
    if (g <= 0.0) continue;
    const double price = t + gamma * (h_top - pb.harvest_weight(i));
    const double p = a / price - 1.0 / g;
    if (p > 0.0) {
      e.sum += p;
      e.slope -= a / (price * price);
    }
  }
  return e;
}

/// Finds mu for a fixed gamma > 0 so the allocation exhausts the budget.
inline double solve_budget_multiplier(const WaterfillProblem& pb, double gamma, double mu_hint,
                                      const WaterfillOptions& opt, std::vector<double>& powers,
                                      int& iterations) {
  const double a = pb.w / std::numbers::ln2;
  double h_top = 0.0;
  for (std::size_t i = 0; i < pb.gammas.size(); ++i) {
    if (pb.gammas[i] > 0.0) h_top = std::max(h_top, pb.harvest_weight(i));
  }
  const double offset = gamma * h_top;  // allocation diverges as mu -> offset
  double hi = 0.0;                      // nothing is allocated at or above this t
  for (std::size_t i = 0; i < pb.gammas.size(); ++i) {
    if (pb.gammas[i] <= 0.0) continue;
    hi = std::max(hi, a * pb.gammas[i] - gamma * (h_top - pb.harvest_weight(i)));
  }
  double lo = 0.0;
  const double t_hint = mu_hint - offset;
  double t = (t_hint > lo && t_hint < hi) ? t_hint : 0.5 * hi;
  const double target = pb.budget;
  for (int it = 0; it < opt.max_iterations; ++it) {
    ++iterations;
    const LevelEval e = allocated_sum(pb, a, gamma, h_top, t);
    const double f = e.sum - target;
    if (std::abs(f) <= opt.budget_rel_tol * target) break;
    if (f > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = e.slope < 0.0 ? t - f / e.slope : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    if (next == t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      t = next;
      break;
    }
    t = next;
  }
  for (std::size_t i = 0; i < pb.gammas.size(); ++i) {
    const double g = pb.gammas[i];
    powers[i] = g > 0.0 ? std::max(0.0, a / (t + gamma * (h_top - pb.harvest_weight(i))) - 1.0 / g) : 0.0;
  }
  return offset + t;
}

struct InnerSolve {
  std::vector<double> powers;
  double mu = 0.0;
  double harvest = 0.0;
};

inline InnerSolve solve_inner(const WaterfillProblem& pb, double gamma, double mu_hint,
                              const WaterfillOptions& opt, int& iterations) {
  InnerSolve s;
  s.powers.assign(pb.gammas.size(), 0.0);
  if (gamma == 0.0) {
    ++iterations;
    s.mu = exact_water_level(pb, s.powers);
  } else {
    s.mu = solve_budget_multiplier(pb, gamma, mu_hint, opt, s.powers, iterations);
  }
  s.harvest = harvest_of(pb, s.powers);
  return s;
}

inline double marginal_rate(const WaterfillProblem& pb, std::size_t i, double p) {
  return pb.w * pb.gammas[i] / (std::numbers::ln2 * (1.0 + p * pb.gammas[i]));
}

}  // namespace detail

/// Normalized KKT violation of a candidate solution: stationarity (relative to
/// mu), complementary slackness of both multipliers and primal infeasibility.
inline double kkt_residual(const WaterfillProblem& pb, const WaterfillSolution& sol) {
  const double mu = sol.budget_multiplier;
  const double gamma = sol.harvest_multiplier;
  const double scale = mu > 0.0 ? mu : 1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < pb.gammas.size(); ++i) {
    const double p = sol.powers[i];
    if (p < 0.0) worst = std::max(worst, -p / std::max(pb.budget, 1e-300));
    const double gap = detail::marginal_rate(pb, i, std::max(p, 0.0)) - (mu - gamma * pb.harvest_weight(i));
    worst = std::max(worst, (p > 0.0 ? std::abs(gap) : std::max(0.0, gap)) / scale);
  }
  if (pb.budget > 0.0) {
    double total = 0.0;
    for (double p : sol.powers) total += p;
    worst = std::max(worst, std::abs(pb.budget - total) / pb.budget);
    const double harvest = detail::harvest_of(pb, sol.powers);
    const double slack = harvest - pb.harvest_min;
    worst = std::max(worst, std::abs(gamma * slack) / (scale * pb.budget));
    if (pb.harvest_min > 0.0) worst = std::max(worst, std::max(0.0, -slack) / pb.harvest_min);
  }
  return worst;
}

/// Recovers (mu, gamma) for a given power vector from the active stationarity
/// equations, e.g. to score a brute-force optimum with kkt_residual.
inline WaterfillSolution fit_multipliers(const WaterfillProblem& pb, const std::vector<double>& powers) {
  WaterfillSolution sol;
  sol.powers = powers;
  sol.harvested = detail::harvest_of(pb, powers);
  sol.c1_slack = sol.harvested - pb.harvest_min;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] > 0.0 && pb.gammas[i] > 0.0) active.push_back(i);
  }
  if (active.empty()) return sol;
  const bool c1_tight = pb.harvest_min > 0.0 && sol.c1_slack <= 1e-6 * pb.harvest_min;
  double gamma = 0.0;
  double mu = 0.0;
  if (c1_tight && active.size() >= 2) {
    // least squares for g_i = mu - gamma h_i
    double sh = 0.0, sg = 0.0, shh = 0.0, shg = 0.0;
    for (std::size_t i : active) {
      const double h = pb.harvest_weight(i);
      const double g = detail::marginal_rate(pb, i, powers[i]);
      sh += h;
      sg += g;
      shh += h * h;
      shg += h * g;
    }
    const double n = static_cast<double>(active.size());
    const double det = n * shh - sh * sh;
    if (det > 0.0) {
      gamma = std::max(0.0, -(n * shg - sh * sg) / det);
    }
    mu = (sg + gamma * sh) / n;
  } else if (c1_tight) {
    const std::size_t k = active.front();
    const double gk = detail::marginal_rate(pb, k, powers[k]);
    const double hk = pb.harvest_weight(k);
    for (std::size_t i = 0; i < powers.size(); ++i) {
      if (i == k || pb.harvest_weight(i) >= hk) continue;
      gamma = std::max(gamma, (detail::marginal_rate(pb, i, 0.0) - gk) / (hk - pb.harvest_weight(i)));
    }
    mu = gk + gamma * hk;
  } else {
    for (std::size_t i : active) mu += detail::marginal_rate(pb, i, powers[i]);
    mu /= static_cast<double>(active.size());
  }
  sol.budget_multiplier = mu;
  sol.harvest_multiplier = gamma;
  sol.kkt_residual = kkt_residual(pb, sol);
  return sol;
}

inline WaterfillSolution water_fill_with_harvest(const WaterfillProblem& pb, const WaterfillOptions& opt = {}) {
  pb.validate();
  const std::size_t n = pb.gammas.size();
  WaterfillSolution sol;
  sol.powers.assign(n, 0.0);

  const bool any_slope = std::any_of(pb.gammas.begin(), pb.gammas.end(), [](double g) { return g > 0.0; });
  if (!any_slope || pb.budget == 0.0) {
    sol.status = pb.harvest_min > 0.0 ? WaterfillStatus::infeasible : WaterfillStatus::degenerate;
    sol.c1_slack = -pb.harvest_min;
    return sol;
  }

  int inner_iterations = 0;
  const auto finish = [&](detail::InnerSolve&& s, double gamma, int outer) {
    sol.powers = std::move(s.powers);
    sol.budget_multiplier = s.mu;
    sol.harvest_multiplier = gamma;
    sol.harvested = s.harvest;
    sol.c1_slack = s.harvest - pb.harvest_min;
    sol.outer_iterations = outer;
    sol.inner_iterations = inner_iterations;
    sol.status = WaterfillStatus::optimal;
    sol.kkt_residual = kkt_residual(pb, sol);
    return sol;
  };

  detail::InnerSolve base = detail::solve_inner(pb, 0.0, 0.0, opt, inner_iterations);
  const double req = pb.harvest_min;
  if (req <= 0.0 || base.harvest >= req) {
    return finish(std::move(base), 0.0, 0);
  }

  std::size_t best_h = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (pb.harvest_weight(i) > pb.harvest_weight(best_h)) best_h = i;
  }
  const double max_harvest = pb.budget * pb.harvest_weight(best_h);
  if (req > max_harvest * (1.0 + opt.harvest_rel_tol)) {
    sol.status = WaterfillStatus::infeasible;
    sol.c1_slack = max_harvest - req;
    sol.harvested = max_harvest;
    return sol;
  }
  if (req >= max_harvest * (1.0 - opt.harvest_rel_tol)) {
    // Only the single best-harvest subcarrier meets the floor: the limit gamma -> infinity.
    std::vector<double> corner(n, 0.0);
    corner[best_h] = pb.budget;
    WaterfillSolution c = fit_multipliers(pb, corner);
    c.status = WaterfillStatus::optimal;
    c.inner_iterations = inner_iterations;
    return c;
  }

  // Bracket gamma: H(lo) < req <= H(hi).
  const double h_max = pb.harvest_weight(best_h);
  double g_lo = 0.0;
  detail::InnerSolve s_lo = std::move(base);
  double g_hi = opt.gamma_hint > 0.0 ? opt.gamma_hint : s_lo.mu / h_max;
  detail::InnerSolve s_hi = detail::solve_inner(pb, g_hi, 0.0, opt, inner_iterations);
  int outer = 1;
  if (s_hi.harvest >= req && opt.gamma_hint > 0.0) {
    // warm start may overshoot: walk down toward a tight bracket
    for (; outer < opt.max_iterations; ++outer) {
      const double g_try = 0.5 * g_hi;
      detail::InnerSolve s_try = detail::solve_inner(pb, g_try, s_hi.mu, opt, inner_iterations);
      if (s_try.harvest < req) {
        g_lo = g_try;
        s_lo = std::move(s_try);
        break;
      }
      g_hi = g_try;
      s_hi = std::move(s_try);
    }
  }
  while (s_hi.harvest < req && outer < opt.max_iterations) {
    ++outer;
    g_lo = g_hi;
    s_lo = std::move(s_hi);
    g_hi *= 4.0;
    s_hi = detail::solve_inner(pb, g_hi, 0.0, opt, inner_iterations);
  }
  if (s_hi.harvest < req) {
    // budget * h_max was reachable in theory; numerically the bracket failed
    std::ostringstream os;
    os << "water_fill_with_harvest: could not bracket harvest multiplier (req=" << req
       << ", max=" << max_harvest << ")";
    throw std::runtime_error(os.str());
  }

  // Illinois-style false position on f(gamma) = H(gamma) - req.
  // Inner solves leave power errors of order budget_rel_tol * budget; harvest noise follows.
  const double mono_tol = 1e-8 * req + 10.0 * opt.budget_rel_tol * max_harvest;
  double f_lo = s_lo.harvest - req;
  double f_hi = s_hi.harvest - req;
  int side = 0;
  while (s_hi.harvest - req > opt.harvest_rel_tol * std::max(req, 1e-12) && outer < opt.max_iterations) {
    ++outer;
    double g = (g_lo * f_hi - g_hi * f_lo) / (f_hi - f_lo);
    if (!(g > g_lo && g < g_hi)) g = 0.5 * (g_lo + g_hi);
    if (g <= g_lo || g >= g_hi) break;  // bracket exhausted at double precision
    const double mu_hint = 0.5 * (s_lo.mu + s_hi.mu);
    detail::InnerSolve s = detail::solve_inner(pb, g, mu_hint, opt, inner_iterations);
    if (s.harvest < s_lo.harvest - mono_tol || s.harvest > s_hi.harvest + mono_tol) {
      std::ostringstream os;
      os << "water_fill_with_harvest: harvest not monotone in gamma: H(" << g_lo << ")=" << s_lo.harvest
         << ", H(" << g << ")=" << s.harvest << ", H(" << g_hi << ")=" << s_hi.harvest;
      throw MonotonicityViolation(os.str());
    }
    const double f = s.harvest - req;
    if (f >= 0.0) {
      g_hi = g;
      s_hi = std::move(s);
      f_hi = f;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    } else {
      g_lo = g;
      s_lo = std::move(s);
      f_lo = f;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    }
  }
  return finish(std::move(s_hi), g_hi, outer);
}

/// Water-filling under the sum-power budget alone.
inline WaterfillSolution water_fill(const std::vector<double>& gammas, double w, double budget) {
  WaterfillProblem pb;
  pb.gammas = gammas;
  pb.w = w;
  pb.budget = budget;
  return water_fill_with_harvest(pb);
}

}  // namespace swipt
