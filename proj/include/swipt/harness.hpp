#pragma once

// Monte Carlo experiment runner: JSON configuration, paired-seed sweeps over
// P_max and INR, aggregation into SweepPoints and CSV emission.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swipt/channelgen.hpp"
#include "swipt/model.hpp"
#include "swipt/parallel.hpp"
#include "swipt/solvers.hpp"
#include "swipt/units.hpp"

namespace swipt {

/// Invalid or unreadable configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  SystemParams base;
  ChannelGenConfig channel;
  std::vector<Algorithm> algorithms{Algorithm::optimal, Algorithm::subopt1, Algorithm::subopt2};
  std::vector<double> p_max_sweep_dbm;
  std::vector<double> inr_db_levels;
  std::size_t trials = 200;
  std::uint64_t base_seed = 1;
  std::string output_path = "sweep.csv";
  std::size_t threads = 0;  // 0: SWIPT_THREADS or hardware concurrency
  OptimalConfig optimal;
  CoordAscentConfig subopt1;

  void validate() const {
    try {
      base.validate();
      channel.validate();
      optimal.validate();
      subopt1.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (trials < 1) throw ConfigError("experiment.trials must be >= 1");
    if (p_max_sweep_dbm.empty()) throw ConfigError("experiment.p_max_sweep_dbm must be non-empty");
    if (inr_db_levels.empty()) throw ConfigError("experiment.inr_db_levels must be non-empty");
    if (algorithms.empty()) throw ConfigError("experiment.algorithms must be non-empty");
  }
};

/// Reference scenario in SI units (P_min_req = 0 dBm, INR = 0 until a sweep sets it).
inline SystemParams reference_params() {
  SystemParams p;
  p.bandwidth_total = 20e6;
  p.n_subcarriers = 128;
  p.sigma_zs2 = dbm_to_watt(-35.0);
  p.sigma_za2 = dbm_to_watt(-115.0);
  p.sigma_i2 = 0.0;
  p.p_max = dbm_to_watt(46.0);
  p.p_pg = dbm_to_watt(50.0);
  p.p_c = dbm_to_watt(40.0);
  p.epsilon = 1.0 / 0.16;
  p.eta = 0.8;
  p.p_min_req = dbm_to_watt(0.0);
  p.carrier_freq = 470e6;
  p.distance = 10.0;
  p.rician_k = db_to_linear(6.0);
  return p;
}

/// Interference power per subcarrier for a given INR relative to the signal-processing noise.
inline double interference_from_inr(const SystemParams& p, double inr_db) { return p.sigma_zs2 * db_to_linear(inr_db); }

/// Default experiment: reference scenario, P_max 10..46 dBm in 4 dB steps, INR {10, 20} dB, 200 trials.
inline ExperimentConfig default_experiment() {
  ExperimentConfig cfg;
  cfg.base = reference_params();
  cfg.channel = channel_config_from(cfg.base);
  for (double p = 10.0; p <= 46.0; p += 4.0) cfg.p_max_sweep_dbm.push_back(p);
  cfg.inr_db_levels = {10.0, 20.0};
  return cfg;
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + where + "." + it.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    obj.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + where + "." + key + "': " + e.what());
  }
}

inline void read_dbm(const json& obj, const std::string& where, const char* key, double& watt) {
  if (!obj.contains(key)) return;
  double dbm = 0.0;
  read(obj, where, key, dbm);
  watt = dbm_to_watt(dbm);
}

inline void parse_system(const json& j, SystemParams& p, bool& inr_set, double& inr_db) {
  const std::string w = "system";
  reject_unknown(j, w,
                 {"bandwidth_hz", "n_subcarriers", "sigma_zs2_dbm", "sigma_za2_dbm", "sigma_i2_dbm", "inr_db",
                  "sigma_i2_per_subcarrier_dbm", "p_max_dbm", "p_pg_dbm", "p_c_dbm", "pa_efficiency", "epsilon",
                  "eta", "p_min_req_dbm", "p_min_req_w"});
  read(j, w, "bandwidth_hz", p.bandwidth_total);
  read(j, w, "n_subcarriers", p.n_subcarriers);
  read_dbm(j, w, "sigma_zs2_dbm", p.sigma_zs2);
  read_dbm(j, w, "sigma_za2_dbm", p.sigma_za2);
  if (j.contains("sigma_i2_dbm") && j.contains("inr_db")) {
    throw ConfigError("system: give at most one of 'sigma_i2_dbm' and 'inr_db'");
  }
  read_dbm(j, w, "sigma_i2_dbm", p.sigma_i2);
  if (j.contains("inr_db")) {
    read(j, w, "inr_db", inr_db);
    inr_set = true;
  }
  if (j.contains("sigma_i2_per_subcarrier_dbm")) {
    std::vector<double> dbm;
    read(j, w, "sigma_i2_per_subcarrier_dbm", dbm);
    p.sigma_i2_per_subcarrier.clear();
    for (double v : dbm) p.sigma_i2_per_subcarrier.push_back(dbm_to_watt(v));
  }
  read_dbm(j, w, "p_max_dbm", p.p_max);
  read_dbm(j, w, "p_pg_dbm", p.p_pg);
  read_dbm(j, w, "p_c_dbm", p.p_c);
  if (j.contains("pa_efficiency") && j.contains("epsilon")) {
    throw ConfigError("system: give at most one of 'pa_efficiency' and 'epsilon'");
  }
  if (j.contains("pa_efficiency")) {
    double eff = 0.0;
    read(j, w, "pa_efficiency", eff);
    if (!(eff > 0.0 && eff <= 1.0)) throw ConfigError("system.pa_efficiency must lie in (0, 1]");
    p.epsilon = 1.0 / eff;
  }
  read(j, w, "epsilon", p.epsilon);
  read(j, w, "eta", p.eta);
  if (j.contains("p_min_req_dbm") && j.contains("p_min_req_w")) {
    throw ConfigError("system: give at most one of 'p_min_req_dbm' and 'p_min_req_w'");
  }
  read_dbm(j, w, "p_min_req_dbm", p.p_min_req);
  read(j, w, "p_min_req_w", p.p_min_req);
}

inline void parse_channel(const json& j, ChannelGenConfig& c) {
  const std::string w = "channel";
  reject_unknown(j, w,
                 {"carrier_freq_hz", "distance_m", "rician_k_db", "shadowing_linear", "shadowing_sigma_db",
                  "breakpoint_m", "pathloss_exponent_after_breakpoint"});
  read(j, w, "carrier_freq_hz", c.carrier_freq_hz);
  read(j, w, "distance_m", c.distance_m);
  read(j, w, "rician_k_db", c.rician_k_db);
  read(j, w, "shadowing_linear", c.shadowing_linear);
  read(j, w, "shadowing_sigma_db", c.shadowing_sigma_db);
  read(j, w, "breakpoint_m", c.breakpoint_m);
  read(j, w, "pathloss_exponent_after_breakpoint", c.pathloss_exponent_after_breakpoint);
}

}  // namespace detail

/// Parses a configuration document; missing keys keep the reference defaults.
inline ExperimentConfig parse_config(const nlohmann::json& doc) {
  using detail::read;
  ExperimentConfig cfg = default_experiment();
  detail::reject_unknown(doc, "config", {"system", "channel", "experiment", "optimal", "subopt1"});
  bool inr_set = false;
  double inr_db = 0.0;
  if (doc.contains("system")) detail::parse_system(doc.at("system"), cfg.base, inr_set, inr_db);
  if (inr_set) cfg.base.sigma_i2 = interference_from_inr(cfg.base, inr_db);
  if (doc.contains("channel")) detail::parse_channel(doc.at("channel"), cfg.channel);
  cfg.base.carrier_freq = cfg.channel.carrier_freq_hz;
  cfg.base.distance = cfg.channel.distance_m;
  cfg.base.rician_k = db_to_linear(cfg.channel.rician_k_db);
  if (doc.contains("experiment")) {
    const auto& j = doc.at("experiment");
    const std::string w = "experiment";
    detail::reject_unknown(j, w,
                           {"algorithms", "p_max_sweep_dbm", "inr_db_levels", "trials", "base_seed", "output_path",
                            "threads"});
    if (j.contains("algorithms")) {
      std::vector<std::string> names;
      read(j, w, "algorithms", names);
      cfg.algorithms.clear();
      for (const auto& n : names) {
        try {
          cfg.algorithms.push_back(algorithm_from_string(n));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("experiment.algorithms: ") + e.what());
        }
      }
    }
    read(j, w, "p_max_sweep_dbm", cfg.p_max_sweep_dbm);
    read(j, w, "inr_db_levels", cfg.inr_db_levels);
    read(j, w, "trials", cfg.trials);
    read(j, w, "base_seed", cfg.base_seed);
    read(j, w, "output_path", cfg.output_path);
    read(j, w, "threads", cfg.threads);
  }
  if (doc.contains("optimal")) {
    const auto& j = doc.at("optimal");
    detail::reject_unknown(j, "optimal", {"rho_grid_points", "refine"});
    read(j, "optimal", "rho_grid_points", cfg.optimal.rho_grid_points);
    read(j, "optimal", "refine", cfg.optimal.refine);
  }
  if (doc.contains("subopt1")) {
    const auto& j = doc.at("subopt1");
    detail::reject_unknown(j, "subopt1", {"n_max", "delta_bps"});
    read(j, "subopt1", "n_max", cfg.subopt1.n_max);
    read(j, "subopt1", "delta_bps", cfg.subopt1.delta);
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

/// One (trial, P_max, INR, algorithm) outcome.
struct TrialOutcome {
  double capacity_bps = 0.0;
  double rho = 0.0;
  double harvested = 0.0;
  bool feasible = false;
  bool converged = true;
  int iterations = 0;
};

/// Per-trial outcomes indexed [trial][p_max][inr][algorithm].
struct TrialTable {
  std::size_t trials = 0, n_pmax = 0, n_inr = 0, n_alg = 0;
  std::vector<TrialOutcome> cells;

  TrialOutcome& at(std::size_t t, std::size_t p, std::size_t i, std::size_t a) {
    return cells[((t * n_pmax + p) * n_inr + i) * n_alg + a];
  }
  const TrialOutcome& at(std::size_t t, std::size_t p, std::size_t i, std::size_t a) const {
    return cells[((t * n_pmax + p) * n_inr + i) * n_alg + a];
  }
};

/// Scenario parameters for one sweep cell.
inline SystemParams params_for(const ExperimentConfig& cfg, double p_max_dbm, double inr_db) {
  SystemParams p = cfg.base;
  p.p_max = dbm_to_watt(p_max_dbm);
  p.sigma_i2 = interference_from_inr(p, inr_db);
  return p;
}

/// Every algorithm, P_max and INR sees the same realization for a given trial index.
inline TrialTable run_trials(const ExperimentConfig& cfg) {
  cfg.validate();
  TrialTable table;
  table.trials = cfg.trials;
  table.n_pmax = cfg.p_max_sweep_dbm.size();
  table.n_inr = cfg.inr_db_levels.size();
  table.n_alg = cfg.algorithms.size();
  table.cells.resize(table.trials * table.n_pmax * table.n_inr * table.n_alg);
  parallel_for(cfg.trials, worker_count(cfg.threads), [&](std::size_t t) {
    const ChannelRealization channel = generate_channel(cfg.base, cfg.channel, cfg.base_seed + t);
    for (std::size_t p = 0; p < table.n_pmax; ++p) {
      for (std::size_t i = 0; i < table.n_inr; ++i) {
        const SystemParams params = params_for(cfg, cfg.p_max_sweep_dbm[p], cfg.inr_db_levels[i]);
        for (std::size_t a = 0; a < table.n_alg; ++a) {
          const SolveResult r = solve(cfg.algorithms[a], channel, params, cfg.optimal, cfg.subopt1);
          TrialOutcome& o = table.at(t, p, i, a);
          o.feasible = r.feasible;
          o.capacity_bps = r.feasible ? r.capacity_bps : 0.0;
          o.rho = r.policy.rho;
          o.harvested = r.harvested;
          o.iterations = r.iterations;
          const auto conv = r.residuals.find("converged");
          o.converged = conv == r.residuals.end() || conv->second > 0.5;
        }
      }
    }
  });
  return table;
}

struct SweepPoint {
  double p_max_dbm = 0.0;
  double inr_db = 0.0;
  Algorithm algorithm = Algorithm::optimal;
  double mean_spectral_efficiency = 0.0;
  double mean_rho = 0.0;          // over feasible trials; NaN if none
  double mean_harvested_dbm = 0.0;  // mean harvested W over feasible trials, in dBm; NaN if none
  double infeasible_fraction = 0.0;
  std::size_t trials = 0;
};

/// Infeasible trials count as zero capacity but are left out of the rho and harvest means.
inline std::vector<SweepPoint> aggregate(const ExperimentConfig& cfg, const TrialTable& table) {
  std::vector<SweepPoint> points;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t p = 0; p < table.n_pmax; ++p) {
    for (std::size_t i = 0; i < table.n_inr; ++i) {
      for (std::size_t a = 0; a < table.n_alg; ++a) {
        double se = 0.0, rho = 0.0, harvest = 0.0;
        std::size_t feasible = 0;
        for (std::size_t t = 0; t < table.trials; ++t) {
          const TrialOutcome& o = table.at(t, p, i, a);
          se += o.capacity_bps / cfg.base.bandwidth_total;
          if (o.feasible) {
            ++feasible;
            rho += o.rho;
            harvest += o.harvested;
          }
        }
        SweepPoint sp;
        sp.p_max_dbm = cfg.p_max_sweep_dbm[p];
        sp.inr_db = cfg.inr_db_levels[i];
        sp.algorithm = cfg.algorithms[a];
        sp.trials = table.trials;
        sp.mean_spectral_efficiency = se / static_cast<double>(table.trials);
        sp.infeasible_fraction = static_cast<double>(table.trials - feasible) / static_cast<double>(table.trials);
        sp.mean_rho = feasible ? rho / static_cast<double>(feasible) : nan;
        sp.mean_harvested_dbm =
            feasible && harvest > 0.0 ? watt_to_dbm(harvest / static_cast<double>(feasible)) : nan;
        points.push_back(sp);
      }
    }
  }
  return points;
}

inline std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg) { return aggregate(cfg, run_trials(cfg)); }

inline constexpr const char* kCsvHeader =
    "p_max_dbm,inr_db,algorithm,mean_spectral_efficiency,mean_rho,mean_harvested_dbm,infeasible_fraction,trials";

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string csv_row(const SweepPoint& sp) {
  std::ostringstream os;
  os << format_number(sp.p_max_dbm) << ',' << format_number(sp.inr_db) << ',' << to_string(sp.algorithm) << ','
     << format_number(sp.mean_spectral_efficiency) << ',' << format_number(sp.mean_rho) << ','
     << format_number(sp.mean_harvested_dbm) << ',' << format_number(sp.infeasible_fraction) << ',' << sp.trials;
  return os.str();
}

inline void emit_csv(const std::vector<SweepPoint>& points, const std::filesystem::path& path) {
  if (points.empty()) throw std::invalid_argument("emit_csv: no sweep points to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path.string() + "' for writing");
  out << kCsvHeader << '\n';
  for (const auto& sp : points) out << csv_row(sp) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write to '" + path.string() + "' failed");
}

/// Scenario description written next to every CSV: the channel-model
/// assumptions and the averaging rules that the CSV columns rely on.
inline nlohmann::json provenance(const ExperimentConfig& cfg) {
  nlohmann::json j;
  const ChannelGenConfig& c = cfg.channel;
  j["channel_model"] = {
      {"path_loss", "free space to breakpoint, then exponent"},
      {"breakpoint_m", c.breakpoint_m},
      {"pathloss_exponent_after_breakpoint", c.pathloss_exponent_after_breakpoint},
      {"carrier_freq_hz", c.carrier_freq_hz},
      {"distance_m", c.distance_m},
      {"path_loss_db", tgn_path_loss_db(c.carrier_freq_hz, c.distance_m, c)},
      {"fading", "Rician, independent across subcarriers, unit mean power"},
      {"rician_k_db", c.rician_k_db},
      {"shadowing_linear", c.shadowing_linear},
      {"shadowing_sigma_db", c.shadowing_sigma_db}};
  j["averaging"] = {
      {"capacity", "infeasible trials contribute zero capacity"},
      {"rho_and_harvest", "means over feasible trials only; NaN when no trial is feasible"},
      {"mean_harvested_dbm", "dBm of the mean harvested power in W"}};
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["seed_rule"] = "trial t uses seed base_seed + t for every algorithm, P_max and INR";
  j["effective_budget_w"] = effective_power_budget(cfg.base);
  j["p_min_req_w"] = cfg.base.p_min_req;
  j["optimal_rho_grid_points"] = cfg.optimal.rho_grid_points;
  j["subopt1"] = {{"n_max", cfg.subopt1.n_max}, {"delta_bps", cfg.subopt1.delta}};
  return j;
}

}  // namespace swipt
