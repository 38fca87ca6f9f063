// Command-line front end: sweeps, single solves, config checks and oracle cross-checks.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "swipt/crosscheck.hpp"
#include "swipt/harness.hpp"
#include "swipt/serialize.hpp"

namespace {

constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

int run_sweep_cmd(const std::string& config_path, const std::string& output_override) {
  swipt::ExperimentConfig cfg = swipt::load_config(config_path);
  if (!output_override.empty()) cfg.output_path = output_override;
  const auto points = swipt::run_sweep(cfg);
  swipt::emit_csv(points, cfg.output_path);
  const std::string side = cfg.output_path + ".provenance.json";
  std::ofstream out(side);
  if (!out) throw std::runtime_error("cannot write '" + side + "'");
  out << swipt::provenance(cfg).dump(2) << '\n';
  std::cerr << "wrote " << points.size() << " rows to " << cfg.output_path << '\n';
  return 0;
}

int run_solve_cmd(const std::string& config_path, std::uint64_t seed, const std::string& algorithm,
                  bool include_channel) {
  const swipt::ExperimentConfig cfg = swipt::load_config(config_path);
  const swipt::Algorithm alg = swipt::algorithm_from_string(algorithm);
  const swipt::ChannelRealization channel = swipt::generate_channel(cfg.base, cfg.channel, seed);
  const swipt::SolveResult r = swipt::solve(alg, channel, cfg.base, cfg.optimal, cfg.subopt1);
  nlohmann::json j = r;
  j["algorithm"] = swipt::to_string(alg);
  j["seed"] = seed;
  if (include_channel) j["channel"] = channel;
  std::cout << j.dump(2) << '\n';
  return r.feasible ? 0 : kExitInfeasible;
}

int run_validate_cmd(const std::string& config_path) {
  const swipt::ExperimentConfig cfg = swipt::load_config(config_path);
  const auto& p = cfg.base;
  nlohmann::json j;
  j["effective_budget_w"] = swipt::effective_power_budget(p);
  j["subcarrier_bandwidth_hz"] = p.subcarrier_bandwidth();
  j["sigma_zs2_w"] = p.sigma_zs2;
  j["sigma_za2_w"] = p.sigma_za2;
  j["sigma_i2_w"] = p.sigma_i2;
  j["p_min_req_w"] = p.p_min_req;
  j["path_loss_db"] = swipt::tgn_path_loss_db(cfg.channel.carrier_freq_hz, cfg.channel.distance_m, cfg.channel);
  j["path_loss_linear"] = swipt::tgn_path_loss(cfg.channel.carrier_freq_hz, cfg.channel.distance_m, cfg.channel);
  j["p_max_sweep_dbm"] = cfg.p_max_sweep_dbm;
  j["inr_db_levels"] = cfg.inr_db_levels;
  j["trials"] = cfg.trials;
  std::vector<std::string> algs;
  for (auto a : cfg.algorithms) algs.push_back(swipt::to_string(a));
  j["algorithms"] = algs;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_oracle_cmd(std::size_t n, std::size_t instances, std::uint64_t seed) {
  const auto ocfg = swipt::oracle_config_for(n);
  std::size_t failures = 0;
  for (std::size_t k = 0; k < instances; ++k) {
    const auto inst = swipt::random_small_instance(n, seed + k, k % 2 == 1);
    const auto c = swipt::cross_check(inst, ocfg);
    std::printf("%zu solver=%.9g oracle=%.9g rel=%+.3e rho=%.4f/%.4f %s\n", k, c.solver_capacity,
                c.oracle_capacity, c.relative_difference, c.solver_rho, c.oracle_rho, c.pass ? "ok" : "MISMATCH");
    if (!c.pass) ++failures;
  }
  std::printf("%zu/%zu instances agree\n", instances - failures, instances);
  return failures == 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SWIPT OFDM resource allocation"};
  app.require_subcommand(1);

  std::string config_path, output, algorithm = "optimal";
  std::uint64_t seed = 1;
  bool with_channel = false;
  std::size_t subcarriers = 2, instances = 20;

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
  sweep->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--output", output, "CSV path (overrides experiment.output_path)");

  auto* solve = app.add_subcommand("solve", "Solve one channel realization, JSON to stdout");
  solve->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  solve->add_option("--seed", seed, "channel seed");
  solve->add_option("--algorithm", algorithm, "optimal | subopt1 | subopt2")
      ->check(CLI::IsMember({"optimal", "subopt1", "subopt2"}));
  solve->add_flag("--with-channel", with_channel, "include the channel realization in the output");

  auto* validate = app.add_subcommand("validate", "Parse a config and print derived quantities");
  validate->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle-check", "Compare the optimal solver with brute force");
  oracle->add_option("--subcarriers", subcarriers, "subcarriers per instance (1..4)")->check(CLI::Range(1, 4));
  oracle->add_option("--instances", instances, "number of random instances");
  oracle->add_option("--seed", seed, "first instance seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sweep) return run_sweep_cmd(config_path, output);
    if (*solve) return run_solve_cmd(config_path, seed, algorithm, with_channel);
    if (*validate) return run_validate_cmd(config_path);
    if (*oracle) return run_oracle_cmd(subcarriers, instances, seed);
  } catch (const swipt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
