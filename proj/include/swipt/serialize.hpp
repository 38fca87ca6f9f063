#pragma once

// JSON documents for replaying channel realizations and reporting solves.

#include <cmath>
#include <json.hpp>

#include "swipt/model.hpp"
#include "swipt/units.hpp"

namespace swipt {

inline void to_json(nlohmann::json& j, const ChannelRealization& ch) {
  j = nlohmann::json{{"seed", ch.seed},
                     {"fading_power", ch.fading_power},
                     {"path_loss", ch.path_loss},
                     {"shadowing", ch.shadowing}};
}

inline void from_json(const nlohmann::json& j, ChannelRealization& ch) {
  j.at("seed").get_to(ch.seed);
  j.at("fading_power").get_to(ch.fading_power);
  j.at("path_loss").get_to(ch.path_loss);
  j.at("shadowing").get_to(ch.shadowing);
  ch.validate();
}

inline void to_json(nlohmann::json& j, const AllocationPolicy& p) {
  j = nlohmann::json{{"rho", p.rho}, {"powers_w", p.powers}};
}

inline void from_json(const nlohmann::json& j, AllocationPolicy& p) {
  j.at("rho").get_to(p.rho);
  j.at("powers_w").get_to(p.powers);
}

inline void to_json(nlohmann::json& j, const SolveResult& r) {
  j = nlohmann::json{{"feasible", r.feasible},
                     {"capacity_bps", r.capacity_bps},
                     {"spectral_efficiency", r.spectral_efficiency},
                     {"harvested_w", r.harvested},
                     {"policy", r.policy},
                     {"iterations", r.iterations},
                     {"duals", r.duals},
                     {"residuals", r.residuals}};
  if (!r.objective_trace.empty()) j["objective_trace"] = r.objective_trace;
}

inline void from_json(const nlohmann::json& j, SolveResult& r) {
  j.at("feasible").get_to(r.feasible);
  j.at("capacity_bps").get_to(r.capacity_bps);
  j.at("spectral_efficiency").get_to(r.spectral_efficiency);
  j.at("harvested_w").get_to(r.harvested);
  j.at("policy").get_to(r.policy);
  j.at("iterations").get_to(r.iterations);
  j.at("duals").get_to(r.duals);
  j.at("residuals").get_to(r.residuals);
  if (j.contains("objective_trace")) j.at("objective_trace").get_to(r.objective_trace);
}

}  // namespace swipt
