#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vppsim/errors.hpp"
#include "vppsim/grid_model.hpp"
#include "vppsim/pem_fleet.hpp"

namespace vppsim {

/// Aggregate view of one VPP asset. Power is consumption-positive: a
/// charging battery or packet fleet shows p_actual_mw > 0, injection into
/// the grid shows negative.
struct VppState {
  std::string asset_id;
  double p_actual_mw = 0.0;
  double p_ref_mw = 0.0;
  double soc_mwh = 0.0;
  FleetModeCounts mode_counts;
};

struct GrantDecision {
  PacketRequest request;
  bool accepted = false;
  double decision_time_s = 0.0;
};

/// Per-request lookup data the aggregator keeps in its device registry.
struct RequestMeta {
  double power_mw = 0.0;       // rated packet power while active
  double energy_mwh = 0.0;     // stored-energy change of one full packet
};

// --- versioned request/grant wire records -------------------------------
//
// The in-process exchange uses these records so a socket transport could
// replace it without touching policy code. Schema v1:
//   request: {"v":1,"type":"request","device":N,"kind":"charge|discharge",
//             "t_s":T}
//   grant:   {"v":1,"type":"grant","device":N,"kind":...,"accepted":B,
//             "t_s":T}

inline constexpr int kMessageSchemaVersion = 1;

inline nlohmann::json to_json(const PacketRequest& r) {
  return {{"v", kMessageSchemaVersion},
          {"type", "request"},
          {"device", r.device},
          {"kind", r.kind == PacketKind::charge ? "charge" : "discharge"},
          {"t_s", r.timestamp_s}};
}

inline PacketRequest request_from_json(const nlohmann::json& j) {
  if (!j.contains("v") || j["v"].get<int>() != kMessageSchemaVersion)
    throw ConfigError("request record: unsupported schema version");
  if (j.value("type", "") != "request")
    throw ConfigError("request record: wrong type tag");
  PacketRequest r;
  r.device = j.at("device").get<std::size_t>();
  r.kind = j.at("kind").get<std::string>() == "discharge" ? PacketKind::discharge
                                                          : PacketKind::charge;
  r.timestamp_s = j.at("t_s").get<double>();
  return r;
}

inline nlohmann::json to_json(const GrantDecision& g) {
  return {{"v", kMessageSchemaVersion},
          {"type", "grant"},
          {"device", g.request.device},
          {"kind", g.request.kind == PacketKind::charge ? "charge" : "discharge"},
          {"accepted", g.accepted},
          {"t_s", g.decision_time_s}};
}

inline GrantDecision grant_from_json(const nlohmann::json& j) {
  if (!j.contains("v") || j["v"].get<int>() != kMessageSchemaVersion)
    throw ConfigError("grant record: unsupported schema version");
  if (j.value("type", "") != "grant")
    throw ConfigError("grant record: wrong type tag");
  GrantDecision g;
  g.request.device = j.at("device").get<std::size_t>();
  g.request.kind = j.at("kind").get<std::string>() == "discharge"
                       ? PacketKind::discharge
                       : PacketKind::charge;
  g.accepted = j.at("accepted").get<bool>();
  g.decision_time_s = j.at("t_s").get<double>();
  g.request.timestamp_s = g.decision_time_s;
  return g;
}

// -------------------------------------------------------------------------

/// Arrival-order admission against the tracking band. Charge requests are
/// accepted while the running commitment stays within p_ref + deadband and
/// the projected stored energy stays under s_max; discharge requests mirror
/// against the band's lower edge and s_min. Every request gets exactly one
/// decision.
inline std::vector<GrantDecision> decide_requests(
    const VppState& state, const std::vector<PacketRequest>& requests,
    const std::map<std::size_t, RequestMeta>& registry, const VppAsset& asset,
    double now_s, double deadband_mw) {
  std::vector<GrantDecision> out;
  out.reserve(requests.size());
  double committed_mw = state.p_actual_mw;
  double projected_mwh = state.soc_mwh;
  for (const auto& rq : requests) {
    auto it = registry.find(rq.device);
    if (it == registry.end())
      throw ConfigError("decide_requests: device " + std::to_string(rq.device) +
                        " not in registry");
    const RequestMeta& meta = it->second;
    bool accept;
    if (rq.kind == PacketKind::charge) {
      accept = committed_mw + meta.power_mw <= state.p_ref_mw + deadband_mw &&
               projected_mwh + meta.energy_mwh <= asset.s_max_mwh;
      if (accept) {
        committed_mw += meta.power_mw;
        projected_mwh += meta.energy_mwh;
      }
    } else {
      accept = committed_mw - meta.power_mw >= state.p_ref_mw - deadband_mw &&
               projected_mwh - meta.energy_mwh >= asset.s_min_mwh;
      if (accept) {
        committed_mw -= meta.power_mw;
        projected_mwh -= meta.energy_mwh;
      }
    }
    out.push_back({rq, accept, now_s});
  }
  return out;
}

/// One step of the bulk battery plant. p_actual slews toward the reference
/// at the asset ramp rates and respects the power box; at an energy bound
/// the power in the saturating direction drops to zero immediately (the
/// storage simply cannot take or give more). Stored energy follows
///   S' = S + dt * (eta_ch * P_ch - P_dis / eta_dis)
/// with dt in hours.
inline VppState step_bulk_battery(const VppState& state, double p_ref_mw,
                                  double dt_s, const VppAsset& asset) {
  if (!(dt_s > 0.0)) throw ConfigError("step_bulk_battery: dt must be > 0");
  VppState next = state;
  next.p_ref_mw = p_ref_mw;

  const double target =
      std::clamp(p_ref_mw, -asset.p_dis_max_mw, asset.p_ch_max_mw);
  const double up = asset.ramp_ch_mw_per_min / 60.0 * dt_s;
  const double down = asset.ramp_dis_mw_per_min / 60.0 * dt_s;
  double p = state.p_actual_mw;
  if (target > p)
    p = std::min(p + up, target);
  else
    p = std::max(p - down, target);

  if (state.soc_mwh >= asset.s_max_mwh) p = std::min(p, 0.0);
  if (state.soc_mwh <= asset.s_min_mwh) p = std::max(p, 0.0);

  const double p_ch = std::max(p, 0.0);
  const double p_dis = std::max(-p, 0.0);
  next.p_actual_mw = p;
  next.soc_mwh = state.soc_mwh +
                 dt_s / 3600.0 * (asset.eta_ch * p_ch - p_dis / asset.eta_dis);
  return next;
}

/// Upward report: aggregate power and normalized state of charge. This pair
/// is all a dispatcher ever needs from a VPP.
inline std::pair<double, double> report(const VppState& state, const VppAsset& asset) {
  const double frac =
      (state.soc_mwh - asset.s_min_mwh) / (asset.s_max_mwh - asset.s_min_mwh);
  return {state.p_actual_mw, frac};
}

}  // namespace vppsim
