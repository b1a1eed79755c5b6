#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "vppsim/errors.hpp"
#include "vppsim/grid_model.hpp"

// Grid description files (*.grid) are JSON with this layout:
//
//   {
//     "schema_version": 1,
//     "name": "five_bus",
//     "base_mva": 100.0,
//     "slack_bus": 4,
//     "buses":      [{"id":1, "area":1, "load_mw":60.0,
//                     "renewable_mw":0.0,            // optional, default 0
//                     "load_profile":[[t_s, mw],...] // optional step series
//                    }, ...],
//     "lines":      [{"from":1, "to":2, "susceptance_pu":12.0,
//                     "flow_limit_mw":200.0}, ...],
//     "generators": [{"id":"G1", "bus":1, "p_min_mw":20.0, "p_max_mw":120.0,
//                     "ramp_mw_per_min":10.0, "droop_pct":0.05,
//                     "inertia_h_s":4.0, "deviation_cost":1.0,
//                     "agc_participation":0.0}, ...],
//     "vpps":       [{"id":"BAT1", "bus":3, "kind":"bulk_battery",
//                     "p_ch_max_mw":45.0, "p_dis_max_mw":45.0,
//                     "ramp_ch_mw_per_min":5.0, "ramp_dis_mw_per_min":5.0,
//                     "s_min_mwh":0.0, "s_max_mwh":45.0,
//                     "eta_ch":0.9, "eta_dis":0.9, "s0_mwh":22.5}, ...]
//   }
//
// Loads are gross consumption; renewable_mw is a scripted constant injection
// netted off at the bus. Every numeric field is MW/MWh on the wire.

namespace vppsim {

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& path) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(path + "." + key + ": missing or not a number");
  return j[key].get<double>();
}

inline double optional_number(const nlohmann::json& j, const std::string& key,
                              double fallback) {
  return (j.contains(key) && j[key].is_number()) ? j[key].get<double>() : fallback;
}

inline int require_int(const nlohmann::json& j, const std::string& key,
                       const std::string& path) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ConfigError(path + "." + key + ": missing or not an integer");
  return j[key].get<int>();
}

inline std::string require_string(const nlohmann::json& j, const std::string& key,
                                  const std::string& path) {
  if (!j.contains(key) || !j[key].is_string())
    throw ConfigError(path + "." + key + ": missing or not a string");
  return j[key].get<std::string>();
}

}  // namespace detail

inline GridModel parse_grid(const nlohmann::json& j) {
  using detail::optional_number;
  using detail::require_int;
  using detail::require_number;
  using detail::require_string;

  GridModel m;
  if (detail::optional_number(j, "schema_version", 1) != 1)
    throw ConfigError("grid.schema_version: unsupported version");
  if (j.contains("name")) m.name = j["name"].get<std::string>();
  m.base_mva = optional_number(j, "base_mva", 100.0);
  m.slack_bus = require_int(j, "slack_bus", "grid");

  if (!j.contains("buses") || !j["buses"].is_array())
    throw ConfigError("grid.buses: missing array");
  for (std::size_t i = 0; i < j["buses"].size(); ++i) {
    const auto& bj = j["buses"][i];
    const std::string p = "grid.buses[" + std::to_string(i) + "]";
    Bus b;
    b.id = require_int(bj, "id", p);
    b.area = require_int(bj, "area", p);
    b.load_forecast.set_base(require_number(bj, "load_mw", p));
    b.renewable_mw = optional_number(bj, "renewable_mw", 0.0);
    if (bj.contains("load_profile")) {
      if (!bj["load_profile"].is_array())
        throw ConfigError(p + ".load_profile: must be an array of [t_s, mw]");
      for (const auto& pt : bj["load_profile"]) {
        if (!pt.is_array() || pt.size() != 2)
          throw ConfigError(p + ".load_profile: entries must be [t_s, mw]");
        b.load_forecast.add_point(pt[0].get<double>(), pt[1].get<double>());
      }
    }
    m.buses.push_back(std::move(b));
  }

  if (!j.contains("lines") || !j["lines"].is_array())
    throw ConfigError("grid.lines: missing array");
  for (std::size_t i = 0; i < j["lines"].size(); ++i) {
    const auto& lj = j["lines"][i];
    const std::string p = "grid.lines[" + std::to_string(i) + "]";
    Line ln;
    ln.from_bus = require_int(lj, "from", p);
    ln.to_bus = require_int(lj, "to", p);
    ln.susceptance_pu = require_number(lj, "susceptance_pu", p);
    ln.flow_limit_mw = require_number(lj, "flow_limit_mw", p);
    m.lines.push_back(ln);
  }

  for (std::size_t i = 0; j.contains("generators") && i < j["generators"].size(); ++i) {
    const auto& gj = j["generators"][i];
    const std::string p = "grid.generators[" + std::to_string(i) + "]";
    Generator g;
    g.id = require_string(gj, "id", p);
    g.bus = require_int(gj, "bus", p);
    g.p_min_mw = require_number(gj, "p_min_mw", p);
    g.p_max_mw = require_number(gj, "p_max_mw", p);
    g.ramp_mw_per_min = require_number(gj, "ramp_mw_per_min", p);
    g.droop_pct = optional_number(gj, "droop_pct", 0.05);
    g.inertia_h_s = optional_number(gj, "inertia_h_s", 4.0);
    g.deviation_cost = optional_number(gj, "deviation_cost", 1.0);
    g.agc_participation = optional_number(gj, "agc_participation", 0.0);
    m.generators.push_back(std::move(g));
  }

  for (std::size_t i = 0; j.contains("vpps") && i < j["vpps"].size(); ++i) {
    const auto& vj = j["vpps"][i];
    const std::string p = "grid.vpps[" + std::to_string(i) + "]";
    VppAsset v;
    v.id = require_string(vj, "id", p);
    v.bus = require_int(vj, "bus", p);
    const std::string kind = require_string(vj, "kind", p);
    if (kind == "bulk_battery") v.kind = VppKind::bulk_battery;
    else if (kind == "pem_fleet") v.kind = VppKind::pem_fleet;
    else throw ConfigError(p + ".kind: must be bulk_battery or pem_fleet");
    v.p_ch_max_mw = require_number(vj, "p_ch_max_mw", p);
    v.p_dis_max_mw = require_number(vj, "p_dis_max_mw", p);
    v.ramp_ch_mw_per_min = require_number(vj, "ramp_ch_mw_per_min", p);
    v.ramp_dis_mw_per_min = require_number(vj, "ramp_dis_mw_per_min", p);
    v.s_min_mwh = require_number(vj, "s_min_mwh", p);
    v.s_max_mwh = require_number(vj, "s_max_mwh", p);
    v.eta_ch = optional_number(vj, "eta_ch", 1.0);
    v.eta_dis = optional_number(vj, "eta_dis", 1.0);
    v.s0_mwh = require_number(vj, "s0_mwh", p);
    m.vpps.push_back(std::move(v));
  }

  m.validate();
  return m;
}

inline GridModel load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("grid file " + path + ": " + e.what());
  }
  return parse_grid(j);
}

}  // namespace vppsim
