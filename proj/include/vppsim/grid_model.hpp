#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vppsim/errors.hpp"

namespace vppsim {

/// Piecewise-constant time series in MW. An empty series evaluates to the
/// base value; otherwise the value holds from each breakpoint onward.
class LoadSeries {
 public:
  LoadSeries() = default;
  explicit LoadSeries(double constant_mw) : base_mw_(constant_mw) {}

  void set_base(double mw) { base_mw_ = mw; }
  void add_point(double t_s, double mw) { points_.emplace_back(t_s, mw); }

  double base() const { return base_mw_; }
  bool has_profile() const { return !points_.empty(); }

  double value(double t_s) const {
    double v = base_mw_;
    for (const auto& [pt, pv] : points_) {
      if (pt <= t_s) v = pv;
    }
    return v;
  }

  void validate_sorted(const std::string& path) const {
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (points_[i].first < points_[i - 1].first)
        throw ConfigError(path + ": profile breakpoints must be time-ordered");
    }
  }

 private:
  double base_mw_ = 0.0;
  std::vector<std::pair<double, double>> points_;
};

struct Bus {
  int id = 0;
  int area = 1;  // 1 = internal control area, 2 = external system
  LoadSeries load_forecast;  // gross consumption, MW
  double renewable_mw = 0.0;  // scripted constant renewable injection, MW

  /// Net scheduled consumption at this bus (load minus renewables).
  double net_load_mw(double t_s) const {
    return load_forecast.value(t_s) - renewable_mw;
  }
};

struct Line {
  int from_bus = 0;
  int to_bus = 0;
  double susceptance_pu = 0.0;  // b_ij on the system MVA base
  double flow_limit_mw = 0.0;   // thermal carrying capacity, each direction
};

struct Generator {
  std::string id;
  int bus = 0;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  double ramp_mw_per_min = 0.0;
  double droop_pct = 0.05;     // per-unit speed droop on the p_max base
  double inertia_h_s = 4.0;    // inertia constant on the p_max base
  double deviation_cost = 1.0; // $/MW^2 deviation from scheduled set-point
  double agc_participation = 0.0;

  /// Stored kinetic-energy scale 2*H*S, MW*s. The machine base is p_max.
  double inertia_mws() const { return 2.0 * inertia_h_s * p_max_mw; }

  /// Primary-response gain: MW of output per per-unit frequency drop.
  double droop_gain_mw() const { return p_max_mw / droop_pct; }
};

enum class VppKind { bulk_battery, pem_fleet };

struct VppAsset {
  std::string id;
  int bus = 0;
  VppKind kind = VppKind::bulk_battery;
  double p_ch_max_mw = 0.0;
  double p_dis_max_mw = 0.0;
  double ramp_ch_mw_per_min = 0.0;
  double ramp_dis_mw_per_min = 0.0;
  double s_min_mwh = 0.0;
  double s_max_mwh = 0.0;
  double eta_ch = 1.0;
  double eta_dis = 1.0;
  double s0_mwh = 0.0;
};

/// Static transmission-grid description: topology plus the resources that
/// inject or consume at its buses. Immutable during a simulation; all
/// operations over it are pure functions.
struct GridModel {
  std::string name;
  double base_mva = 100.0;
  int slack_bus = 0;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<VppAsset> vpps;

  std::size_t bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
      if (buses[i].id == bus_id) return i;
    throw ConfigError("unknown bus id " + std::to_string(bus_id));
  }

  const Generator& generator(const std::string& gid) const {
    for (const auto& g : generators)
      if (g.id == gid) return g;
    throw ConfigError("unknown generator id " + gid);
  }

  const VppAsset& vpp(const std::string& vid) const {
    for (const auto& v : vpps)
      if (v.id == vid) return v;
    throw ConfigError("unknown vpp id " + vid);
  }

  bool has_resource(const std::string& rid) const {
    for (const auto& g : generators)
      if (g.id == rid) return true;
    for (const auto& v : vpps)
      if (v.id == rid) return true;
    return false;
  }

  std::vector<int> areas() const {
    std::vector<int> out;
    for (const auto& b : buses)
      if (std::find(out.begin(), out.end(), b.area) == out.end())
        out.push_back(b.area);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool connected() const {
    if (buses.empty()) return false;
    std::vector<bool> seen(buses.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      for (const auto& ln : lines) {
        std::size_t a = bus_index(ln.from_bus);
        std::size_t b = bus_index(ln.to_bus);
        if (a == i && !seen[b]) { seen[b] = true; stack.push_back(b); }
        if (b == i && !seen[a]) { seen[a] = true; stack.push_back(a); }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  }

  /// Checks every structural invariant; throws ConfigError naming the
  /// offending element.
  void validate() const {
    if (buses.empty()) throw ConfigError("grid: needs at least one bus");
    if (base_mva <= 0.0) throw ConfigError("grid.base_mva: must be positive");
    for (std::size_t i = 0; i < buses.size(); ++i) {
      for (std::size_t j = i + 1; j < buses.size(); ++j)
        if (buses[i].id == buses[j].id)
          throw ConfigError("grid.buses: duplicate id " + std::to_string(buses[i].id));
      buses[i].load_forecast.validate_sorted(
          "grid.buses[" + std::to_string(i) + "].load_profile");
    }
    bool slack_found = false;
    for (const auto& b : buses) slack_found |= (b.id == slack_bus);
    if (!slack_found)
      throw ConfigError("grid.slack_bus: id " + std::to_string(slack_bus) +
                        " is not a bus");
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto& ln = lines[i];
      const std::string p = "grid.lines[" + std::to_string(i) + "]";
      if (ln.from_bus == ln.to_bus) throw ConfigError(p + ": from == to");
      bus_index(ln.from_bus);
      bus_index(ln.to_bus);
      if (!(ln.susceptance_pu > 0.0)) throw ConfigError(p + ".susceptance_pu: must be > 0");
      if (!(ln.flow_limit_mw > 0.0)) throw ConfigError(p + ".flow_limit_mw: must be > 0");
    }
    for (std::size_t i = 0; i < generators.size(); ++i) {
      const auto& g = generators[i];
      const std::string p = "grid.generators[" + std::to_string(i) + "]";
      bus_index(g.bus);
      if (g.p_min_mw > g.p_max_mw) throw ConfigError(p + ": p_min_mw > p_max_mw");
      if (!(g.ramp_mw_per_min > 0.0)) throw ConfigError(p + ".ramp_mw_per_min: must be > 0");
      if (!(g.droop_pct > 0.0)) throw ConfigError(p + ".droop_pct: must be > 0");
      if (!(g.inertia_h_s > 0.0)) throw ConfigError(p + ".inertia_h_s: must be > 0");
      if (g.deviation_cost < 0.0) throw ConfigError(p + ".deviation_cost: must be >= 0");
      if (g.agc_participation < 0.0 || g.agc_participation > 1.0)
        throw ConfigError(p + ".agc_participation: must be in [0,1]");
      for (std::size_t j = i + 1; j < generators.size(); ++j)
        if (generators[j].id == g.id)
          throw ConfigError(p + ": duplicate generator id " + g.id);
    }
    for (std::size_t i = 0; i < vpps.size(); ++i) {
      const auto& v = vpps[i];
      const std::string p = "grid.vpps[" + std::to_string(i) + "]";
      bus_index(v.bus);
      if (!(v.s_min_mwh >= 0.0) || !(v.s_min_mwh < v.s_max_mwh))
        throw ConfigError(p + ": requires 0 <= s_min_mwh < s_max_mwh");
      if (v.s0_mwh < v.s_min_mwh || v.s0_mwh > v.s_max_mwh)
        throw ConfigError(p + ".s0_mwh: outside [s_min, s_max]");
      if (!(v.eta_ch > 0.0 && v.eta_ch <= 1.0))
        throw ConfigError(p + ".eta_ch: must be in (0,1]");
      if (!(v.eta_dis > 0.0 && v.eta_dis <= 1.0))
        throw ConfigError(p + ".eta_dis: must be in (0,1]");
      if (v.p_ch_max_mw < 0.0 || v.p_dis_max_mw < 0.0)
        throw ConfigError(p + ": power limits must be >= 0");
      for (std::size_t j = i + 1; j < vpps.size(); ++j)
        if (vpps[j].id == v.id) throw ConfigError(p + ": duplicate vpp id " + v.id);
      for (const auto& g : generators)
        if (g.id == v.id) throw ConfigError(p + ": id collides with generator " + v.id);
    }
    if (!connected()) throw ConfigError("grid: network graph is disconnected");
  }
};

}  // namespace vppsim
