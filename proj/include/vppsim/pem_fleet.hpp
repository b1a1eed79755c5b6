#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vppsim/errors.hpp"
#include "vppsim/rng.hpp"

namespace vppsim {

enum class DeviceKind { tcl, ess };
enum class DeviceMode { CHARGE, DISCHARGE, OFF, OPT_OUT };
enum class PacketKind { charge, discharge };

inline const char* to_string(DeviceMode m) {
  switch (m) {
    case DeviceMode::CHARGE: return "CHARGE";
    case DeviceMode::DISCHARGE: return "DISCHARGE";
    case DeviceMode::OFF: return "OFF";
    case DeviceMode::OPT_OUT: return "OPT_OUT";
  }
  return "?";
}

/// First-order thermal parameters for a TCL (electric water heater style:
/// charging means heating). x is a temperature in degC.
struct TclParams {
  double capacitance_kwh_per_c = 0.35;
  double resistance_c_per_kw = 375.0;
  double ambient_c = 20.0;
  double eta = 1.0;
};

/// Small stationary battery. x is stored energy in kWh.
struct EssParams {
  double eta_ch = 1.0;
  double eta_dis = 1.0;
};

struct PemDeviceConfig {
  DeviceKind kind = DeviceKind::tcl;
  double rated_power_kw = 4.5;
  double packet_len_charge_s = 300.0;    // delta_c
  double packet_len_discharge_s = 300.0; // delta_d
  double x_min = 49.0;
  double x_max = 55.0;
  double setpoint = 52.0;
  double request_rate_max_per_s = 1.0 / 120.0;  // mu0 at the band midpoint
  TclParams thermal;
  EssParams ess;

  void validate() const {
    if (!(x_min < setpoint && setpoint < x_max))
      throw ConfigError("pem device: needs x_min < setpoint < x_max");
    if (!(packet_len_charge_s > 0.0) || !(packet_len_discharge_s > 0.0))
      throw ConfigError("pem device: packet lengths must be > 0");
    if (!(request_rate_max_per_s > 0.0))
      throw ConfigError("pem device: request_rate_max_per_s must be > 0");
    if (!(rated_power_kw > 0.0))
      throw ConfigError("pem device: rated_power_kw must be > 0");
  }

  /// Energy-state rise of one full charge packet, ignoring losses (an upper
  /// bound, used to gate requests so a packet can never push x past x_max).
  double charge_packet_gain() const {
    if (kind == DeviceKind::tcl)
      return thermal.eta * rated_power_kw * packet_len_charge_s /
             (thermal.capacitance_kwh_per_c * 3600.0);
    return ess.eta_ch * rated_power_kw * packet_len_charge_s / 3600.0;
  }

  /// Energy-state drop of one full discharge packet.
  double discharge_packet_drop() const {
    return rated_power_kw * packet_len_discharge_s / (ess.eta_dis * 3600.0);
  }
};

struct DeviceState {
  DeviceMode mode = DeviceMode::OFF;
  double x = 0.0;
  double packet_remaining_s = 0.0;
  bool request_pending = false;
  PacketKind pending_kind = PacketKind::charge;
  bool opt_out_low = false;  // which bound was crossed at opt-out entry
  RngStream rng;
};

struct PacketRequest {
  std::size_t device = 0;
  PacketKind kind = PacketKind::charge;
  double timestamp_s = 0.0;
};

struct Grant {
  bool accepted = false;
  PacketKind kind = PacketKind::charge;
};

struct DeviceStepResult {
  double power_kw = 0.0;  // consumption positive, injection negative
  std::optional<PacketRequest> request;
};

/// Request hazard rate of an OFF device, 1/s. mu(x) = mu0 * (x_max - x) /
/// (x - x_min) for charge, mirrored for discharge: it vanishes at the
/// comfortable bound and diverges at the urgent one. Capped so the
/// resulting probability saturates at 1 rather than overflowing.
inline double request_rate(double x, const PemDeviceConfig& config, PacketKind kind) {
  constexpr double kRateCap = 1e9;
  const double span_lo = x - config.x_min;
  const double span_hi = config.x_max - x;
  const double num = kind == PacketKind::charge ? span_hi : span_lo;
  const double den = kind == PacketKind::charge ? span_lo : span_hi;
  if (num <= 0.0) return 0.0;
  if (den <= 0.0) return kRateCap;
  return std::min(config.request_rate_max_per_s * num / den, kRateCap);
}

/// Probability that an OFF device issues a request of the given kind within
/// dt: 1 - exp(-mu(x) dt).
inline double request_probability(double x, const PemDeviceConfig& config,
                                  double dt_s,
                                  PacketKind kind = PacketKind::charge) {
  const double exponent = std::min(request_rate(x, config, kind) * dt_s, 700.0);
  return 1.0 - std::exp(-exponent);
}

namespace detail {

inline double tcl_next_x(double x, const TclParams& p, double heat_kw, double dt_s) {
  const double tau_s = p.resistance_c_per_kw * p.capacitance_kwh_per_c * 3600.0;
  return x + dt_s * ((p.ambient_c - x) / tau_s +
                     p.eta * heat_kw / (p.capacitance_kwh_per_c * 3600.0));
}

inline double ess_next_x(double x, const EssParams& p, double ch_kw, double dis_kw,
                         double dt_s) {
  return x + dt_s * (p.eta_ch * ch_kw - dis_kw / p.eta_dis) / 3600.0;
}

}  // namespace detail

/// Advances one device by dt. Mode transitions:
///   OFF -> CHARGE/DISCHARGE on an accepted grant for its pending request;
///   CHARGE/DISCHARGE -> OFF when the packet timer expires (packets run to
///   completion; request gating keeps the energy state inside the band);
///   any -> OPT_OUT when x leaves [x_min, x_max];
///   OPT_OUT -> OFF once x recovers past the setpoint.
/// While opted out the device self-serves at rated power toward its
/// setpoint and ignores the packet protocol.
inline DeviceStepResult step_device(DeviceState& st, const PemDeviceConfig& config,
                                    const std::optional<Grant>& grant, double dt_s,
                                    double now_s, std::size_t device_index = 0) {
  if (!(dt_s > 0.0)) throw ConfigError("step_device: dt must be > 0");
  DeviceStepResult out;

  if (grant.has_value()) {
    if (!st.request_pending)
      throw InvalidGrant("grant delivered to device " +
                         std::to_string(device_index) + " with no pending request");
    st.request_pending = false;
    if (grant->accepted && st.mode == DeviceMode::OFF) {
      st.mode = grant->kind == PacketKind::charge ? DeviceMode::CHARGE
                                                  : DeviceMode::DISCHARGE;
      st.packet_remaining_s = grant->kind == PacketKind::charge
                                  ? config.packet_len_charge_s
                                  : config.packet_len_discharge_s;
    }
    // A device that opted out after requesting consumes the decision and
    // keeps self-serving.
  }

  const bool tcl = config.kind == DeviceKind::tcl;
  switch (st.mode) {
    case DeviceMode::CHARGE:
    case DeviceMode::DISCHARGE: {
      const bool charging = st.mode == DeviceMode::CHARGE;
      out.power_kw = charging ? config.rated_power_kw : -config.rated_power_kw;
      st.x = tcl ? detail::tcl_next_x(st.x, config.thermal,
                                      charging ? config.rated_power_kw : 0.0, dt_s)
                 : detail::ess_next_x(st.x, config.ess,
                                      charging ? config.rated_power_kw : 0.0,
                                      charging ? 0.0 : config.rated_power_kw, dt_s);
      st.packet_remaining_s -= dt_s;
      if (st.packet_remaining_s <= 1e-9) {
        st.packet_remaining_s = 0.0;
        st.mode = DeviceMode::OFF;
      }
      if (st.x < config.x_min || st.x > config.x_max) {
        st.opt_out_low = st.x < config.x_min;
        st.packet_remaining_s = 0.0;
        st.mode = DeviceMode::OPT_OUT;
      }
      break;
    }
    case DeviceMode::OPT_OUT: {
      if (st.opt_out_low) {
        out.power_kw = config.rated_power_kw;
        st.x = tcl ? detail::tcl_next_x(st.x, config.thermal, config.rated_power_kw, dt_s)
                   : detail::ess_next_x(st.x, config.ess, config.rated_power_kw, 0.0, dt_s);
        if (st.x >= config.setpoint) st.mode = DeviceMode::OFF;
      } else {
        // Entered from above: a TCL coasts, an ESS bleeds back to the grid.
        if (tcl) {
          st.x = detail::tcl_next_x(st.x, config.thermal, 0.0, dt_s);
        } else {
          out.power_kw = -config.rated_power_kw;
          st.x = detail::ess_next_x(st.x, config.ess, 0.0, config.rated_power_kw, dt_s);
        }
        if (st.x <= config.setpoint) st.mode = DeviceMode::OFF;
      }
      break;
    }
    case DeviceMode::OFF: {
      st.x = tcl ? detail::tcl_next_x(st.x, config.thermal, 0.0, dt_s) : st.x;
      if (st.x < config.x_min || st.x > config.x_max) {
        st.opt_out_low = st.x < config.x_min;
        st.mode = DeviceMode::OPT_OUT;
        break;
      }
      if (!st.request_pending) {
        // Gate each kind on a full packet fitting inside the band.
        double mu_c = 0.0, mu_d = 0.0;
        if (st.x + config.charge_packet_gain() <= config.x_max)
          mu_c = request_rate(st.x, config, PacketKind::charge);
        if (config.kind == DeviceKind::ess &&
            st.x - config.discharge_packet_drop() >= config.x_min)
          mu_d = request_rate(st.x, config, PacketKind::discharge);
        const double mu = mu_c + mu_d;
        if (mu > 0.0) {
          const double p_any = 1.0 - std::exp(-std::min(mu * dt_s, 700.0));
          if (st.rng.uniform01() < p_any) {
            const PacketKind kind = (mu_d > 0.0 && st.rng.uniform01() < mu_d / mu)
                                        ? PacketKind::discharge
                                        : PacketKind::charge;
            st.request_pending = true;
            st.pending_kind = kind;
            out.request = PacketRequest{device_index, kind, now_s};
          }
        }
      }
      break;
    }
  }
  return out;
}

struct FleetEvent {
  double t_s = 0.0;
  std::size_t device = 0;
  DeviceMode from = DeviceMode::OFF;
  DeviceMode to = DeviceMode::OFF;
};

struct FleetStepResult {
  double power_mw = 0.0;  // net consumption of the whole fleet
  std::vector<PacketRequest> requests;
};

struct FleetModeCounts {
  std::size_t charge = 0, discharge = 0, off = 0, opt_out = 0;
};

/// A population of PEM devices stepped in a fixed order. Determinism comes
/// from per-device rng streams keyed off the master seed, so the aggregate
/// trace is a pure function of (population, seed, grant sequence).
class PemFleet {
 public:
  struct Device {
    PemDeviceConfig config;
    DeviceState state;
  };

  PemFleet() = default;
  explicit PemFleet(std::vector<Device> devices) : devices_(std::move(devices)) {}

  /// grants are keyed by device index and answer requests issued in the
  /// previous step.
  FleetStepResult step(const std::map<std::size_t, Grant>& grants, double dt_s,
                       double now_s) {
    for (const auto& [idx, g] : grants)
      if (idx >= devices_.size())
        throw InvalidGrant("grant for unknown device " + std::to_string(idx));
    FleetStepResult out;
    double total_kw = 0.0;
    for (std::size_t i = 0; i < devices_.size(); ++i) {
      auto& dev = devices_[i];
      const DeviceMode before = dev.state.mode;
      std::optional<Grant> g;
      if (auto it = grants.find(i); it != grants.end()) g = it->second;
      auto r = step_device(dev.state, dev.config, g, dt_s, now_s, i);
      total_kw += r.power_kw;
      if (r.request) out.requests.push_back(*r.request);
      if (event_log_ && dev.state.mode != before)
        event_log_->push_back({now_s, i, before, dev.state.mode});
    }
    out.power_mw = total_kw / 1000.0;
    return out;
  }

  FleetModeCounts mode_counts() const {
    FleetModeCounts c;
    for (const auto& d : devices_) {
      switch (d.state.mode) {
        case DeviceMode::CHARGE: ++c.charge; break;
        case DeviceMode::DISCHARGE: ++c.discharge; break;
        case DeviceMode::OFF: ++c.off; break;
        case DeviceMode::OPT_OUT: ++c.opt_out; break;
      }
    }
    return c;
  }

  /// Aggregate stored energy above each device's lower bound, MWh. For the
  /// VPP this is the fleet's SOC measure.
  double stored_mwh() const {
    double kwh = 0.0;
    for (const auto& d : devices_) {
      const double span = d.state.x - d.config.x_min;
      kwh += d.config.kind == DeviceKind::tcl
                 ? span * d.config.thermal.capacitance_kwh_per_c
                 : span;
    }
    return kwh / 1000.0;
  }

  double capacity_mwh() const {
    double kwh = 0.0;
    for (const auto& d : devices_) {
      const double span = d.config.x_max - d.config.x_min;
      kwh += d.config.kind == DeviceKind::tcl
                 ? span * d.config.thermal.capacitance_kwh_per_c
                 : span;
    }
    return kwh / 1000.0;
  }

  std::size_t size() const { return devices_.size(); }
  const std::vector<Device>& devices() const { return devices_; }
  std::vector<Device>& devices() { return devices_; }

  void set_event_log(std::vector<FleetEvent>* log) { event_log_ = log; }

 private:
  std::vector<Device> devices_;
  std::vector<FleetEvent>* event_log_ = nullptr;
};

/// Homogeneous slice of a fleet population; initial energy states are drawn
/// uniformly from [x0_min, x0_max] on each device's own stream.
struct FleetGroup {
  std::size_t count = 0;
  PemDeviceConfig config;
  double x0_min = 0.0;
  double x0_max = 0.0;
};

inline PemFleet build_fleet(const std::vector<FleetGroup>& groups,
                            std::uint64_t master_seed) {
  std::vector<PemFleet::Device> devices;
  std::size_t index = 0;
  for (const auto& g : groups) {
    g.config.validate();
    if (g.x0_min < g.config.x_min || g.x0_max > g.config.x_max || g.x0_min > g.x0_max)
      throw ConfigError("fleet group: initial state window must sit inside [x_min, x_max]");
    for (std::size_t k = 0; k < g.count; ++k, ++index) {
      PemFleet::Device d;
      d.config = g.config;
      d.state.rng = RngStream::substream(master_seed, index);
      d.state.x = d.state.rng.uniform(g.x0_min, g.x0_max);
      d.state.mode = DeviceMode::OFF;
      devices.push_back(std::move(d));
    }
  }
  return PemFleet(std::move(devices));
}

}  // namespace vppsim
