#pragma once

#include <cmath>
#include <map>
#include <string>

#include "vppsim/errors.hpp"

namespace vppsim {

/// Secondary-control configuration for one area. Commands are split across
/// the participation map; fractions must sum to one (a fraction of zero
/// keeps a resource eligible for redistributed surplus only).
struct AgcConfig {
  double bias_mw_per_hz = 0.0;     // frequency bias B
  double integral_gain_per_s = 0.0;
  double agc_period_s = 4.0;
  std::map<std::string, double> participation;

  void validate() const {
    if (!(bias_mw_per_hz > 0.0)) throw ConfigError("agc.bias_mw_per_hz: must be > 0");
    if (!(integral_gain_per_s > 0.0))
      throw ConfigError("agc.integral_gain_per_s: must be > 0");
    if (!(agc_period_s > 0.0)) throw ConfigError("agc.period_s: must be > 0");
    double sum = 0.0;
    for (const auto& [id, f] : participation) {
      if (f < 0.0 || f > 1.0)
        throw ConfigError("agc.participation." + id + ": must be in [0,1]");
      sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw ConfigError("agc.participation: fractions must sum to 1");
  }
};

/// Power/ramp availability of one resource as seen by the dispatcher, in
/// injection-deviation MW. Deliberately contains no energy state: the
/// dispatcher is blind to SOC, which is exactly what lets it drive a
/// battery into its capacity wall.
struct ResourceEnvelope {
  double min_dev_mw = 0.0;   // most negative injection deviation available
  double max_dev_mw = 0.0;   // most positive
  double max_step_mw = 0.0;  // permitted change per AGC period
};

struct AgcState {
  double ace_integral_mw_s = 0.0;
  std::map<std::string, double> last_commands;  // injection deviation MW
};

struct AgcDispatchResult {
  std::map<std::string, double> commands;  // injection deviation MW
  bool all_saturated = false;
  double unserved_mw = 0.0;  // requested power no participant could carry
};

/// ACE = tie-line deviation plus biased frequency deviation. Positive ACE
/// means the area is over-generating.
inline double compute_ace(double freq_dev_hz, double tie_dev_mw,
                          const AgcConfig& config) {
  return tie_dev_mw + config.bias_mw_per_hz * freq_dev_hz;
}

/// Integral dispatch step, called once per agc_period_s. Advances the ACE
/// integral by forward Euler, splits -K_I * integral across participants,
/// clamps each command to its envelope and ramp allowance, and runs one
/// redistribution pass handing clamped surplus to resources with headroom
/// left. Integration freezes while the whole participant set is saturated
/// so the integral cannot wind up beyond the fleet's reach.
inline AgcDispatchResult agc_dispatch(
    AgcState& state, double ace_mw, const AgcConfig& config,
    const std::map<std::string, ResourceEnvelope>& limits) {
  for (const auto& [id, f] : config.participation)
    if (!limits.contains(id))
      throw ConfigError("agc_dispatch: no envelope for participant " + id);

  const double integral_next =
      state.ace_integral_mw_s + ace_mw * config.agc_period_s;
  const double total = -config.integral_gain_per_s * integral_next;

  AgcDispatchResult out;
  std::map<std::string, bool> clamped;
  double served = 0.0;
  for (const auto& [id, frac] : config.participation) {
    const ResourceEnvelope& env = limits.at(id);
    const double last =
        state.last_commands.contains(id) ? state.last_commands.at(id) : 0.0;
    const double raw = frac * total;
    // Box first, then the ramp window around the previous command; the ramp
    // window is never empty so a shrinking envelope is approached at ramp
    // rate rather than jumped to.
    double c = std::clamp(raw, env.min_dev_mw, env.max_dev_mw);
    c = std::clamp(c, last - env.max_step_mw, last + env.max_step_mw);
    clamped[id] = std::abs(c - raw) > 1e-12;
    out.commands[id] = c;
    served += c;
  }

  double surplus = total - served;
  if (std::abs(surplus) > 1e-9) {
    double headroom_total = 0.0;
    std::map<std::string, double> headroom;
    for (const auto& [id, frac] : config.participation) {
      if (clamped[id]) continue;
      const ResourceEnvelope& env = limits.at(id);
      const double last =
          state.last_commands.contains(id) ? state.last_commands.at(id) : 0.0;
      const double c = out.commands[id];
      const double hi = std::min(env.max_dev_mw, last + env.max_step_mw);
      const double lo = std::max(env.min_dev_mw, last - env.max_step_mw);
      const double h = (surplus > 0.0) ? std::max(hi - c, 0.0)
                                       : std::min(lo - c, 0.0);
      headroom[id] = h;
      headroom_total += h;
    }
    if (std::abs(headroom_total) > 1e-12) {
      const double scale = std::min(1.0, surplus / headroom_total);
      for (auto& [id, h] : headroom) out.commands[id] += scale * h;
    }
  }

  double final_served = 0.0;
  for (const auto& [id, c] : out.commands) final_served += c;
  out.unserved_mw = total - final_served;
  out.all_saturated = std::abs(out.unserved_mw) > 1e-6;

  if (!out.all_saturated) state.ace_integral_mw_s = integral_next;
  state.last_commands = out.commands;
  return out;
}

}  // namespace vppsim
