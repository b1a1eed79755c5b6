#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "vppsim/errors.hpp"
#include "vppsim/grid_model.hpp"

namespace vppsim {

inline constexpr double kNominalFreqHz = 60.0;

/// Dynamic state of one machine. Speed deviation is shared with the
/// machine's area (machines inside an area swing coherently); governor and
/// turbine states are per machine so droop gains, ramp limits and power
/// bounds apply individually.
struct MachineDynState {
  double delta_omega_pu = 0.0;
  double p_mech_mw = 0.0;   // clamped to the generator's box and ramp rate
  double p_valve_mw = 0.0;  // governor valve position, absolute MW
  double p_ref_mw = 0.0;    // load-reference set-point written by AGC/MPC
};

struct AreaDynState {
  std::vector<MachineDynState> machines;
  double tie_flow_dev_mw = 0.0;  // deviation of this area's export from schedule
  double freq_hz = kNominalFreqHz;
};

struct DynConfig {
  double ts_dyn_s = 0.1;
  // The governor lag crossover 1/sqrt(Tg*Tt) must sit above the tie-line
  // mode frequency, otherwise droop feedback arrives with enough phase lag
  // to undamp the inter-area oscillation.
  double governor_tc_s = 0.6;
  double turbine_tc_s = 0.8;
  double damping_d_pu = 1.0;  // load shed fraction per pu frequency rise
  double tie_stiffness_mw_per_rad = 0.5;

  void validate() const {
    if (!(ts_dyn_s > 0.0)) throw ConfigError("dynamics.ts_dyn_s: must be > 0");
    const double tc = std::min(governor_tc_s, turbine_tc_s);
    if (!(ts_dyn_s < tc / 5.0))
      throw ConfigError("dynamics.ts_dyn_s: must stay below min(governor, turbine)/5 "
                        "for a stable explicit step");
    if (!(governor_tc_s > 0.0) || !(turbine_tc_s > 0.0))
      throw ConfigError("dynamics: time constants must be > 0");
    if (!(tie_stiffness_mw_per_rad > 0.0))
      throw ConfigError("dynamics.tie_stiffness_mw_per_rad: must be > 0");
    if (damping_d_pu < 0.0) throw ConfigError("dynamics.damping_d_pu: must be >= 0");
  }
};

/// Inertia-weighted mean of machine frequencies.
inline double mean_frequency(const std::vector<double>& freq_hz,
                             const std::vector<double>& inertia_mws) {
  if (freq_hz.empty() || freq_hz.size() != inertia_mws.size())
    throw DimensionMismatch("mean_frequency: needs one inertia per machine");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < freq_hz.size(); ++i) {
    num += freq_hz[i] * inertia_mws[i];
    den += inertia_mws[i];
  }
  return num / den;
}

/// Two-area swing/governor/turbine/tie-line model integrated by forward
/// Euler. Area 1 is the internal balancing authority, area 2 the external
/// equivalent. Per machine:
///
///   M_a d(dw)/dt   = sum(P_mech - P_sched) - dP_elec - D_a dw
///   Tg d(valve)/dt = (P_ref - P_sched) - dw * S/R - (valve - P_sched)
///   Tt d(mech)/dt  = valve - mech            (then box + ramp clamps)
///   d(dP_tie)/dt   = T12 * w_base * (dw_1 - dw_2)
///
/// with M_a the area's aggregate 2HS in MW*s and D_a the load damping
/// scaled by the area's scheduled load.
class TwoAreaSystem {
 public:
  TwoAreaSystem(const GridModel& model, DynConfig config,
                const std::map<std::string, double>& gen_sched_mw,
                double tie_sched_mw)
      : config_(config), tie_sched_mw_(tie_sched_mw) {
    config_.validate();
    const auto areas = model.areas();
    if (areas != std::vector<int>{1, 2})
      throw ConfigError("dynamics: model must define areas 1 and 2");
    for (int a : {1, 2}) {
      AreaParams ap;
      for (const auto& g : model.generators) {
        if (model.buses[model.bus_index(g.bus)].area != a) continue;
        auto it = gen_sched_mw.find(g.id);
        if (it == gen_sched_mw.end())
          throw ConfigError("schedule.gen_setpoints_mw: missing " + g.id);
        MachineParams mp;
        mp.id = g.id;
        mp.p_sched_mw = it->second;
        mp.p_min_mw = g.p_min_mw;
        mp.p_max_mw = g.p_max_mw;
        mp.ramp_mw_per_s = g.ramp_mw_per_min / 60.0;
        mp.droop_gain_mw = g.droop_gain_mw();
        mp.inertia_mws = g.inertia_mws();
        ap.machines.push_back(mp);
      }
      if (ap.machines.empty())
        throw ConfigError("dynamics: area " + std::to_string(a) + " has no machine");
      for (const auto& mp : ap.machines) {
        ap.inertia_mws += mp.inertia_mws;
        ap.sched_total_mw += mp.p_sched_mw;
      }
      const double exp_sched = (a == 1) ? tie_sched_mw : -tie_sched_mw;
      ap.sched_load_mw = ap.sched_total_mw - exp_sched;
      ap.damping_mw_per_pu = config_.damping_d_pu * std::max(ap.sched_load_mw, 0.0);
      areas_[a - 1] = ap;
    }
  }

  /// Equilibrium state at the schedule: all deviations zero.
  std::array<AreaDynState, 2> initial_state() const {
    std::array<AreaDynState, 2> out;
    for (int a = 0; a < 2; ++a) {
      for (const auto& mp : areas_[a].machines) {
        MachineDynState ms;
        ms.p_mech_mw = ms.p_valve_mw = ms.p_ref_mw = mp.p_sched_mw;
        out[a].machines.push_back(ms);
      }
      out[a].freq_hz = kNominalFreqHz;
    }
    return out;
  }

  /// Scheduled electrical consumption each area's machines serve (area
  /// load net of the scheduled interchange).
  double scheduled_area_load_mw(int area) const {
    return areas_.at(area - 1).sched_load_mw;
  }

  /// Composite primary-response stiffness sum(S/R) + sum(D), MW per pu.
  double composite_droop_mw_per_pu() const {
    double s = 0.0;
    for (const auto& ap : areas_) {
      s += ap.damping_mw_per_pu;
      for (const auto& mp : ap.machines) s += mp.droop_gain_mw;
    }
    return s;
  }

  /// Steady-state frequency deviation for a sustained load step with
  /// secondary control disabled, from the configured droops and damping.
  double droop_steady_state_hz(double load_step_mw) const {
    return -load_step_mw / composite_droop_mw_per_pu() * kNominalFreqHz;
  }

  /// One forward-Euler step. electrical_load_mw[a] is the total MW the
  /// area's machines must serve this instant: bus loads net of renewables,
  /// plus VPP charging, minus VPP discharging.
  std::array<AreaDynState, 2> step(const std::array<AreaDynState, 2>& state,
                                   const std::array<double, 2>& electrical_load_mw) const {
    const double dt = config_.ts_dyn_s;
    const double tie_dev = state[0].tie_flow_dev_mw;
    std::array<AreaDynState, 2> next = state;

    const std::array<double, 2> omega_prev{area_omega_pu(state[0]),
                                           area_omega_pu(state[1])};
    std::array<double, 2> domega{};
    for (int a = 0; a < 2; ++a) {
      const AreaParams& ap = areas_[a];
      const double dw = omega_prev[a];
      const double export_dev = (a == 0) ? tie_dev : -tie_dev;
      const double dp_elec =
          electrical_load_mw[a] + export_dev - ap.sched_load_mw;
      double mech_dev = 0.0;
      for (std::size_t i = 0; i < ap.machines.size(); ++i)
        mech_dev += state[a].machines[i].p_mech_mw - ap.machines[i].p_sched_mw;

      domega[a] = dw + dt * (mech_dev - dp_elec - ap.damping_mw_per_pu * dw) /
                           ap.inertia_mws;

      for (std::size_t i = 0; i < ap.machines.size(); ++i) {
        const MachineParams& mp = ap.machines[i];
        const MachineDynState& ms = state[a].machines[i];
        const double valve_dev = ms.p_valve_mw - mp.p_sched_mw;
        const double ref_dev = ms.p_ref_mw - mp.p_sched_mw;
        const double valve_next =
            valve_dev + dt * (ref_dev - dw * mp.droop_gain_mw - valve_dev) /
                            config_.governor_tc_s;
        double mech = ms.p_mech_mw +
                      dt * (ms.p_valve_mw - ms.p_mech_mw) / config_.turbine_tc_s;
        const double max_step = mp.ramp_mw_per_s * dt;
        mech = std::clamp(mech, ms.p_mech_mw - max_step, ms.p_mech_mw + max_step);
        mech = std::clamp(mech, mp.p_min_mw, mp.p_max_mw);
        next[a].machines[i].p_valve_mw = mp.p_sched_mw + valve_next;
        next[a].machines[i].p_mech_mw = mech;
      }
    }

    const double tie_next =
        tie_dev + dt * config_.tie_stiffness_mw_per_rad * omega_base_rad_s() *
                      (omega_prev[0] - omega_prev[1]);
    next[0].tie_flow_dev_mw = tie_next;
    next[1].tie_flow_dev_mw = -tie_next;
    for (int a = 0; a < 2; ++a) {
      next[a].freq_hz = kNominalFreqHz * (1.0 + domega[a]);
      for (auto& ms : next[a].machines) ms.delta_omega_pu = domega[a];
      check_finite(next[a]);
    }
    return next;
  }

  /// Inertia-weighted mean over every machine in both areas.
  double mean_frequency_hz(const std::array<AreaDynState, 2>& state) const {
    std::vector<double> f, h;
    for (int a = 0; a < 2; ++a)
      for (std::size_t i = 0; i < areas_[a].machines.size(); ++i) {
        f.push_back(kNominalFreqHz * (1.0 + state[a].machines[i].delta_omega_pu));
        h.push_back(areas_[a].machines[i].inertia_mws);
      }
    return mean_frequency(f, h);
  }

  /// Electrical output of each area-`area` machine consistent with the
  /// current accelerating power, allocated by inertia share. These sum,
  /// over both areas, to total consumption, so they form a balanced
  /// injection set for the DC network view.
  std::vector<double> machine_electrical_mw(const std::array<AreaDynState, 2>& state,
                                            const std::array<double, 2>& electrical_load_mw,
                                            int area) const {
    const AreaParams& ap = areas_.at(area - 1);
    const double tie_dev = state[0].tie_flow_dev_mw;
    const double export_dev = (area == 1) ? tie_dev : -tie_dev;
    const double target = electrical_load_mw[area - 1] + export_dev +
                          ((area == 1) ? tie_sched_mw_ : -tie_sched_mw_);
    double mech_total = 0.0;
    for (std::size_t i = 0; i < ap.machines.size(); ++i)
      mech_total += state[area - 1].machines[i].p_mech_mw;
    const double absorbed = mech_total - target;  // swing + damping power
    std::vector<double> out;
    for (std::size_t i = 0; i < ap.machines.size(); ++i) {
      const double share = ap.machines[i].inertia_mws / ap.inertia_mws;
      out.push_back(state[area - 1].machines[i].p_mech_mw - share * absorbed);
    }
    return out;
  }

  std::size_t machine_count(int area) const { return areas_.at(area - 1).machines.size(); }
  const std::string& machine_id(int area, std::size_t i) const {
    return areas_.at(area - 1).machines.at(i).id;
  }
  double machine_sched_mw(int area, std::size_t i) const {
    return areas_.at(area - 1).machines.at(i).p_sched_mw;
  }
  double machine_inertia_mws(int area, std::size_t i) const {
    return areas_.at(area - 1).machines.at(i).inertia_mws;
  }
  double tie_sched_mw() const { return tie_sched_mw_; }
  const DynConfig& config() const { return config_; }

  static double omega_base_rad_s() { return 2.0 * std::numbers::pi * kNominalFreqHz; }

 private:
  struct MachineParams {
    std::string id;
    double p_sched_mw = 0.0;
    double p_min_mw = 0.0;
    double p_max_mw = 0.0;
    double ramp_mw_per_s = 0.0;
    double droop_gain_mw = 0.0;
    double inertia_mws = 0.0;
  };
  struct AreaParams {
    std::vector<MachineParams> machines;
    double inertia_mws = 0.0;
    double sched_total_mw = 0.0;
    double sched_load_mw = 0.0;
    double damping_mw_per_pu = 0.0;
  };

  static double area_omega_pu(const AreaDynState& s) {
    return s.freq_hz / kNominalFreqHz - 1.0;
  }

  static void check_finite(const AreaDynState& s) {
    bool ok = std::isfinite(s.freq_hz) && std::isfinite(s.tie_flow_dev_mw);
    for (const auto& m : s.machines)
      ok = ok && std::isfinite(m.p_mech_mw) && std::isfinite(m.p_valve_mw) &&
           std::isfinite(m.delta_omega_pu);
    if (!ok) throw UnstableStep("dynamics state became non-finite");
  }

  DynConfig config_;
  double tie_sched_mw_ = 0.0;
  std::array<AreaParams, 2> areas_{};
};

}  // namespace vppsim
