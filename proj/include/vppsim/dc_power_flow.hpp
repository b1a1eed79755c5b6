#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "vppsim/errors.hpp"
#include "vppsim/grid_model.hpp"

namespace vppsim {

struct PowerFlowResult {
  std::vector<double> line_flow_mw;   // ordered as model.lines, from -> to positive
  std::vector<double> bus_angle_rad;  // ordered as model.buses, slack pinned to 0
};

struct LineViolation {
  std::size_t line_index = 0;
  double overload_mw = 0.0;  // |flow| - limit, > 0
};

/// Lossless DC power flow over a fixed network. The susceptance matrix is
/// reduced about the slack bus and factorized once; solves are a pair of
/// triangular substitutions, cheap enough to run every output sample.
///
/// Internally per-unit on the model's MVA base; MW at the interface.
class DcPowerFlow {
 public:
  explicit DcPowerFlow(const GridModel& model) : model_(&model) {
    if (!model.connected())
      throw SingularNetwork("dc power flow: network graph is disconnected");
    const std::size_t n = model.buses.size();
    slack_index_ = model.bus_index(model.slack_bus);

    // Row/column k of the full susceptance Laplacian maps to reduced index
    // k or k-1 depending on position relative to the slack.
    reduced_of_.assign(n, -1);
    for (std::size_t i = 0, r = 0; i < n; ++i)
      if (i != slack_index_) reduced_of_[i] = static_cast<int>(r++);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(model.lines.size() * 4 + n);
    for (const auto& ln : model.lines) {
      const std::size_t a = model.bus_index(ln.from_bus);
      const std::size_t b = model.bus_index(ln.to_bus);
      const double y = ln.susceptance_pu;
      auto add = [&](std::size_t i, std::size_t j, double v) {
        if (i == slack_index_ || j == slack_index_) return;
        trips.emplace_back(reduced_of_[i], reduced_of_[j], v);
      };
      add(a, a, y);
      add(b, b, y);
      add(a, b, -y);
      add(b, a, -y);
    }
    Eigen::SparseMatrix<double> b_reduced(static_cast<int>(n - 1),
                                          static_cast<int>(n - 1));
    if (n > 1) {
      b_reduced.setFromTriplets(trips.begin(), trips.end());
      solver_.compute(b_reduced);
      if (solver_.info() != Eigen::Success)
        throw SingularNetwork("dc power flow: susceptance matrix is singular");
    }
  }

  /// injections_mw[i] is the net MW injected at model.buses[i] (generation
  /// positive, load negative). Must balance to zero within tol_mw; the
  /// slack absorbs only that sub-tolerance residual.
  PowerFlowResult solve(const std::vector<double>& injection_mw,
                        double tol_mw = 1e-6) const {
    const auto& model = *model_;
    const std::size_t n = model.buses.size();
    if (injection_mw.size() != n)
      throw DimensionMismatch("dc power flow: injection vector size mismatch");
    double residual = 0.0;
    for (double p : injection_mw) residual += p;
    if (std::abs(residual) > tol_mw)
      throw ImbalanceError("dc power flow: injections sum to " +
                           std::to_string(residual) +
                           " MW, beyond the slack tolerance");

    PowerFlowResult out;
    out.bus_angle_rad.assign(n, 0.0);
    if (n > 1) {
      Eigen::VectorXd p(static_cast<int>(n - 1));
      for (std::size_t i = 0; i < n; ++i)
        if (i != slack_index_)
          p[reduced_of_[i]] = injection_mw[i] / model.base_mva;
      Eigen::VectorXd theta = solver_.solve(p);
      if (solver_.info() != Eigen::Success)
        throw SingularNetwork("dc power flow: solve failed");
      for (std::size_t i = 0; i < n; ++i)
        if (i != slack_index_) out.bus_angle_rad[i] = theta[reduced_of_[i]];
    }
    out.line_flow_mw.reserve(model.lines.size());
    for (const auto& ln : model.lines) {
      const double ti = out.bus_angle_rad[model.bus_index(ln.from_bus)];
      const double tj = out.bus_angle_rad[model.bus_index(ln.to_bus)];
      out.line_flow_mw.push_back(ln.susceptance_pu * (ti - tj) * model.base_mva);
    }
    return out;
  }

 private:
  const GridModel* model_;
  std::size_t slack_index_ = 0;
  std::vector<int> reduced_of_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

/// One-shot convenience wrapper.
inline PowerFlowResult dc_power_flow(const GridModel& model,
                                     const std::vector<double>& injection_mw,
                                     double tol_mw = 1e-6) {
  return DcPowerFlow(model).solve(injection_mw, tol_mw);
}

/// Lines whose |flow| exceeds the thermal limit, with the overload amount.
inline std::vector<LineViolation> check_line_limits(
    const std::vector<double>& flow_mw, const GridModel& model) {
  if (flow_mw.size() != model.lines.size())
    throw DimensionMismatch("check_line_limits: flow vector size mismatch");
  std::vector<LineViolation> out;
  for (std::size_t k = 0; k < flow_mw.size(); ++k) {
    const double over = std::abs(flow_mw[k]) - model.lines[k].flow_limit_mw;
    if (over > 0.0) out.push_back({k, over});
  }
  return out;
}

}  // namespace vppsim
