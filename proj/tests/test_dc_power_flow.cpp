#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vppsim/dc_power_flow.hpp"
#include "vppsim/grid_io.hpp"
#include "vppsim/grid_model.hpp"
#include "vppsim/rng.hpp"

using namespace vppsim;

namespace {

// Independent oracle: dense Gaussian elimination with partial pivoting on
// the slack-reduced susceptance matrix, assembled from scratch. Shares no
// code with DcPowerFlow.
std::vector<double> oracle_angles(const GridModel& m,
                                  const std::vector<double>& injection_mw) {
  const std::size_t n = m.buses.size();
  const std::size_t slack = m.bus_index(m.slack_bus);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (i != slack) keep.push_back(i);
  const std::size_t nr = keep.size();

  std::vector<std::vector<double>> a(nr, std::vector<double>(nr + 1, 0.0));
  auto pos = [&](std::size_t full) -> int {
    for (std::size_t r = 0; r < nr; ++r)
      if (keep[r] == full) return static_cast<int>(r);
    return -1;
  };
  for (const auto& ln : m.lines) {
    const int pi = pos(m.bus_index(ln.from_bus));
    const int pj = pos(m.bus_index(ln.to_bus));
    const double y = ln.susceptance_pu;
    if (pi >= 0) a[pi][pi] += y;
    if (pj >= 0) a[pj][pj] += y;
    if (pi >= 0 && pj >= 0) {
      a[pi][pj] -= y;
      a[pj][pi] -= y;
    }
  }
  for (std::size_t r = 0; r < nr; ++r) a[r][nr] = injection_mw[keep[r]] / m.base_mva;

  for (std::size_t col = 0; col < nr; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < nr; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    REQUIRE(std::abs(a[col][col]) > 1e-12);
    for (std::size_t r = 0; r < nr; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= nr; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> theta(n, 0.0);
  for (std::size_t r = 0; r < nr; ++r) theta[keep[r]] = a[r][nr] / a[r][r];
  return theta;
}

GridModel two_bus_model() {
  GridModel m;
  m.base_mva = 100.0;
  m.slack_bus = 2;
  m.buses = {{1, 1, LoadSeries(0.0), 0.0}, {2, 1, LoadSeries(0.0), 0.0}};
  m.lines = {{1, 2, 5.0, 500.0}};
  return m;
}

}  // namespace

TEST_CASE("two-bus closed form") {
  auto m = two_bus_model();
  auto res = dc_power_flow(m, {100.0, -100.0});
  // P = 1 pu across b = 5 pu: angle difference 0.2 rad, 100 MW on the line.
  CHECK(res.bus_angle_rad[0] - res.bus_angle_rad[1] == Catch::Approx(0.2));
  CHECK(res.line_flow_mw[0] == Catch::Approx(100.0));
  CHECK(res.bus_angle_rad[1] == 0.0);  // slack pinned
}

TEST_CASE("zero injections give zero state") {
  auto m = two_bus_model();
  auto res = dc_power_flow(m, {0.0, 0.0});
  CHECK(res.line_flow_mw[0] == 0.0);
  CHECK(res.bus_angle_rad[0] == 0.0);
  CHECK(res.bus_angle_rad[1] == 0.0);
}

TEST_CASE("five-bus scheduled injections match the dense elimination oracle") {
  GridModel m = load_grid("networks/five_bus.grid");
  // Scheduled operating point: G1 80, G2 150, G3 balances; VPPs idle,
  // fleet baseline folded into the bus-3 figure.
  std::vector<double> inj(m.buses.size(), 0.0);
  inj[m.bus_index(1)] = 80.0 - 60.0;
  inj[m.bus_index(2)] = 150.0 - 60.0;
  inj[m.bus_index(3)] = -70.6;
  inj[m.bus_index(5)] = -35.0;
  double sum = 0.0;
  for (double v : inj) sum += v;
  inj[m.bus_index(4)] = -sum;  // slack machine balances

  auto res = dc_power_flow(m, inj);
  auto theta = oracle_angles(m, inj);
  for (std::size_t i = 0; i < m.buses.size(); ++i)
    CHECK(res.bus_angle_rad[i] == Catch::Approx(theta[i]).margin(1e-10));
  for (std::size_t k = 0; k < m.lines.size(); ++k) {
    const auto& ln = m.lines[k];
    const double want = ln.susceptance_pu * m.base_mva *
                        (theta[m.bus_index(ln.from_bus)] - theta[m.bus_index(ln.to_bus)]);
    CHECK(res.line_flow_mw[k] == Catch::Approx(want).margin(1e-8));
  }
}

TEST_CASE("flow conservation at every bus") {
  GridModel m = load_grid("networks/five_bus.grid");
  RngStream rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> inj(m.buses.size());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < inj.size(); ++i) {
      inj[i] = rng.uniform(-120.0, 120.0);
      sum += inj[i];
    }
    inj.back() = -sum;
    auto res = dc_power_flow(m, inj);
    for (std::size_t i = 0; i < m.buses.size(); ++i) {
      double net_out = 0.0;
      for (std::size_t k = 0; k < m.lines.size(); ++k) {
        if (m.bus_index(m.lines[k].from_bus) == i) net_out += res.line_flow_mw[k];
        if (m.bus_index(m.lines[k].to_bus) == i) net_out -= res.line_flow_mw[k];
      }
      CHECK(std::abs(net_out - inj[i]) < 1e-6);
    }
  }
}

TEST_CASE("solution is linear in the injections") {
  GridModel m = load_grid("networks/five_bus.grid");
  RngStream rng(7);
  const std::size_t n = m.buses.size();
  std::vector<double> x(n), y(n);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    x[i] = rng.uniform(-80.0, 80.0);
    y[i] = rng.uniform(-80.0, 80.0);
    sx += x[i];
    sy += y[i];
  }
  x.back() = -sx;
  y.back() = -sy;
  const double a = 0.35, b = -1.25;
  std::vector<double> combo(n);
  for (std::size_t i = 0; i < n; ++i) combo[i] = a * x[i] + b * y[i];

  DcPowerFlow pf(m);
  auto rx = pf.solve(x), ry = pf.solve(y), rc = pf.solve(combo);
  for (std::size_t k = 0; k < m.lines.size(); ++k) {
    const double want = a * rx.line_flow_mw[k] + b * ry.line_flow_mw[k];
    const double scale = std::max(1.0, std::abs(want));
    CHECK(std::abs(rc.line_flow_mw[k] - want) / scale < 1e-9);
  }
}

TEST_CASE("reversing a line's orientation negates its flow") {
  GridModel m = load_grid("networks/five_bus.grid");
  std::vector<double> inj(m.buses.size(), 0.0);
  inj[0] = 50.0;
  inj[3] = -50.0;
  auto fwd = dc_power_flow(m, inj);

  GridModel rev = m;
  std::swap(rev.lines[2].from_bus, rev.lines[2].to_bus);
  auto bwd = dc_power_flow(rev, inj);
  CHECK(bwd.line_flow_mw[2] == Catch::Approx(-fwd.line_flow_mw[2]));
}

TEST_CASE("line limit checks") {
  auto m = two_bus_model();
  m.lines[0].flow_limit_mw = 100.0;
  CHECK(check_line_limits({90.0}, m).empty());
  CHECK(check_line_limits({0.0}, m).empty());
  auto v = check_line_limits({-120.0}, m);
  REQUIRE(v.size() == 1);
  CHECK(v[0].line_index == 0);
  CHECK(v[0].overload_mw == Catch::Approx(20.0));
  CHECK_THROWS_AS(check_line_limits({1.0, 2.0}, m), DimensionMismatch);
}

TEST_CASE("disconnected network is rejected") {
  GridModel m;
  m.slack_bus = 1;
  m.buses = {{1, 1, LoadSeries(0.0), 0.0},
             {2, 1, LoadSeries(0.0), 0.0},
             {3, 1, LoadSeries(0.0), 0.0}};
  m.lines = {{1, 2, 5.0, 100.0}};  // bus 3 isolated
  CHECK_THROWS_AS(DcPowerFlow(m), SingularNetwork);
}

TEST_CASE("unbalanced injections beyond tolerance are rejected") {
  auto m = two_bus_model();
  CHECK_THROWS_AS(dc_power_flow(m, {100.0, -99.0}), ImbalanceError);
  // Sub-tolerance residual lands on the slack instead.
  CHECK_NOTHROW(dc_power_flow(m, {100.0, -100.0 + 1e-7}));
}
