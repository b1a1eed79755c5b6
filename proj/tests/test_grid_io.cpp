#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "vppsim/grid_io.hpp"

using namespace vppsim;
using nlohmann::json;

namespace {

json minimal_grid() {
  return json::parse(R"({
    "schema_version": 1,
    "slack_bus": 1,
    "buses": [
      {"id": 1, "area": 1, "load_mw": 10.0},
      {"id": 2, "area": 2, "load_mw": 5.0}
    ],
    "lines": [
      {"from": 1, "to": 2, "susceptance_pu": 5.0, "flow_limit_mw": 50.0}
    ],
    "generators": [
      {"id": "G1", "bus": 1, "p_min_mw": 0.0, "p_max_mw": 20.0,
       "ramp_mw_per_min": 2.0}
    ]
  })");
}

}  // namespace

TEST_CASE("bundled five-bus network loads and validates") {
  GridModel m = load_grid("networks/five_bus.grid");
  CHECK(m.buses.size() == 5);
  CHECK(m.lines.size() == 6);
  CHECK(m.generators.size() == 3);
  CHECK(m.vpps.size() == 2);
  CHECK(m.areas() == std::vector<int>{1, 2});

  double gross = 0.0, renewable = 0.0;
  for (const auto& b : m.buses) {
    gross += b.load_forecast.value(0.0);
    renewable += b.renewable_mw;
  }
  CHECK(gross == Catch::Approx(609.0));
  CHECK(renewable / gross == Catch::Approx(0.5).margin(0.01));

  const auto& bat = m.vpp("BAT1");
  CHECK(bat.s_max_mwh == Catch::Approx(45.0));
  CHECK(bat.s0_mwh / bat.s_max_mwh == Catch::Approx(0.5));
}

TEST_CASE("minimal grid parses with defaults") {
  GridModel m = parse_grid(minimal_grid());
  CHECK(m.base_mva == Catch::Approx(100.0));
  CHECK(m.generators[0].droop_pct == Catch::Approx(0.05));
  CHECK(m.buses[1].net_load_mw(0.0) == Catch::Approx(5.0));
}

TEST_CASE("load profiles are stepwise and time-ordered") {
  auto j = minimal_grid();
  j["buses"][0]["load_profile"] = json::array({{0.0, 10.0}, {60.0, 25.0}});
  GridModel m = parse_grid(j);
  CHECK(m.buses[0].load_forecast.value(30.0) == Catch::Approx(10.0));
  CHECK(m.buses[0].load_forecast.value(60.0) == Catch::Approx(25.0));
  CHECK(m.buses[0].load_forecast.value(1e9) == Catch::Approx(25.0));

  j["buses"][0]["load_profile"] = json::array({{60.0, 25.0}, {0.0, 10.0}});
  CHECK_THROWS_AS(parse_grid(j), ConfigError);
}

TEST_CASE("structural invariants are enforced") {
  SECTION("duplicate bus id") {
    auto j = minimal_grid();
    j["buses"][1]["id"] = 1;
    CHECK_THROWS_AS(parse_grid(j), ConfigError);
  }
  SECTION("line referencing an unknown bus") {
    auto j = minimal_grid();
    j["lines"][0]["to"] = 9;
    CHECK_THROWS_AS(parse_grid(j), ConfigError);
  }
  SECTION("self-loop line") {
    auto j = minimal_grid();
    j["lines"][0]["to"] = 1;
    CHECK_THROWS_AS(parse_grid(j), ConfigError);
  }
  SECTION("nonpositive susceptance") {
    auto j = minimal_grid();
    j["lines"][0]["susceptance_pu"] = 0.0;
    CHECK_THROWS_AS(parse_grid(j), ConfigError);
  }
  SECTION("slack bus must exist") {
    auto j = minimal_grid();
    j["slack_bus"] = 7;
    CHECK_THROWS_AS(parse_grid(j), ConfigError);
  }
  SECTION("generator power bounds ordered") {
    auto j = minimal_grid();
    j["generators"][0]["p_min_mw"] = 30.0;
    CHECK_THROWS_AS(parse_grid(j), ConfigError);
  }
  SECTION("disconnected graph") {
    auto j = minimal_grid();
    j["buses"].push_back({{"id", 3}, {"area", 1}, {"load_mw", 1.0}});
    CHECK_THROWS_AS(parse_grid(j), ConfigError);
  }
  SECTION("vpp soc bounds") {
    auto j = minimal_grid();
    j["vpps"] = json::array({{{"id", "B"}, {"bus", 1}, {"kind", "bulk_battery"},
                              {"p_ch_max_mw", 1.0}, {"p_dis_max_mw", 1.0},
                              {"ramp_ch_mw_per_min", 1.0}, {"ramp_dis_mw_per_min", 1.0},
                              {"s_min_mwh", 2.0}, {"s_max_mwh", 1.0}, {"s0_mwh", 1.5}}});
    CHECK_THROWS_AS(parse_grid(j), ConfigError);
  }
}

TEST_CASE("missing grid file raises IoError") {
  CHECK_THROWS_AS(load_grid("networks/no_such_file.grid"), IoError);
}
