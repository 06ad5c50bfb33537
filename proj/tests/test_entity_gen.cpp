#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "chestnut/entity_gen.hpp"

using namespace chestnut;

TEST_CASE("make_servers: stations outside the box are excluded") {
  SimConfig cfg;
  const std::vector<RawStationRecord> stations = {
      {GeoPoint{121.392643, 31.24583}}, // inside
      {GeoPoint{120.0, 31.2}},          // west of the box
      {GeoPoint{121.4, 30.0}},          // south of the box
      {GeoPoint{121.5, 31.30}},         // inside
  };
  const auto servers = make_servers(stations, cfg, 1);
  REQUIRE(servers.size() == 2);
  CHECK(servers[0].id == 0);
  CHECK(servers[0].pos == GeoPoint{121.392643, 31.24583});
  CHECK(servers[1].id == 1);
  CHECK(servers[1].pos == GeoPoint{121.5, 31.30});
}

TEST_CASE("make_servers: rows have the sample-data shape") {
  SimConfig cfg;
  const auto servers =
      make_servers({{GeoPoint{121.392643, 31.24583}}}, cfg, 123);
  REQUIRE(servers.size() == 1);
  const EdgeServer& e = servers[0];
  CHECK(e.id == 0);
  CHECK(e.pos.lon == 121.392643);
  CHECK(e.pos.lat == 31.24583);
  CHECK(e.radius_m >= cfg.r_min);
  CHECK(e.radius_m <= cfg.r_max);
  for (const int s : {e.supply_c, e.supply_s, e.supply_b}) {
    CHECK(s >= 1);
    CHECK(s <= cfg.p);
  }
}

TEST_CASE("make_servers: degenerate p pins every level to 1") {
  SimConfig cfg;
  cfg.p = 1;
  const auto servers = make_servers({{GeoPoint{121.4, 31.2}}, {GeoPoint{121.5, 31.3}}}, cfg, 9);
  for (const EdgeServer& e : servers) {
    CHECK(e.supply_c == 1);
    CHECK(e.supply_s == 1);
    CHECK(e.supply_b == 1);
  }
}

TEST_CASE("make_servers: an empty box is a configuration error") {
  CHECK_THROWS_AS(make_servers({{GeoPoint{0.0, 0.0}}}, SimConfig{}, 1), ConfigError);
  CHECK_THROWS_AS(make_servers({}, SimConfig{}, 1), ConfigError);
}

TEST_CASE("make_services: count, id density, degenerate cases") {
  SimConfig cfg;
  cfg.n_s = 1;
  CHECK(make_services(cfg, 3).size() == 1);

  cfg.n_s = 5;
  cfg.p = 1;
  const auto services = make_services(cfg, 3);
  REQUIRE(services.size() == 5);
  for (size_t i = 0; i < services.size(); ++i) {
    CHECK(services[i].sid == static_cast<int>(i)); // identical triples, distinct sids
    CHECK(services[i].pref_c == 1);
    CHECK(services[i].pref_s == 1);
    CHECK(services[i].pref_b == 1);
  }
}

TEST_CASE("entity generation is deterministic in (inputs, cfg, seed)") {
  SimConfig cfg;
  cfg.n_s = 64;
  const std::vector<RawStationRecord> stations = {{GeoPoint{121.4, 31.2}},
                                                  {GeoPoint{121.5, 31.3}},
                                                  {GeoPoint{121.6, 31.35}}};
  const auto s1 = make_servers(stations, cfg, 77);
  const auto s2 = make_servers(stations, cfg, 77);
  REQUIRE(s1.size() == s2.size());
  for (size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1[i].radius_m == s2[i].radius_m);
    CHECK(s1[i].supply_c == s2[i].supply_c);
    CHECK(s1[i].supply_s == s2[i].supply_s);
    CHECK(s1[i].supply_b == s2[i].supply_b);
  }
  const auto v1 = make_services(cfg, 77);
  const auto v2 = make_services(cfg, 77);
  for (size_t i = 0; i < v1.size(); ++i) {
    CHECK(v1[i].pref_c == v2[i].pref_c);
    CHECK(v1[i].pref_s == v2[i].pref_s);
    CHECK(v1[i].pref_b == v2[i].pref_b);
  }
}

TEST_CASE("levels are uniform over [1, p] within 3 sigma") {
  SimConfig cfg;
  cfg.p = 5;
  cfg.n_s = 10000;
  const auto services = make_services(cfg, 2024);

  const double expected = static_cast<double>(cfg.n_s) / cfg.p;
  const double sigma = std::sqrt(cfg.n_s * (1.0 / cfg.p) * (1.0 - 1.0 / cfg.p));
  std::array<std::array<int, 6>, 3> counts{}; // component x level
  for (const ServiceSpec& s : services) {
    ++counts[0][static_cast<size_t>(s.pref_c)];
    ++counts[1][static_cast<size_t>(s.pref_s)];
    ++counts[2][static_cast<size_t>(s.pref_b)];
  }
  for (const auto& component : counts)
    for (int level = 1; level <= cfg.p; ++level)
      CHECK(std::fabs(component[static_cast<size_t>(level)] - expected) <= 3.0 * sigma);
}
