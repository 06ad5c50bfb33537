#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chestnut/mobility.hpp"
#include "chestnut/rng.hpp"

using namespace chestnut;

namespace {

RawGpsRecord rec(const char* vid, double t, double lon, double lat, double speed = 10.0,
                 double dir = 0.0) {
  return RawGpsRecord{vid, t, GeoPoint{lon, lat}, speed, dir};
}

UserSnapshot snap(long long t, double lon, double lat) {
  return UserSnapshot{-1, t, GeoPoint{lon, lat}, 0.0, 0.0};
}

// Window-by-window scan, written independently of align_vehicle: for
// each window [w*dt, (w+1)*dt) pick the last in-horizon record.
std::vector<UserSnapshot> brute_force_align(std::span<const RawGpsRecord> records,
                                            const SimConfig& cfg) {
  std::vector<UserSnapshot> out;
  if (records.empty()) return out;
  const double t0 = records.front().gps_time;
  const double last_local = records.back().gps_time - t0;
  for (long long w = 0; static_cast<double>(w) * cfg.delta_t <= last_local; ++w) {
    const double lo = static_cast<double>(w) * cfg.delta_t;
    const double hi = lo + cfg.delta_t;
    const RawGpsRecord* pick = nullptr;
    for (const RawGpsRecord& r : records) {
      const double local = r.gps_time - t0;
      if (local >= lo && local < hi && local < cfg.t_max) pick = &r;
    }
    if (pick)
      out.push_back(UserSnapshot{-1, w, pick->pos, pick->speed_kmh, pick->direction_deg});
  }
  return out;
}

}  // namespace

TEST_CASE("align: last record per window becomes the snapshot") {
  SimConfig cfg;
  cfg.delta_t = 30;
  const std::vector<RawGpsRecord> records = {
      rec("a", 1000, 121.40, 31.20),
      rec("a", 1010, 121.41, 31.21),
      rec("a", 1035, 121.42, 31.22),
  };
  const auto snaps = align_vehicle(records, cfg);
  REQUIRE(snaps.size() == 2);
  CHECK(snaps[0].t == 0);
  CHECK(snaps[0].pos == GeoPoint{121.41, 31.21}); // second 10 beats second 0
  CHECK(snaps[1].t == 1);
  CHECK(snaps[1].pos == GeoPoint{121.42, 31.22});
}

TEST_CASE("align: a single record becomes one snapshot at t = 0") {
  const auto snaps = align_vehicle(std::vector<RawGpsRecord>{rec("a", 500, 121.4, 31.2)},
                                   SimConfig{});
  REQUIRE(snaps.size() == 1);
  CHECK(snaps[0].t == 0);
}

TEST_CASE("align: records beyond the recording horizon are dropped") {
  SimConfig cfg; // delta_t = 30, t_max = 3600
  const std::vector<RawGpsRecord> records = {
      rec("a", 0, 121.40, 31.20),
      rec("a", cfg.t_max + 1, 121.41, 31.21), // past the horizon
      rec("a", cfg.t_max - 1, 121.42, 31.22),
  };
  // input must be time-sorted
  std::vector<RawGpsRecord> sorted = {records[0], records[2], records[1]};
  const auto snaps = align_vehicle(sorted, cfg);
  REQUIRE(snaps.size() == 2);
  CHECK(snaps.back().t == 119);
  CHECK(snaps.back().pos == GeoPoint{121.42, 31.22});
}

TEST_CASE("align: per-user timestamps are strictly increasing and unique") {
  const SimConfig cfg;
  const auto tracks = align(synth_traces(cfg, 15, 3), cfg);
  REQUIRE(!tracks.empty());
  for (const VehicleTrack& tr : tracks) {
    for (size_t i = 1; i < tr.snapshots.size(); ++i)
      REQUIRE(tr.snapshots[i].t > tr.snapshots[i - 1].t);
    REQUIRE(tr.snapshots.back().t <= cfg.max_timestamp());
  }
}

TEST_CASE("align: matches a brute-force window scan on tiny traces") {
  SimConfig cfg;
  cfg.delta_t = 30;
  cfg.t_max = 600;
  Rng rng(808);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<RawGpsRecord> records;
    double t = rng.uniform_real(0, 1000);
    const int n = static_cast<int>(rng.uniform_int(1, 20));
    for (int i = 0; i < n; ++i) {
      records.push_back(rec("veh", t, rng.uniform_real(121.3, 121.6), rng.uniform_real(31.1, 31.3),
                            rng.uniform_real(0, 60), rng.uniform_real(0, 360)));
      t += rng.uniform_real(1.0, 90.0);
    }
    const auto got = align_vehicle(records, cfg);
    const auto want = brute_force_align(records, cfg);
    REQUIRE(got == want);
  }
}

TEST_CASE("profile: covered stationary snapshot") {
  SimConfig cfg;
  const GeoPoint p{121.40, 31.20};
  std::vector<EdgeServer> servers(2);
  servers[0] = EdgeServer{0, GeoPoint{121.401, 31.20}, 1000, 1, 1, 1};
  servers[1] = EdgeServer{1, GeoPoint{121.40, 31.201}, 1000, 1, 1, 1};
  const std::vector<UserSnapshot> snaps = {snap(0, p.lon, p.lat)};
  const ActivityProfile prof = profile(snaps, servers, cfg.geo_constants());
  CHECK(prof.tau == 1);
  CHECK(prof.travel_m == 0.0);
  CHECK(prof.sum_omega == 2);
  CHECK(prof.sum_nu == 1);
}

TEST_CASE("profile: no servers means zero coverage sums") {
  const std::vector<UserSnapshot> snaps = {snap(0, 121.4, 31.2), snap(1, 121.5, 31.3)};
  const ActivityProfile prof = profile(snaps, {}, GeoConstants{});
  CHECK(prof.sum_omega == 0);
  CHECK(prof.sum_nu == 0);
  CHECK(prof.tau == 2);
}

TEST_CASE("profile: travel distance uses the great circle") {
  const std::vector<UserSnapshot> snaps = {snap(0, 0, 0), snap(1, 1, 0)};
  const ActivityProfile prof = profile(snaps, {}, GeoConstants{});
  CHECK_THAT(prof.travel_m, Catch::Matchers::WithinAbs(111194.93, 0.01));
}

TEST_CASE("select_users: descending lexicographic ranking, D breaks tau ties") {
  SimConfig cfg;
  cfg.n_u = 2;
  cfg.c_min = 1;
  std::vector<VehicleTrack> tracks = {
      {"short", {snap(0, 0, 0), snap(1, 0.01, 0)}},
      {"far", {snap(0, 0, 0), snap(1, 0.02, 0)}},
  };
  const auto users = select_users(tracks, {}, cfg);
  REQUIRE(users.size() == 2);
  CHECK(users[0].vehicle_id == "far");
  CHECK(users[0].uid == 0);
  CHECK(users[1].vehicle_id == "short");
  CHECK(users[1].uid == 1);
  for (const UserSnapshot& s : users[0].snapshots) CHECK(s.uid == 0);
}

TEST_CASE("select_users: ties beyond the tuple break on vehicle id") {
  SimConfig cfg;
  cfg.n_u = 2;
  cfg.c_min = 1;
  std::vector<VehicleTrack> tracks = {
      {"b", {snap(0, 0, 0), snap(1, 0.01, 0)}},
      {"a", {snap(0, 0, 0), snap(1, 0.01, 0)}},
  };
  const auto users = select_users(tracks, {}, cfg);
  CHECK(users[0].vehicle_id == "a");
  CHECK(users[1].vehicle_id == "b");
}

TEST_CASE("select_users: stationary runs longer than S are excluded") {
  SimConfig cfg;
  cfg.n_u = 1;
  cfg.c_min = 1;
  cfg.s_max = 3;
  std::vector<VehicleTrack> tracks = {
      // four consecutive identical fixes: run of 4 > S
      {"parked", {snap(0, 0, 0), snap(1, 0, 0), snap(2, 0, 0), snap(3, 0, 0), snap(4, 0.01, 0)}},
      {"moving", {snap(0, 0, 0), snap(1, 0.01, 0), snap(2, 0.02, 0)}},
  };
  const auto users = select_users(tracks, {}, cfg);
  REQUIRE(users.size() == 1);
  CHECK(users[0].vehicle_id == "moving");

  // a run of exactly S is fine
  cfg.n_u = 2;
  tracks[0].snapshots = {snap(0, 0, 0), snap(1, 0, 0), snap(2, 0, 0), snap(3, 0.01, 0)};
  const auto relaxed = select_users(tracks, {}, cfg);
  CHECK(relaxed.size() == 2);
}

TEST_CASE("select_users: fewer than C_min timestamps excludes the vehicle") {
  SimConfig cfg;
  cfg.n_u = 1;
  cfg.c_min = 3;
  std::vector<VehicleTrack> tracks = {
      {"sparse", {snap(0, 0, 0), snap(5, 0.01, 0)}}, // tau = c_min - 1
      {"dense", {snap(0, 0, 0), snap(1, 0.01, 0), snap(2, 0.02, 0)}},
  };
  const auto users = select_users(tracks, {}, cfg);
  REQUIRE(users.size() == 1);
  CHECK(users[0].vehicle_id == "dense");
}

TEST_CASE("select_users: shortfall is a selection error") {
  SimConfig cfg;
  cfg.n_u = 3;
  cfg.c_min = 1;
  std::vector<VehicleTrack> tracks = {
      {"a", {snap(0, 0, 0), snap(1, 0.01, 0)}},
      {"b", {snap(0, 0, 0), snap(1, 0.01, 0)}},
  };
  CHECK_THROWS_AS(select_users(tracks, {}, cfg), SelectionError);
}

TEST_CASE("select_users: selection is deterministic") {
  SimConfig cfg;
  cfg.n_u = 20;
  cfg.c_min = 2;
  const auto tracks = align(synth_traces(cfg, 40, 17), cfg);
  const auto once = select_users(tracks, {}, cfg);
  const auto twice = select_users(tracks, {}, cfg);
  REQUIRE(once.size() == twice.size());
  for (size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].vehicle_id == twice[i].vehicle_id);
    CHECK(once[i].uid == twice[i].uid);
  }
}

TEST_CASE("max_stationary_run respects the epsilon tolerance") {
  const std::vector<UserSnapshot> snaps = {snap(0, 0, 0), snap(1, 1e-9, 0), snap(2, 1, 0)};
  CHECK(max_stationary_run(snaps, 0.0) == 1);
  CHECK(max_stationary_run(snaps, 1e-6) == 2);
  CHECK(max_stationary_run({}, 0.0) == 0);
}
