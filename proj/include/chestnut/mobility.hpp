#pragma once

// Temporal alignment of raw traces onto system timestamps and selection
// of the most informative vehicles as users.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "chestnut/config.hpp"
#include "chestnut/entity_gen.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/geo.hpp"
#include "chestnut/trace_ingest.hpp"

namespace chestnut {

struct UserSnapshot {
  int uid = -1; // dense rank index; -1 until selection assigns it
  long long t = 0;
  GeoPoint pos;
  double speed_kmh = 0.0;
  double direction_deg = 0.0;

  friend bool operator==(const UserSnapshot&, const UserSnapshot&) = default;
};

struct VehicleTrack {
  std::string vehicle_id;
  std::vector<UserSnapshot> snapshots; // strictly increasing unique t
};

/// Eq.-1 ranking ingredients for one vehicle.
struct ActivityProfile {
  long long tau = 0;       // distinct timestamps
  double travel_m = 0.0;   // first-to-last great-circle distance (D)
  long long sum_omega = 0; // covering-server count summed over snapshots
  long long sum_nu = 0;    // snapshots covered by at least one server
};

struct SelectedUser {
  int uid = -1;
  std::string vehicle_id;
  ActivityProfile profile;
  std::vector<UserSnapshot> snapshots;
};

/// Aligns one vehicle's time-sorted records. Local time starts at the
/// vehicle's first record; window w covers [w*delta_t, (w+1)*delta_t) and
/// keeps its last record; records at or past t_max are out of the
/// system's recording horizon, so a vehicle holds at most
/// floor(t_max/delta_t) timestamps.
inline std::vector<UserSnapshot> align_vehicle(std::span<const RawGpsRecord> records,
                                               const SimConfig& cfg) {
  std::vector<UserSnapshot> out;
  if (records.empty()) return out;
  const double t0 = records.front().gps_time;
  for (const RawGpsRecord& r : records) {
    const double local = r.gps_time - t0;
    if (local < 0.0 || local >= cfg.t_max) continue;
    const long long w = static_cast<long long>(std::floor(local / cfg.delta_t));
    UserSnapshot snap{-1, w, r.pos, r.speed_kmh, r.direction_deg};
    if (!out.empty() && out.back().t == w) {
      out.back() = snap; // later record in the same window wins
    } else {
      out.push_back(snap);
    }
  }
  return out;
}

/// Groups a (vehicle_id, gps_time)-sorted record list and aligns each
/// vehicle. Vehicles with zero snapshots are skipped.
inline std::vector<VehicleTrack> align(const std::vector<RawGpsRecord>& records,
                                       const SimConfig& cfg) {
  std::vector<VehicleTrack> out;
  size_t begin = 0;
  while (begin < records.size()) {
    size_t end = begin + 1;
    while (end < records.size() && records[end].vehicle_id == records[begin].vehicle_id) ++end;
    auto snaps = align_vehicle(std::span(records).subspan(begin, end - begin), cfg);
    if (!snaps.empty())
      out.push_back(VehicleTrack{records[begin].vehicle_id, std::move(snaps)});
    begin = end;
  }
  return out;
}

/// Servers whose coverage radius reaches the point.
inline int covering_server_count(GeoPoint p, const std::vector<EdgeServer>& servers,
                                 const GeoConstants& gc) {
  int n = 0;
  for (const EdgeServer& e : servers)
    if (haversine(p, e.pos, gc) <= static_cast<double>(e.radius_m)) ++n;
  return n;
}

inline ActivityProfile profile(const std::vector<UserSnapshot>& snapshots,
                               const std::vector<EdgeServer>& servers,
                               const GeoConstants& gc = GeoConstants{}) {
  ActivityProfile p;
  p.tau = static_cast<long long>(snapshots.size());
  if (snapshots.empty()) return p;
  p.travel_m = haversine(snapshots.front().pos, snapshots.back().pos, gc);
  for (const UserSnapshot& s : snapshots) {
    const int omega = covering_server_count(s.pos, servers, gc);
    p.sum_omega += omega;
    if (omega >= 1) ++p.sum_nu;
  }
  return p;
}

/// Longest chain of consecutive snapshots whose coordinates agree within
/// `eps` degrees on both axes. A lone snapshot counts as a run of 1.
inline long long max_stationary_run(const std::vector<UserSnapshot>& snapshots, double eps) {
  long long best = snapshots.empty() ? 0 : 1;
  long long run = best;
  for (size_t i = 1; i < snapshots.size(); ++i) {
    const bool same = std::fabs(snapshots[i].pos.lon - snapshots[i - 1].pos.lon) <= eps &&
                      std::fabs(snapshots[i].pos.lat - snapshots[i - 1].pos.lat) <= eps;
    run = same ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

/// Descending lexicographic ranking on (tau, D, sum_omega, sum_nu); ties
/// fall back to ascending vehicle id so the order is total.
inline bool ranks_before(const ActivityProfile& a, const std::string& aid,
                         const ActivityProfile& b, const std::string& bid) {
  if (a.tau != b.tau) return a.tau > b.tau;
  if (a.travel_m != b.travel_m) return a.travel_m > b.travel_m;
  if (a.sum_omega != b.sum_omega) return a.sum_omega > b.sum_omega;
  if (a.sum_nu != b.sum_nu) return a.sum_nu > b.sum_nu;
  return aid < bid;
}

/// Drops vehicles that idle in place longer than S consecutive snapshots
/// or carry fewer than C_min timestamps, ranks the rest, keeps the top
/// N_u, and reindexes uids by rank.
inline std::vector<SelectedUser> select_users(const std::vector<VehicleTrack>& tracks,
                                              const std::vector<EdgeServer>& servers,
                                              const SimConfig& cfg) {
  const GeoConstants gc = cfg.geo_constants();
  std::vector<SelectedUser> survivors;
  for (const VehicleTrack& track : tracks) {
    if (track.snapshots.empty()) continue;
    if (max_stationary_run(track.snapshots, cfg.stationary_epsilon) > cfg.s_max) continue;
    if (static_cast<long long>(track.snapshots.size()) < cfg.c_min) continue;
    SelectedUser u;
    u.vehicle_id = track.vehicle_id;
    u.profile = profile(track.snapshots, servers, gc);
    u.snapshots = track.snapshots;
    survivors.push_back(std::move(u));
  }
  if (static_cast<int>(survivors.size()) < cfg.n_u)
    throw SelectionError("need n_u=" + std::to_string(cfg.n_u) + " users but only " +
                         std::to_string(survivors.size()) + " vehicles survived filtering (short by " +
                         std::to_string(cfg.n_u - static_cast<long long>(survivors.size())) + ")");
  std::sort(survivors.begin(), survivors.end(), [](const SelectedUser& a, const SelectedUser& b) {
    return ranks_before(a.profile, a.vehicle_id, b.profile, b.vehicle_id);
  });
  survivors.resize(static_cast<size_t>(cfg.n_u));
  for (size_t i = 0; i < survivors.size(); ++i) {
    survivors[i].uid = static_cast<int>(i);
    for (UserSnapshot& s : survivors[i].snapshots) s.uid = static_cast<int>(i);
  }
  return survivors;
}

}  // namespace chestnut
