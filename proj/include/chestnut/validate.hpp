#pragma once

// Re-checks every dataset invariant from the emitted files alone:
// schema, ranges, uniqueness, coverage, positivity and manifest counts.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chestnut/dataset_io.hpp"

namespace chestnut {

inline std::vector<std::string> validate_output(const fs::path& dir) {
  std::vector<std::string> violations;
  LoadedDataset d;
  try {
    d = load_dataset(dir);
  } catch (const std::exception& e) {
    violations.push_back(e.what());
    return violations;
  }
  const SimConfig& cfg = d.cfg;
  const GeoConstants gc = cfg.geo_constants();
  auto flag = [&](const std::string& msg) { violations.push_back(msg); };

  // servers
  for (size_t i = 0; i < d.servers.size(); ++i) {
    const EdgeServer& e = d.servers[i];
    if (e.id != static_cast<int>(i)) flag("servers.csv: ids are not dense at row " + std::to_string(i));
    if (e.radius_m < cfg.r_min || e.radius_m > cfg.r_max)
      flag("servers.csv: radius out of range for id " + std::to_string(e.id));
    for (const int s : {e.supply_c, e.supply_s, e.supply_b})
      if (s < 1 || s > cfg.p) flag("servers.csv: supply level out of range for id " + std::to_string(e.id));
    if (e.pos.lat < cfg.phi_min || e.pos.lat > cfg.phi_max || e.pos.lon < cfg.lambda_min ||
        e.pos.lon > cfg.lambda_max)
      flag("servers.csv: position outside the box for id " + std::to_string(e.id));
  }

  // services
  for (size_t i = 0; i < d.services.size(); ++i) {
    const ServiceSpec& s = d.services[i];
    if (s.sid != static_cast<int>(i)) flag("services.csv: sids are not dense at row " + std::to_string(i));
    for (const int v : {s.pref_c, s.pref_s, s.pref_b})
      if (v < 1 || v > cfg.p) flag("services.csv: preference out of range for sid " + std::to_string(s.sid));
  }

  // users
  const long long t_cap = cfg.max_timestamp();
  std::set<int> uids;
  size_t snapshot_rows = 0;
  for (const SelectedUser& u : d.users) {
    uids.insert(u.uid);
    snapshot_rows += u.snapshots.size();
    long long prev_t = -1;
    for (const UserSnapshot& s : u.snapshots) {
      if (s.t <= prev_t)
        flag("users.csv: timestamps not strictly increasing for uid " + std::to_string(u.uid));
      prev_t = s.t;
      if (s.t < 0 || s.t > t_cap)
        flag("users.csv: timestamp out of range for uid " + std::to_string(u.uid));
      if (s.speed_kmh < 0) flag("users.csv: negative speed for uid " + std::to_string(u.uid));
    }
  }
  if (uids.size() != static_cast<size_t>(cfg.n_u))
    flag("users.csv: expected " + std::to_string(cfg.n_u) + " distinct uids, found " +
         std::to_string(uids.size()));
  if (!uids.empty() && (*uids.begin() != 0 || *uids.rbegin() != cfg.n_u - 1))
    flag("users.csv: uids are not the dense range 0..n_u-1");

  // loads
  const double rho_tol = 1e-6; // percent column carries 4 decimals
  std::set<std::pair<long long, int>> load_keys;
  for (const LoadRow& r : d.loads) {
    if (!load_keys.insert({r.t, r.eid}).second)
      flag("loads.csv: duplicate (timestamp, eid) = (" + std::to_string(r.t) + ", " +
           std::to_string(r.eid) + ")");
    if (r.eid < 0 || r.eid >= static_cast<int>(d.servers.size()))
      flag("loads.csv: unknown eid " + std::to_string(r.eid));
    for (const double rho : {r.rho.c, r.rho.s, r.rho.b})
      if (rho < cfg.rho_min - rho_tol || rho > cfg.rho_max + rho_tol)
        flag("loads.csv: utilization outside [rho_min, rho_max] at (t=" + std::to_string(r.t) +
             ", eid=" + std::to_string(r.eid) + ")");
  }

  // invocations
  std::map<std::pair<int, long long>, const UserSnapshot*> snap_at;
  for (const SelectedUser& u : d.users)
    for (const UserSnapshot& s : u.snapshots) snap_at[{u.uid, s.t}] = &s;
  std::set<std::tuple<int, int, int, long long>> invocation_keys;
  for (const InvocationRow& r : d.invocations) {
    if (!invocation_keys.insert({r.uid, r.eid, r.sid, r.t}).second)
      flag("invocations.csv: duplicate (uid, eid, sid, timestamp)");
    if (r.rt <= 0) flag("invocations.csv: non-positive rt");
    if (r.nj <= 0) flag("invocations.csv: non-positive nj");
    if (r.sid < 0 || r.sid >= static_cast<int>(d.services.size()))
      flag("invocations.csv: unknown sid " + std::to_string(r.sid));
    if (r.eid < 0 || r.eid >= static_cast<int>(d.servers.size())) {
      flag("invocations.csv: unknown eid " + std::to_string(r.eid));
      continue;
    }
    const auto it = snap_at.find({r.uid, r.t});
    if (it == snap_at.end()) {
      flag("invocations.csv: no user snapshot for (uid=" + std::to_string(r.uid) +
           ", t=" + std::to_string(r.t) + ")");
      continue;
    }
    const EdgeServer& e = d.servers[static_cast<size_t>(r.eid)];
    if (haversine(it->second->pos, e.pos, gc) > static_cast<double>(e.radius_m))
      flag("invocations.csv: server " + std::to_string(r.eid) + " does not cover uid " +
           std::to_string(r.uid) + " at t=" + std::to_string(r.t));
  }

  // manifest counts
  auto check_count = [&](const char* name, size_t expected, size_t actual) {
    if (expected != actual)
      flag(std::string("manifest count mismatch for ") + name + ": manifest says " +
           std::to_string(expected) + ", files hold " + std::to_string(actual));
  };
  check_count("users", d.counts.users, uids.size());
  check_count("servers", d.counts.servers, d.servers.size());
  check_count("services", d.counts.services, d.services.size());
  check_count("invocations", d.counts.invocations, d.invocations.size());
  check_count("snapshots", d.counts.snapshots, snapshot_rows);
  check_count("load_rows", d.counts.load_rows, d.loads.size());
  return violations;
}

}  // namespace chestnut
