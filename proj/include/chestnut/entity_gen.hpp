#pragma once

// Edge-server and service population generators.

#include <cstdint>
#include <string>
#include <vector>

#include "chestnut/config.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/rng.hpp"
#include "chestnut/trace_ingest.hpp"

namespace chestnut {

struct EdgeServer {
  int id = 0;       // dense, 0-based, input order
  GeoPoint pos;
  int radius_m = 0; // great-circle coverage radius, [r_min, r_max]
  int supply_c = 1; // resource supply levels, [1, p]
  int supply_s = 1;
  int supply_b = 1;

  int supply_sum() const { return supply_c + supply_s + supply_b; }
};

struct ServiceSpec {
  int sid = 0;    // dense, 0-based
  int pref_c = 1; // resource preference levels, [1, p]
  int pref_s = 1;
  int pref_b = 1;

  int pref_sum() const { return pref_c + pref_s + pref_b; }
};

/// Keeps the stations inside the configured box, then draws a coverage
/// radius in [r_min, r_max] meters and three supply levels in [1, p] for
/// each. Ids follow the filtered input order.
inline std::vector<EdgeServer> make_servers(const std::vector<RawStationRecord>& stations,
                                            const SimConfig& cfg, uint64_t seed) {
  Rng rng = SeedTree{seed}.stream("servers");
  std::vector<EdgeServer> out;
  for (const RawStationRecord& st : stations) {
    if (st.pos.lat < cfg.phi_min || st.pos.lat > cfg.phi_max) continue;
    if (st.pos.lon < cfg.lambda_min || st.pos.lon > cfg.lambda_max) continue;
    EdgeServer e;
    e.id = static_cast<int>(out.size());
    e.pos = st.pos;
    e.radius_m = static_cast<int>(rng.uniform_int(cfg.r_min, cfg.r_max));
    e.supply_c = static_cast<int>(rng.uniform_int(1, cfg.p));
    e.supply_s = static_cast<int>(rng.uniform_int(1, cfg.p));
    e.supply_b = static_cast<int>(rng.uniform_int(1, cfg.p));
    out.push_back(e);
  }
  if (out.empty())
    throw ConfigError("no stations fall inside the configured lat/lon box");
  return out;
}

/// n_s services with three preference levels each in [1, p]. Services with
/// identical preference triples stay distinct through their sid.
inline std::vector<ServiceSpec> make_services(const SimConfig& cfg, uint64_t seed) {
  Rng rng = SeedTree{seed}.stream("services");
  std::vector<ServiceSpec> out;
  out.reserve(static_cast<size_t>(cfg.n_s));
  for (int sid = 0; sid < cfg.n_s; ++sid) {
    ServiceSpec s;
    s.sid = sid;
    s.pref_c = static_cast<int>(rng.uniform_int(1, cfg.p));
    s.pref_s = static_cast<int>(rng.uniform_int(1, cfg.p));
    s.pref_b = static_cast<int>(rng.uniform_int(1, cfg.p));
    out.push_back(s);
  }
  return out;
}

}  // namespace chestnut
