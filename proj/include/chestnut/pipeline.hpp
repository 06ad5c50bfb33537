#pragma once

// End-to-end generation: entities -> mobility -> per-timestamp
// assignment and load stepping -> raw components -> dataset-wide
// normalization -> perturbation -> final QoS values.
//
// Pass 1 walks timestamps in order because load states carry across t;
// pass 2 needs whole columns, so raw components stay buffered in memory.

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chestnut/config.hpp"
#include "chestnut/entity_gen.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/load_sim.hpp"
#include "chestnut/mobility.hpp"
#include "chestnut/perturbation.hpp"
#include "chestnut/qos_model.hpp"
#include "chestnut/rng.hpp"
#include "chestnut/trace_ingest.hpp"

namespace chestnut {

struct InvocationRecord {
  int uid = -1;
  int eid = -1;
  int sid = -1;
  long long t = 0;

  // snapshot context
  GeoPoint user_pos;
  double speed_kmh = 0.0;
  double direction_deg = 0.0;
  size_t user_snap_index = 0; // position within the user's snapshot vector

  // raw delay components (pass 1)
  double pg_req = 0.0;     // s
  double uplink = 0.0;     // model units
  double queueing = 0.0;   // model units
  double processing = 0.0; // model units
  double downlink = 0.0;   // model units
  RawJitterFactors factors;

  // correlation context
  int service_pref_sum = 0;
  int server_supply_sum = 0;
  double server_load_mean = 0.0;

  // derived values (pass 2)
  double sd = 0.0;          // s
  double pg_rep = 0.0;      // s
  double rt_base = 0.0;     // s, before perturbation
  double jitter_base = 0.0; // ms, before perturbation
  double delta_edge = 0.0;
  double delta_time = 0.0;
  double rt = 0.0; // s, final Q_rt
  double nj = 0.0; // ms, final Q_nj
};

struct LoadRow {
  long long t = 0;
  int eid = 0;
  UtilTriple rho;
};

struct NormalizationBounds {
  ColumnBounds uplink, queueing, processing, downlink, delay_sum;
  ColumnBounds dist_ratio, dir_change, bw_ratio, speed, jitter_score;
};

struct RunInputs {
  std::vector<RawGpsRecord> gps;
  std::vector<RawStationRecord> stations;
  size_t gps_dropped = 0;
  size_t stations_dropped = 0;
};

struct RunResult {
  SimConfig cfg;
  std::vector<EdgeServer> servers;
  std::vector<ServiceSpec> services;
  std::vector<SelectedUser> users;
  std::vector<LoadRow> loads;
  std::vector<InvocationRecord> records;
  NormalizationBounds bounds;
  long long max_t = 0; // last simulated timestamp
  size_t gps_dropped = 0;
  size_t stations_dropped = 0;
  double perturb_raw_min = 0.0;
  double perturb_raw_max = 0.0;
};

/// Synthetic substitute inputs derived from the run seed.
inline RunInputs synth_inputs(const SimConfig& cfg) {
  RunInputs in;
  in.gps = synth_traces(cfg, cfg.synth_vehicles, cfg.seed);
  in.stations = synth_stations(cfg, cfg.synth_stations, cfg.seed);
  return in;
}

/// One user snapshot scheduled at its timestamp.
struct SnapshotRef {
  int uid = 0;
  size_t index = 0; // position within the user's snapshot vector
};

/// Per-snapshot service/server choices for one timestamp.
/// In `full` mode every service is invoked once; in `sampled` mode
/// `services_per_snapshot` distinct services are drawn. Each chosen
/// service goes to an independently drawn covering server.
inline void assign_invocations(std::vector<InvocationRecord>& out, long long t,
                               std::span<const SnapshotRef> due,
                               const std::vector<SelectedUser>& users,
                               const std::vector<std::vector<int>>& covering,
                               const SimConfig& cfg, Rng& rng) {
  for (size_t d = 0; d < due.size(); ++d) {
    const SnapshotRef& ref = due[d];
    const std::vector<int>& cover = covering[d];
    if (cover.empty()) continue;
    std::set<int> sids;
    if (cfg.mode == InvocationMode::full ||
        cfg.services_per_snapshot >= cfg.n_s) {
      for (int sid = 0; sid < cfg.n_s; ++sid) sids.insert(sid);
    } else {
      while (static_cast<int>(sids.size()) < cfg.services_per_snapshot)
        sids.insert(static_cast<int>(rng.uniform_int(0, cfg.n_s - 1)));
    }
    const UserSnapshot& snap = users[static_cast<size_t>(ref.uid)].snapshots[ref.index];
    for (const int sid : sids) {
      const int eid = cover[static_cast<size_t>(rng.uniform_int(
          0, static_cast<int64_t>(cover.size()) - 1))];
      InvocationRecord rec;
      rec.uid = ref.uid;
      rec.eid = eid;
      rec.sid = sid;
      rec.t = t;
      rec.user_pos = snap.pos;
      rec.speed_kmh = snap.speed_kmh;
      rec.direction_deg = snap.direction_deg;
      rec.user_snap_index = ref.index;
      out.push_back(rec);
    }
  }
}

namespace detail {

inline std::vector<double> column(const std::vector<InvocationRecord>& recs,
                                  double InvocationRecord::* field) {
  std::vector<double> out;
  out.reserve(recs.size());
  for (const InvocationRecord& r : recs) out.push_back(r.*field);
  return out;
}

}  // namespace detail

inline RunResult run(const SimConfig& cfg, RunInputs inputs) {
  validate(cfg);
  const GeoConstants gc = cfg.geo_constants();
  const SeedTree tree{cfg.seed};

  RunResult res;
  res.cfg = cfg;
  res.gps_dropped = inputs.gps_dropped;
  res.stations_dropped = inputs.stations_dropped;
  res.servers = make_servers(inputs.stations, cfg, cfg.seed);
  res.services = make_services(cfg, cfg.seed);
  res.users = select_users(align(inputs.gps, cfg), res.servers, cfg);

  // schedule snapshots by timestamp
  long long max_t = 0;
  for (const SelectedUser& u : res.users)
    for (const UserSnapshot& s : u.snapshots) max_t = std::max(max_t, s.t);
  res.max_t = max_t;
  std::vector<std::vector<SnapshotRef>> due(static_cast<size_t>(max_t + 1));
  for (const SelectedUser& u : res.users)
    for (size_t i = 0; i < u.snapshots.size(); ++i)
      due[static_cast<size_t>(u.snapshots[i].t)].push_back(SnapshotRef{u.uid, i});

  // per-server load streams and states
  std::vector<Rng> load_rngs;
  std::vector<LoadState> states;
  load_rngs.reserve(res.servers.size());
  states.reserve(res.servers.size());
  for (const EdgeServer& e : res.servers) {
    load_rngs.push_back(tree.stream("load", static_cast<uint64_t>(e.id)));
    states.push_back(make_initial_state(e.id, cfg, load_rngs.back()));
  }

  res.loads.reserve(res.servers.size() * static_cast<size_t>(max_t + 1));
  for (long long t = 0; t <= max_t; ++t) {
    for (LoadState& st : states) {
      start_of_step_disturbance(st, cfg, load_rngs[static_cast<size_t>(st.eid)]);
      res.loads.push_back(LoadRow{t, st.eid, st.rho});
    }

    // covering servers per due snapshot
    const auto& snaps = due[static_cast<size_t>(t)];
    std::vector<std::vector<int>> covering(snaps.size());
    for (size_t d = 0; d < snaps.size(); ++d) {
      const UserSnapshot& s =
          res.users[static_cast<size_t>(snaps[d].uid)].snapshots[snaps[d].index];
      for (const EdgeServer& e : res.servers)
        if (haversine(s.pos, e.pos, gc) <= static_cast<double>(e.radius_m))
          covering[d].push_back(e.id);
    }

    Rng assign_rng = tree.stream("assign", static_cast<uint64_t>(t));
    const size_t first_new = res.records.size();
    assign_invocations(res.records, t, snaps, res.users, covering, cfg, assign_rng);

    // demand totals and arrival lists drive this timestamp's components
    std::map<int, DemandTotals> demand;
    std::map<int, std::vector<ServiceSpec>> arrivals;
    for (size_t i = first_new; i < res.records.size(); ++i) {
      const InvocationRecord& rec = res.records[i];
      const ServiceSpec& svc = res.services[static_cast<size_t>(rec.sid)];
      demand[rec.eid].add(svc);
      arrivals[rec.eid].push_back(svc);
    }

    for (size_t i = first_new; i < res.records.size(); ++i) {
      InvocationRecord& rec = res.records[i];
      const EdgeServer& server = res.servers[static_cast<size_t>(rec.eid)];
      const ServiceSpec& svc = res.services[static_cast<size_t>(rec.sid)];
      const LoadState& st = states[static_cast<size_t>(rec.eid)];
      const SelectedUser& user = res.users[static_cast<size_t>(rec.uid)];

      rec.pg_req = request_propagation(rec.user_pos, server.pos, gc);
      const double packet = packet_size_mb(svc.pref_b, cfg);
      const double share = uplink_share_mbps(server, st, arrivals[rec.eid], svc, cfg);
      const TransmissionDelays td = transmission_delays(packet, share, st, server, cfg);
      rec.uplink = td.uplink;
      rec.downlink = td.downlink;
      rec.queueing = queueing_delay(st);
      rec.processing = processing_delay(server, svc, st);

      const std::span<const UserSnapshot> history(user.snapshots.data(),
                                                  rec.user_snap_index + 1);
      rec.factors = jitter_factors(history, st, server, svc, cfg);

      rec.service_pref_sum = svc.pref_sum();
      rec.server_supply_sum = server.supply_sum();
      rec.server_load_mean = (st.rho.c + st.rho.s + st.rho.b) / 3.0;
    }

    for (LoadState& st : states) {
      const auto it = demand.find(st.eid);
      step_load(st, res.servers[static_cast<size_t>(st.eid)],
                it == demand.end() ? DemandTotals{} : it->second, cfg,
                load_rngs[static_cast<size_t>(st.eid)]);
    }
  }

  if (res.records.empty()) return res; // nothing to normalize or perturb

  // pass 2: dataset-wide normalization, shaping, perturbation
  auto& recs = res.records;
  res.bounds.uplink = column_bounds(detail::column(recs, &InvocationRecord::uplink));
  res.bounds.queueing = column_bounds(detail::column(recs, &InvocationRecord::queueing));
  res.bounds.processing = column_bounds(detail::column(recs, &InvocationRecord::processing));
  res.bounds.downlink = column_bounds(detail::column(recs, &InvocationRecord::downlink));

  std::vector<double> delay_sum;
  delay_sum.reserve(recs.size());
  for (const InvocationRecord& r : recs)
    delay_sum.push_back(minmax_value(r.uplink, res.bounds.uplink) +
                        minmax_value(r.queueing, res.bounds.queueing) +
                        minmax_value(r.processing, res.bounds.processing) +
                        minmax_value(r.downlink, res.bounds.downlink));
  res.bounds.delay_sum = column_bounds(delay_sum);

  std::vector<double> dist, dir, bw, speed;
  dist.reserve(recs.size());
  dir.reserve(recs.size());
  bw.reserve(recs.size());
  speed.reserve(recs.size());
  for (const InvocationRecord& r : recs) {
    dist.push_back(r.factors.dist_ratio);
    dir.push_back(r.factors.dir_change);
    bw.push_back(r.factors.bw_ratio);
    speed.push_back(r.factors.speed_kmh);
  }
  res.bounds.dist_ratio = column_bounds(dist);
  res.bounds.dir_change = column_bounds(dir);
  res.bounds.bw_ratio = column_bounds(bw);
  res.bounds.speed = column_bounds(speed);

  std::vector<double> scores;
  scores.reserve(recs.size());
  for (size_t i = 0; i < recs.size(); ++i)
    scores.push_back(jitter_score(recs[i].factors,
                                  minmax_value(dist[i], res.bounds.dist_ratio),
                                  minmax_value(dir[i], res.bounds.dir_change),
                                  minmax_value(bw[i], res.bounds.bw_ratio),
                                  minmax_value(speed[i], res.bounds.speed)));
  res.bounds.jitter_score = column_bounds(scores);

  std::set<IdTriple> triple_set;
  for (const InvocationRecord& r : recs) triple_set.insert(IdTriple{r.uid, r.eid, r.sid});
  const std::vector<IdTriple> triples(triple_set.begin(), triple_set.end());
  const PerturbationModel perturb =
      PerturbationModel::fit(triples, cfg.n_u, static_cast<int>(res.servers.size()),
                             cfg.n_s, tree.stream("perturbation"));
  res.perturb_raw_min = perturb.raw_min();
  res.perturb_raw_max = perturb.raw_max();

  for (size_t i = 0; i < recs.size(); ++i) {
    InvocationRecord& r = recs[i];
    r.sd = simulation_delay(minmax_value(delay_sum[i], res.bounds.delay_sum), cfg);
    UserSnapshot snap;
    snap.pos = r.user_pos;
    snap.speed_kmh = r.speed_kmh;
    snap.direction_deg = r.direction_deg;
    r.pg_rep = response_propagation(snap, r.pg_req, r.sd, cfg);
    r.rt_base = response_time(r.pg_req, r.sd, r.pg_rep);
    r.jitter_base = network_jitter(minmax_value(scores[i], res.bounds.jitter_score), cfg);
    r.delta_edge = perturb.delta(r.uid, r.eid, r.sid);
    r.delta_time = time_perturbation(static_cast<double>(r.t));
    const QosPair q = finalize_qos(r.rt_base, r.jitter_base, r.delta_edge, r.delta_time);
    r.rt = q.rt;
    r.nj = q.nj;
  }
  return res;
}

}  // namespace chestnut
