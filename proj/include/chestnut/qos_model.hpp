#pragma once

// Response-time components, network-jitter factors, dataset-wide
// min-max regularization and the tanh shaping that anchors both QoS
// outputs to their base scales.

#include <cmath>
#include <span>
#include <vector>

#include "chestnut/config.hpp"
#include "chestnut/entity_gen.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/geo.hpp"
#include "chestnut/load_sim.hpp"
#include "chestnut/mobility.hpp"

namespace chestnut {

/// Radio propagation time between user and server, seconds.
inline double request_propagation(GeoPoint user_pos, GeoPoint server_pos,
                                  const GeoConstants& gc = GeoConstants{}) {
  return haversine(user_pos, server_pos, gc) / gc.speed_of_light;
}

/// Packet size for a bandwidth preference level: b_c * 4^(level-1) MB.
inline double packet_size_mb(int bw_pref_level, const SimConfig& cfg) {
  if (bw_pref_level < 1 || bw_pref_level > cfg.p)
    throw ModelError("bandwidth preference level " + std::to_string(bw_pref_level) +
                     " outside [1, " + std::to_string(cfg.p) + "]");
  return cfg.b_c * std::pow(4.0, bw_pref_level - 1);
}

/// Nominal bandwidth for a supply level: b_e * 4^(level-1) Mbps.
inline double server_bandwidth_mbps(int bw_supply_level, const SimConfig& cfg) {
  if (bw_supply_level < 1 || bw_supply_level > cfg.p)
    throw ModelError("bandwidth supply level " + std::to_string(bw_supply_level) +
                     " outside [1, " + std::to_string(cfg.p) + "]");
  return cfg.b_e * std::pow(4.0, bw_supply_level - 1);
}

/// Bandwidth still uncommitted at the start of the timestamp, Mbps.
inline double remaining_bandwidth_mbps(const EdgeServer& e, const UtilTriple& rho,
                                       const SimConfig& cfg) {
  return (1.0 - rho.b) * server_bandwidth_mbps(e.supply_b, cfg);
}

/// Splits the remaining bandwidth across the services arriving at the
/// server this timestamp, inversely proportional to packet size.
inline double uplink_share_mbps(const EdgeServer& server, const LoadState& state,
                                std::span<const ServiceSpec> arrivals,
                                const ServiceSpec& target, const SimConfig& cfg) {
  if (arrivals.empty()) throw ModelError("uplink share requested with no arrivals");
  double inv_sum = 0.0;
  bool target_present = false;
  for (const ServiceSpec& s : arrivals) {
    inv_sum += 1.0 / packet_size_mb(s.pref_b, cfg);
    if (s.sid == target.sid) target_present = true;
  }
  if (!target_present) throw ModelError("target service is not among the arrivals");
  const double bw = remaining_bandwidth_mbps(server, state.rho, cfg);
  return bw * (1.0 / packet_size_mb(target.pref_b, cfg)) / inv_sum;
}

struct TransmissionDelays {
  double uplink = 0.0;   // U_i, model units (8L / shared Mbps)
  double downlink = 0.0; // D_i, model units (exclusive return path)
};

/// Uplink uses the shared allocation; the return packet is transmitted
/// serially, one service at a time, over the server's own bandwidth.
inline TransmissionDelays transmission_delays(double packet_mb, double up_share_mbps,
                                              const LoadState& state, const EdgeServer& server,
                                              const SimConfig& cfg) {
  TransmissionDelays d;
  d.uplink = 8.0 * packet_mb / up_share_mbps;
  if (cfg.downlink_denominator == DownlinkDenominator::full_bandwidth) {
    d.downlink = 8.0 * packet_mb / server_bandwidth_mbps(server.supply_b, cfg);
  } else {
    d.downlink = 8.0 * packet_mb / state.rho.b; // literal variant: utilization as the divisor
  }
  return d;
}

/// M/M/1 waiting time summed over the three resource queues. The service
/// rate mu = exp(-mean |delta rho|) shrinks when the recent load window
/// is volatile; rho stays below 1 by the clamp, so 1 - rho > 0.
inline double queueing_delay(const LoadState& state) {
  const UtilTriple deltas = mean_abs_deltas(state.history);
  auto wait = [](double rho, double delta) {
    const double mu = std::exp(-delta);
    return rho / (mu * (1.0 - rho));
  };
  return wait(state.rho.c, deltas.c) + wait(state.rho.s, deltas.s) +
         wait(state.rho.b, deltas.b);
}

/// Supply/demand compatibility terms: the scarcer the remaining resource
/// relative to the service's preference, the longer the processing.
inline double processing_delay(const EdgeServer& server, const ServiceSpec& service,
                               const LoadState& state) {
  const double m_c = server.supply_c * (1.0 - state.rho.c) / service.pref_c;
  const double m_s = server.supply_s * (1.0 - state.rho.s) / service.pref_s;
  return (1.0 / m_c) * (1.0 + state.rho.c) + (1.0 / m_s) * (1.0 + state.rho.s);
}

struct ColumnBounds {
  double min = 0.0;
  double max = 0.0;

  bool constant() const { return max == min; }
};

inline ColumnBounds column_bounds(std::span<const double> column) {
  if (column.empty()) throw ModelError("min-max normalization over an empty column");
  ColumnBounds b{column.front(), column.front()};
  for (const double v : column) {
    b.min = std::min(b.min, v);
    b.max = std::max(b.max, v);
  }
  return b;
}

/// (x - min) / (max - min); a constant column maps to all zeros.
inline double minmax_value(double v, const ColumnBounds& b) {
  if (b.constant()) return 0.0;
  return (v - b.min) / (b.max - b.min);
}

inline std::vector<double> minmax_normalize(std::span<const double> column) {
  const ColumnBounds b = column_bounds(column);
  std::vector<double> out;
  out.reserve(column.size());
  for (const double v : column) out.push_back(minmax_value(v, b));
  return out;
}

/// (tanh(4m - 2) + 1) * theta, mapping m in [0,1] into
/// ((1 - tanh 2) theta, (1 + tanh 2) theta).
inline double tanh_shape(double normalized, double theta) {
  return (std::tanh(4.0 * normalized - 2.0) + 1.0) * theta;
}

/// Simulation delay in seconds from the normalized component sum.
inline double simulation_delay(double normalized_component_sum, const SimConfig& cfg) {
  return tanh_shape(normalized_component_sum, cfg.theta_rt);
}

/// Dead-reckons where the user will be after pg_req + sd seconds at the
/// snapshot speed/heading, and prices the return trip from the user's
/// original position to that predicted point.
inline double response_propagation(const UserSnapshot& snap, double pg_req_s, double sd_s,
                                   const SimConfig& cfg) {
  const GeoConstants gc = cfg.geo_constants();
  const double v_mps = snap.speed_kmh * (1000.0 / 3600.0);
  const double d = v_mps * (pg_req_s + sd_s);
  const GeoPoint predicted =
      extrapolate(snap.pos, snap.direction_deg, d, cfg.bearing_convention, gc);
  return haversine(snap.pos, predicted, gc) / gc.speed_of_light;
}

inline double response_time(double pg_req_s, double sd_s, double pg_rep_s) {
  return pg_req_s + sd_s + pg_rep_s;
}

struct RawJitterFactors {
  double trend = 0.0;      // signed bandwidth-load drift over the window
  double dist_ratio = 0.0; // user-server distance / coverage radius
  double dir_change = 0.0; // mean |heading change| over the user's window, deg
  double bw_ratio = 0.0;   // service bandwidth preference / remaining supply level
  double speed_kmh = 0.0;
};

/// Mean absolute heading change over the user's most recent
/// min(k, available) snapshots; zero with fewer than two.
inline double direction_change_mean(std::span<const UserSnapshot> snapshots_upto_now, int k) {
  const size_t n = snapshots_upto_now.size();
  const size_t window = std::min(n, static_cast<size_t>(k));
  if (window < 2) return 0.0;
  const auto w = snapshots_upto_now.subspan(n - window);
  double acc = 0.0;
  for (size_t i = 1; i < w.size(); ++i)
    acc += std::fabs(w[i].direction_deg - w[i - 1].direction_deg);
  return acc / static_cast<double>(w.size() - 1);
}

inline RawJitterFactors jitter_factors(std::span<const UserSnapshot> user_history,
                                       const LoadState& state, const EdgeServer& server,
                                       const ServiceSpec& service, const SimConfig& cfg) {
  const GeoConstants gc = cfg.geo_constants();
  const UserSnapshot& snap = user_history.back();
  RawJitterFactors f;
  f.trend = bandwidth_trend(state.history);
  f.dist_ratio = haversine(snap.pos, server.pos, gc) / static_cast<double>(server.radius_m);
  f.dir_change = direction_change_mean(user_history, cfg.k);
  f.bw_ratio = service.pref_b / remaining_supply(state, server).b;
  f.speed_kmh = snap.speed_kmh;
  return f;
}

/// e^(1 + trend) * (M(dist) + M(dir) + M(bw) + M(speed)).
inline double jitter_score(const RawJitterFactors& f, double m_dist, double m_dir,
                           double m_bw, double m_speed) {
  return std::exp(1.0 + f.trend) * (m_dist + m_dir + m_bw + m_speed);
}

/// Network jitter in milliseconds from the normalized jitter score.
inline double network_jitter(double normalized_score, const SimConfig& cfg) {
  return tanh_shape(normalized_score, cfg.theta_nj);
}

/// Sine-of-timestamp perturbation with period 4*pi, in [0, 0.2].
inline double time_perturbation(double t) {
  return 0.1 * (std::sin(t / 2.0) + 1.0);
}

struct QosPair {
  double rt = 0.0; // seconds
  double nj = 0.0; // milliseconds
};

/// Applies the shared (1 + delta_edge + delta_time) multiplier to both
/// base values; the multiplier stays within [1, 1.4].
inline QosPair finalize_qos(double rt, double j, double delta_edge, double delta_time) {
  const double multiplier = 1.0 + delta_edge + delta_time;
  return QosPair{rt * multiplier, j * multiplier};
}

}  // namespace chestnut
