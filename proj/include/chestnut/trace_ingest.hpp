#pragma once

// Input adapters: taxi-style GPS logs, base-station site lists, and a
// synthetic substitute generator for runs without licensed source data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "chestnut/config.hpp"
#include "chestnut/csv.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/geo.hpp"
#include "chestnut/rng.hpp"

namespace chestnut {

struct RawGpsRecord {
  std::string vehicle_id;
  double gps_time = 0.0; // wall-clock seconds
  GeoPoint pos;
  double speed_kmh = 0.0;
  double direction_deg = 0.0; // [0, 360)

  friend bool operator==(const RawGpsRecord&, const RawGpsRecord&) = default;
};

struct RawStationRecord {
  GeoPoint pos;

  friend bool operator==(const RawStationRecord&, const RawStationRecord&) = default;
};

template <class Record>
struct ParseResult {
  std::vector<Record> records;
  size_t dropped = 0; // malformed rows skipped
};

inline double normalize_direction(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0) d += 360.0;
  return d;
}

/// Reads a delimited GPS log using the column indices from `cfg`.
/// Malformed rows (missing columns, non-numeric fields, out-of-range
/// coordinates, negative speed) are dropped and counted. Output is sorted
/// by (vehicle_id, gps_time).
inline ParseResult<RawGpsRecord> parse_gps_log(std::istream& in, const SimConfig& cfg) {
  if (!in) throw IoError("gps log stream is not readable");
  ParseResult<RawGpsRecord> out;
  const int max_col = std::max({cfg.col_vehicle_id, cfg.col_gps_time, cfg.col_lon,
                                cfg.col_lat, cfg.col_speed, cfg.col_direction});
  size_t total = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++total;
    const auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) <= max_col) {
      ++out.dropped;
      continue;
    }
    const auto time = parse_double(fields[cfg.col_gps_time]);
    const auto lon = parse_double(fields[cfg.col_lon]);
    const auto lat = parse_double(fields[cfg.col_lat]);
    const auto speed = parse_double(fields[cfg.col_speed]);
    const auto direction = parse_double(fields[cfg.col_direction]);
    std::string vid{fields[cfg.col_vehicle_id]};
    if (!time || !lon || !lat || !speed || !direction || vid.empty() ||
        !in_lon_range(*lon) || !in_lat_range(*lat) || *speed < 0) {
      ++out.dropped;
      continue;
    }
    out.records.push_back(RawGpsRecord{std::move(vid), *time, GeoPoint{*lon, *lat},
                                       *speed, normalize_direction(*direction)});
  }
  if (in.bad()) throw IoError("i/o failure while reading gps log");
  if (total > 0 && out.dropped * 2 > total)
    throw FormatError("gps log does not match the configured layout: " +
                      std::to_string(out.dropped) + " of " + std::to_string(total) +
                      " rows malformed");
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const RawGpsRecord& a, const RawGpsRecord& b) {
                     if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
                     return a.gps_time < b.gps_time;
                   });
  return out;
}

/// Reads a `lon,lat` site list. Duplicate coordinates collapse to the
/// first occurrence; out-of-range rows are dropped and counted.
inline ParseResult<RawStationRecord> parse_stations(std::istream& in) {
  if (!in) throw IoError("station list stream is not readable");
  ParseResult<RawStationRecord> out;
  size_t total = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++total;
    const auto fields = split_fields(line);
    if (fields.size() < 2) {
      ++out.dropped;
      continue;
    }
    const auto lon = parse_double(fields[0]);
    const auto lat = parse_double(fields[1]);
    if (!lon || !lat || !in_lon_range(*lon) || !in_lat_range(*lat)) {
      ++out.dropped;
      continue;
    }
    const GeoPoint p{*lon, *lat};
    const bool seen = std::any_of(out.records.begin(), out.records.end(),
                                  [&](const RawStationRecord& r) { return r.pos == p; });
    if (!seen) out.records.push_back(RawStationRecord{p});
  }
  if (in.bad()) throw IoError("i/o failure while reading station list");
  if (total > 0 && out.dropped * 2 > total)
    throw FormatError("station list does not look like lon,lat rows: " +
                      std::to_string(out.dropped) + " of " + std::to_string(total) +
                      " rows malformed");
  return out;
}

namespace detail {

inline double heading_toward(GeoPoint from, GeoPoint to) {
  // angle whose cosine moves longitude and sine moves latitude
  return normalize_direction(rad2deg(std::atan2(to.lat - from.lat, to.lon - from.lon)));
}

inline double flat_distance_m(GeoPoint a, GeoPoint b, double meters_per_degree) {
  return meters_per_degree * std::hypot(b.lon - a.lon, b.lat - a.lat);
}

}  // namespace detail

/// Random-waypoint trajectories inside the configured bounding box.
/// Each vehicle reports on its own fixed interval from {10, 15, 30, 60} s
/// with a random wall-clock start, and parks now and then so that
/// stationary runs of identical fixes occur in the output.
inline std::vector<RawGpsRecord> synth_traces(const SimConfig& cfg, int n_vehicles,
                                              uint64_t seed) {
  static constexpr int kIntervals[] = {10, 15, 30, 60};
  const double mpd = cfg.geo_constants().meters_per_degree;
  const SeedTree tree{seed};
  std::vector<RawGpsRecord> out;
  for (int v = 0; v < n_vehicles; ++v) {
    Rng rng = tree.stream("synth-trace", static_cast<uint64_t>(v));
    char vid[16];
    std::snprintf(vid, sizeof(vid), "v%06d", v);

    const int interval = kIntervals[rng.uniform_int(0, 3)];
    const double start = static_cast<double>(rng.uniform_int(0, 59)); // whole-second clock

    const double duration = cfg.t_max * rng.uniform_real(0.25, 1.0);
    auto random_point = [&] {
      return GeoPoint{rng.uniform_real(cfg.lambda_min, cfg.lambda_max),
                      rng.uniform_real(cfg.phi_min, cfg.phi_max)};
    };

    GeoPoint pos = random_point();
    GeoPoint waypoint = random_point();
    double leg_speed = rng.uniform_real(20.0, 60.0); // km/h
    double heading = detail::heading_toward(pos, waypoint);
    double dwell_left = 0.0;

    for (double t = 0.0; t <= duration; t += interval) {
      const bool dwelling = dwell_left > 0.0;
      double speed = 0.0;
      if (!dwelling) {
        heading = detail::heading_toward(pos, waypoint);
        speed = std::clamp(leg_speed + rng.uniform_real(-5.0, 5.0), 5.0, 80.0);
      }
      out.push_back(RawGpsRecord{vid, start + t, pos, speed, heading});

      if (dwelling) {
        dwell_left -= interval;
        if (dwell_left <= 0.0) {
          waypoint = random_point();
          leg_speed = rng.uniform_real(20.0, 60.0);
        }
        continue;
      }
      const double step_m = speed / 3.6 * interval;
      const double remaining_m = detail::flat_distance_m(pos, waypoint, mpd);
      if (step_m >= remaining_m) {
        pos = waypoint;
        if (rng.uniform_real(0.0, 1.0) < 0.4) {
          dwell_left = rng.uniform_real(20.0, 130.0); // parked
        } else {
          waypoint = random_point();
          leg_speed = rng.uniform_real(20.0, 60.0);
        }
      } else {
        const double theta = deg2rad(heading);
        pos.lon += step_m / mpd * std::cos(theta);
        pos.lat += step_m / mpd * std::sin(theta);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RawGpsRecord& a, const RawGpsRecord& b) {
    if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
    return a.gps_time < b.gps_time;
  });
  return out;
}

/// Uniform random station sites inside the configured bounding box.
inline std::vector<RawStationRecord> synth_stations(const SimConfig& cfg, int n_stations,
                                                    uint64_t seed) {
  Rng rng = SeedTree{seed}.stream("synth-stations");
  std::vector<RawStationRecord> out;
  out.reserve(static_cast<size_t>(std::max(0, n_stations)));
  for (int i = 0; i < n_stations; ++i) {
    out.push_back(RawStationRecord{GeoPoint{rng.uniform_real(cfg.lambda_min, cfg.lambda_max),
                                            rng.uniform_real(cfg.phi_min, cfg.phi_max)}});
  }
  return out;
}

}  // namespace chestnut
