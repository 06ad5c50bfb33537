#pragma once

// Simulation parameters. The key names in config files mirror the
// simulation-parameter table (delta_t, t_max, theta_rt, ...); everything
// past the `seed` member is an artifact knob with a conservative default.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "chestnut/csv.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/geo.hpp"

namespace chestnut {

enum class InvocationMode { full, sampled };
enum class DownlinkDenominator { full_bandwidth, paper_literal };

struct SimConfig {
  // region and population
  double phi_min = 31.050;     // minimal latitude
  double phi_max = 31.372;     // maximal latitude
  double lambda_min = 121.259; // minimal longitude
  double lambda_max = 121.640; // maximal longitude
  int r_min = 600;             // minimal coverage radius, m
  int r_max = 1200;            // maximal coverage radius, m
  int n_u = 2000;              // users to select
  int n_s = 135;               // services to generate
  int p = 3;                   // maximal resource preference/supply level

  // temporal alignment and selection
  double delta_t = 30.0; // alignment interval, s
  double t_max = 3600.0; // system recording horizon, s
  int c_min = 30;        // minimum timestamps per selected user
  int s_max = 3;         // maximum stationary interval (S)

  // QoS scales
  double theta_rt = 1.6;  // base delay, s
  double theta_nj = 160.0; // base jitter, ms
  int k = 5;              // history window (load and direction)
  double b_c = 0.5;       // packet-size series first term, MB
  double b_e = 512.0;     // server-bandwidth series first term, Mbps

  // artifact knobs
  uint64_t seed = 1;
  double epsilon = 0.05;          // start-of-step load disturbance
  double rho_min = 0.01;          // utilization clamp floor
  double rho_max = 0.99;          // utilization clamp ceiling
  double init_load_min = 0.05;    // t = 0 utilization draw
  double init_load_max = 0.30;
  double g_min = 0.10;            // shared load scale draw
  double g_max = 0.95;
  double load_scale = 3.0;        // multiplier recentering gamma * g
  InvocationMode mode = InvocationMode::sampled;
  int services_per_snapshot = 1;  // sampled-mode draws per snapshot
  double stationary_epsilon = 0.0; // coordinate-equality tolerance, deg
  BearingConvention bearing_convention = BearingConvention::paper;
  DownlinkDenominator downlink_denominator = DownlinkDenominator::full_bandwidth;
  int synth_vehicles = 50;
  int synth_stations = 300;
  double rt_bin_width = 0.1;  // s
  double nj_bin_width = 10.0; // ms
  double earth_radius_m = 6'371'000.0;

  // GPS log column indices
  int col_vehicle_id = 0;
  int col_gps_time = 1;
  int col_lon = 2;
  int col_lat = 3;
  int col_speed = 4;
  int col_direction = 5;

  GeoConstants geo_constants() const {
    GeoConstants gc;
    gc.earth_radius_m = earth_radius_m;
    return gc;
  }

  /// Highest system timestamp index a snapshot can carry.
  long long max_timestamp() const {
    return static_cast<long long>(t_max / delta_t);
  }
};

namespace detail {

inline std::string to_string_value(double v) { return format_double(v); }
inline std::string to_string_value(int v) { return std::to_string(v); }
inline std::string to_string_value(uint64_t v) { return std::to_string(v); }
inline std::string to_string_value(const std::string& v) { return v; }
inline std::string to_string_value(InvocationMode v) {
  return v == InvocationMode::full ? "full" : "sampled";
}
inline std::string to_string_value(BearingConvention v) {
  return v == BearingConvention::paper ? "paper" : "north_referenced";
}
inline std::string to_string_value(DownlinkDenominator v) {
  return v == DownlinkDenominator::full_bandwidth ? "full_bandwidth" : "paper_literal";
}

inline void from_string_value(std::string_view s, double& out) {
  const auto v = parse_double(s);
  if (!v) throw ConfigError("expected a real number, got '" + std::string(s) + "'");
  out = *v;
}
inline void from_string_value(std::string_view s, int& out) {
  const auto v = parse_int(s);
  if (!v) throw ConfigError("expected an integer, got '" + std::string(s) + "'");
  out = static_cast<int>(*v);
}
inline void from_string_value(std::string_view s, uint64_t& out) {
  const auto v = parse_int(s);
  if (!v || *v < 0) throw ConfigError("expected a non-negative integer, got '" + std::string(s) + "'");
  out = static_cast<uint64_t>(*v);
}
inline void from_string_value(std::string_view s, InvocationMode& out) {
  if (s == "full") out = InvocationMode::full;
  else if (s == "sampled") out = InvocationMode::sampled;
  else throw ConfigError("mode must be 'full' or 'sampled', got '" + std::string(s) + "'");
}
inline void from_string_value(std::string_view s, BearingConvention& out) {
  if (s == "paper") out = BearingConvention::paper;
  else if (s == "north_referenced") out = BearingConvention::north_referenced;
  else throw ConfigError("bearing_convention must be 'paper' or 'north_referenced'");
}
inline void from_string_value(std::string_view s, DownlinkDenominator& out) {
  if (s == "full_bandwidth") out = DownlinkDenominator::full_bandwidth;
  else if (s == "paper_literal") out = DownlinkDenominator::paper_literal;
  else throw ConfigError("downlink_denominator must be 'full_bandwidth' or 'paper_literal'");
}

}  // namespace detail

/// Calls f(key, field_ref) for every configurable field, in a stable order.
template <class Config, class F>
void visit_config(Config& cfg, F&& f) {
  f("phi_min", cfg.phi_min);
  f("phi_max", cfg.phi_max);
  f("lambda_min", cfg.lambda_min);
  f("lambda_max", cfg.lambda_max);
  f("r_min", cfg.r_min);
  f("r_max", cfg.r_max);
  f("n_u", cfg.n_u);
  f("n_s", cfg.n_s);
  f("p", cfg.p);
  f("delta_t", cfg.delta_t);
  f("t_max", cfg.t_max);
  f("c_min", cfg.c_min);
  f("s", cfg.s_max);
  f("theta_rt", cfg.theta_rt);
  f("theta_nj", cfg.theta_nj);
  f("k", cfg.k);
  f("b_c", cfg.b_c);
  f("b_e", cfg.b_e);
  f("seed", cfg.seed);
  f("epsilon", cfg.epsilon);
  f("rho_min", cfg.rho_min);
  f("rho_max", cfg.rho_max);
  f("init_load_min", cfg.init_load_min);
  f("init_load_max", cfg.init_load_max);
  f("g_min", cfg.g_min);
  f("g_max", cfg.g_max);
  f("load_scale", cfg.load_scale);
  f("mode", cfg.mode);
  f("services_per_snapshot", cfg.services_per_snapshot);
  f("stationary_epsilon", cfg.stationary_epsilon);
  f("bearing_convention", cfg.bearing_convention);
  f("downlink_denominator", cfg.downlink_denominator);
  f("synth_vehicles", cfg.synth_vehicles);
  f("synth_stations", cfg.synth_stations);
  f("rt_bin_width", cfg.rt_bin_width);
  f("nj_bin_width", cfg.nj_bin_width);
  f("earth_radius_m", cfg.earth_radius_m);
  f("col_vehicle_id", cfg.col_vehicle_id);
  f("col_gps_time", cfg.col_gps_time);
  f("col_lon", cfg.col_lon);
  f("col_lat", cfg.col_lat);
  f("col_speed", cfg.col_speed);
  f("col_direction", cfg.col_direction);
}

inline void set_config_key(SimConfig& cfg, std::string_view key, std::string_view value) {
  bool found = false;
  visit_config(cfg, [&](std::string_view k, auto& field) {
    if (k == key) {
      detail::from_string_value(value, field);
      found = true;
    }
  });
  if (!found) throw ConfigError("unknown config key '" + std::string(key) + "'");
}

inline void validate(const SimConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.phi_min < c.phi_max, "phi_min must be < phi_max");
  require(c.lambda_min < c.lambda_max, "lambda_min must be < lambda_max");
  require(c.r_min <= c.r_max, "r_min must be <= r_max");
  require(c.r_min > 0, "r_min must be positive");
  require(c.delta_t > 0, "delta_t must be positive");
  require(c.t_max >= c.delta_t, "t_max must be >= delta_t");
  require(c.p >= 1, "p must be >= 1");
  require(c.n_s >= 1, "n_s must be >= 1");
  require(c.n_u >= 1, "n_u must be >= 1");
  require(c.c_min >= 1, "c_min must be >= 1");
  require(c.s_max >= 1, "s must be >= 1");
  require(c.k >= 2, "k must be >= 2");
  require(c.theta_rt > 0, "theta_rt must be positive");
  require(c.theta_nj > 0, "theta_nj must be positive");
  require(c.b_c > 0, "b_c must be positive");
  require(c.b_e > 0, "b_e must be positive");
  require(c.epsilon >= 0, "epsilon must be non-negative");
  require(c.rho_min > 0 && c.rho_max < 1 && c.rho_min < c.rho_max,
          "rho bounds must satisfy 0 < rho_min < rho_max < 1");
  require(c.init_load_min <= c.init_load_max, "init_load bounds inverted");
  require(c.g_min > 0 && c.g_min <= c.g_max, "g bounds must satisfy 0 < g_min <= g_max");
  require(c.load_scale > 0, "load_scale must be positive");
  require(c.services_per_snapshot >= 1, "services_per_snapshot must be >= 1");
  require(c.stationary_epsilon >= 0, "stationary_epsilon must be non-negative");
  require(c.synth_vehicles >= 0, "synth_vehicles must be non-negative");
  require(c.synth_stations >= 0, "synth_stations must be non-negative");
  require(c.rt_bin_width > 0 && c.nj_bin_width > 0, "histogram bin widths must be positive");
  require(c.earth_radius_m > 0, "earth_radius_m must be positive");
}

/// Parses `key = value` lines; '#' starts a comment; blank lines ignored.
inline SimConfig parse_config_text(std::string_view text) {
  SimConfig cfg;
  size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t eq = line.find('=');
    std::string_view sv(line);
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
      return s;
    };
    if (eq == std::string::npos) {
      if (!trim(sv).empty())
        throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    const auto key = trim(sv.substr(0, eq));
    const auto value = trim(sv.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    set_config_key(cfg, key, value);
  }
  return cfg;
}

inline SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace chestnut
