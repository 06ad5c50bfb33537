#pragma once

// Dataset files: the five CSVs, the JSON run manifest and the stats/
// directory. Loaders are strict about headers so a validation pass can
// trust what it reads back.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "chestnut/config.hpp"
#include "chestnut/csv.hpp"
#include "chestnut/errors.hpp"
#include "chestnut/pipeline.hpp"
#include "chestnut/stats.hpp"

namespace chestnut {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kServersHeader = "id,lon,lat,radius,computing,storage,bandwidth";
inline constexpr const char* kServicesHeader = "sid,computing,storage,bandwidth";
inline constexpr const char* kUsersHeader = "id,timestamp,lon,lat,speed,direction";
inline constexpr const char* kLoadsHeader = "timestamp,eid,computing_load,storage_load,bandwidth_load";
inline constexpr const char* kInvocationsHeader = "uid,eid,sid,timestamp,rt,nj";

namespace detail {

inline std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary); // binary: no newline translation
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

inline void expect_header(std::istream& in, const char* expected, const fs::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected)
    throw FormatError(path.string() + ": header '" + line + "' != '" + expected + "'");
}

inline std::string percent(double fraction) {
  return format_fixed(fraction * 100.0, 4) + "%";
}

inline double parse_percent(std::string_view s, const fs::path& path) {
  if (s.empty() || s.back() != '%')
    throw FormatError(path.string() + ": expected a percentage, got '" + std::string(s) + "'");
  const auto v = parse_double(s.substr(0, s.size() - 1));
  if (!v) throw FormatError(path.string() + ": bad percentage '" + std::string(s) + "'");
  return *v / 100.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// emitters

inline void write_servers_csv(const fs::path& path, const std::vector<EdgeServer>& servers) {
  auto out = detail::open_out(path);
  out << kServersHeader << '\n';
  for (const EdgeServer& e : servers) {
    out << e.id << ',' << format_double(e.pos.lon) << ',' << format_double(e.pos.lat) << ','
        << e.radius_m << ',' << e.supply_c << ',' << e.supply_s << ',' << e.supply_b << '\n';
  }
}

inline void write_services_csv(const fs::path& path, const std::vector<ServiceSpec>& services) {
  auto out = detail::open_out(path);
  out << kServicesHeader << '\n';
  for (const ServiceSpec& s : services)
    out << s.sid << ',' << s.pref_c << ',' << s.pref_s << ',' << s.pref_b << '\n';
}

inline void write_users_csv(const fs::path& path, const std::vector<SelectedUser>& users) {
  auto out = detail::open_out(path);
  out << kUsersHeader << '\n';
  for (const SelectedUser& u : users) {
    for (const UserSnapshot& s : u.snapshots) {
      out << u.uid << ',' << s.t << ',' << format_double(s.pos.lon) << ','
          << format_double(s.pos.lat) << ',' << format_double(s.speed_kmh) << ','
          << format_double(s.direction_deg) << '\n';
    }
  }
}

inline void write_loads_csv(const fs::path& path, const std::vector<LoadRow>& loads) {
  auto out = detail::open_out(path);
  out << kLoadsHeader << '\n';
  for (const LoadRow& row : loads) {
    out << row.t << ',' << row.eid << ',' << detail::percent(row.rho.c) << ','
        << detail::percent(row.rho.s) << ',' << detail::percent(row.rho.b) << '\n';
  }
}

inline void write_invocations_csv(const fs::path& path,
                                  const std::vector<InvocationRecord>& records) {
  auto out = detail::open_out(path);
  out << kInvocationsHeader << '\n';
  for (const InvocationRecord& r : records) {
    out << r.uid << ',' << r.eid << ',' << r.sid << ',' << r.t << ','
        << format_fixed(r.rt, 6) << ',' << format_fixed(r.nj, 6) << '\n';
  }
}

inline ordered_json config_json(const SimConfig& cfg) {
  ordered_json j;
  SimConfig& mutable_cfg = const_cast<SimConfig&>(cfg);
  visit_config(mutable_cfg, [&](std::string_view key, auto& field) {
    using T = std::remove_reference_t<decltype(field)>;
    if constexpr (std::is_same_v<T, double> || std::is_same_v<T, int> ||
                  std::is_same_v<T, uint64_t>) {
      j[std::string(key)] = field;
    } else {
      j[std::string(key)] = detail::to_string_value(field);
    }
  });
  return j;
}

inline ordered_json bounds_json(const ColumnBounds& b) {
  return ordered_json{{"min", b.min}, {"max", b.max}, {"constant", b.constant()}};
}

inline ordered_json manifest_json(const RunResult& res) {
  size_t snapshot_rows = 0;
  for (const SelectedUser& u : res.users) snapshot_rows += u.snapshots.size();
  ordered_json j;
  j["dataset"] = "chestnut";
  j["seed"] = res.cfg.seed;
  j["config"] = config_json(res.cfg);
  j["counts"] = ordered_json{{"users", res.users.size()},
                             {"servers", res.servers.size()},
                             {"services", res.services.size()},
                             {"invocations", res.records.size()},
                             {"snapshots", snapshot_rows},
                             {"load_rows", res.loads.size()}};
  j["max_timestamp"] = res.max_t;
  j["dropped_rows"] = ordered_json{{"gps", res.gps_dropped}, {"stations", res.stations_dropped}};
  ordered_json norms;
  norms["uplink"] = bounds_json(res.bounds.uplink);
  norms["queueing"] = bounds_json(res.bounds.queueing);
  norms["processing"] = bounds_json(res.bounds.processing);
  norms["downlink"] = bounds_json(res.bounds.downlink);
  norms["delay_sum"] = bounds_json(res.bounds.delay_sum);
  norms["dist_ratio"] = bounds_json(res.bounds.dist_ratio);
  norms["dir_change"] = bounds_json(res.bounds.dir_change);
  norms["bw_ratio"] = bounds_json(res.bounds.bw_ratio);
  norms["speed"] = bounds_json(res.bounds.speed);
  norms["jitter_score"] = bounds_json(res.bounds.jitter_score);
  norms["perturbation_raw"] =
      ordered_json{{"min", res.perturb_raw_min}, {"max", res.perturb_raw_max}};
  j["normalization"] = std::move(norms);
  return j;
}

inline void write_manifest(const fs::path& path, const RunResult& res) {
  auto out = detail::open_out(path);
  out << manifest_json(res).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// stats emission

/// Everything emit_stats needs, buildable either from a fresh RunResult
/// or from a previously emitted directory.
struct StatsInputs {
  std::vector<SelectedUser> users;
  std::vector<EdgeServer> servers;
  long long max_t = 0;
  // one entry per invocation record
  std::vector<double> rt, nj;
  std::vector<double> pref_sum, load_mean, supply_sum;
  std::vector<double> dist_ratio, speed, dir_change, trend;
};

inline StatsInputs make_stats_inputs(const RunResult& res) {
  StatsInputs in;
  in.users = res.users;
  in.servers = res.servers;
  in.max_t = res.max_t;
  for (const InvocationRecord& r : res.records) {
    in.rt.push_back(r.rt);
    in.nj.push_back(r.nj);
    in.pref_sum.push_back(r.service_pref_sum);
    in.load_mean.push_back(r.server_load_mean);
    in.supply_sum.push_back(r.server_supply_sum);
    in.dist_ratio.push_back(r.factors.dist_ratio);
    in.speed.push_back(r.factors.speed_kmh);
    in.dir_change.push_back(r.factors.dir_change);
    in.trend.push_back(r.factors.trend);
  }
  return in;
}

inline void emit_stats(const fs::path& stats_dir, const SimConfig& cfg, const StatsInputs& in) {
  fs::create_directories(stats_dir);
  {
    auto out = detail::open_out(stats_dir / "user_timestamp_counts.csv");
    out << "uid,count\n";
    for (const SelectedUser& u : in.users) out << u.uid << ',' << u.snapshots.size() << '\n';
  }
  {
    auto out = detail::open_out(stats_dir / "timestamp_intervals.csv");
    out << "interval,count\n";
    for (const auto& [interval, count] : timestamp_interval_counts(in.users))
      out << interval << ',' << count << '\n';
  }
  {
    auto out = detail::open_out(stats_dir / "server_coverage.csv");
    out << "timestamp,eid,covered_users\n";
    const auto covered = coverage_counts(in.users, in.servers, in.max_t, cfg.geo_constants());
    for (size_t t = 0; t < covered.size(); ++t)
      for (size_t e = 0; e < covered[t].size(); ++e)
        out << t << ',' << e << ',' << covered[t][e] << '\n';
  }
  auto write_histogram = [&](const fs::path& path, const std::vector<double>& values,
                             double width) {
    auto out = detail::open_out(path);
    out << "bin_low,bin_high,count\n";
    if (values.empty()) return;
    for (const HistogramBin& bin : fixed_width_histogram(values, width)) {
      out << format_double(static_cast<double>(bin.index) * width) << ','
          << format_double(static_cast<double>(bin.index + 1) * width) << ',' << bin.count
          << '\n';
    }
  };
  write_histogram(stats_dir / "rt_histogram.csv", in.rt, cfg.rt_bin_width);
  write_histogram(stats_dir / "nj_histogram.csv", in.nj, cfg.nj_bin_width);
  {
    auto out = detail::open_out(stats_dir / "correlations.csv");
    out << "factor,target,spearman\n";
    if (in.rt.size() >= 2) {
      auto row = [&](const char* name, const char* target, const std::vector<double>& f,
                     const std::vector<double>& q) {
        out << name << ',' << target << ',' << format_double(spearman(f, q)) << '\n';
      };
      row("service_pref_sum", "rt", in.pref_sum, in.rt);
      row("server_load_mean", "rt", in.load_mean, in.rt);
      row("server_supply_sum", "rt", in.supply_sum, in.rt);
      row("dist_ratio", "nj", in.dist_ratio, in.nj);
      row("speed", "nj", in.speed, in.nj);
      row("dir_change", "nj", in.dir_change, in.nj);
      row("bandwidth_trend", "nj", in.trend, in.nj);
    }
  }
}

/// Writes every dataset file under `dir`. Partial files are removed if
/// any step fails.
inline void write_outputs(const RunResult& res, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> created;
  try {
    auto emit = [&](const fs::path& p, auto&& writer) {
      created.push_back(p);
      writer(p);
    };
    emit(dir / "servers.csv", [&](const fs::path& p) { write_servers_csv(p, res.servers); });
    emit(dir / "services.csv", [&](const fs::path& p) { write_services_csv(p, res.services); });
    emit(dir / "users.csv", [&](const fs::path& p) { write_users_csv(p, res.users); });
    emit(dir / "loads.csv", [&](const fs::path& p) { write_loads_csv(p, res.loads); });
    emit(dir / "invocations.csv",
         [&](const fs::path& p) { write_invocations_csv(p, res.records); });
    emit(dir / "manifest.json", [&](const fs::path& p) { write_manifest(p, res); });
    emit_stats(dir / "stats", res.cfg, make_stats_inputs(res));
  } catch (...) {
    std::error_code ec;
    for (const fs::path& p : created) fs::remove(p, ec);
    fs::remove_all(dir / "stats", ec);
    throw;
  }
}

// ---------------------------------------------------------------------------
// loaders

struct InvocationRow {
  int uid = 0;
  int eid = 0;
  int sid = 0;
  long long t = 0;
  double rt = 0.0;
  double nj = 0.0;
};

struct ManifestCounts {
  size_t users = 0, servers = 0, services = 0, invocations = 0, snapshots = 0, load_rows = 0;
};

struct LoadedDataset {
  SimConfig cfg;
  ManifestCounts counts;
  long long max_t = 0;
  std::vector<EdgeServer> servers;
  std::vector<ServiceSpec> services;
  std::vector<SelectedUser> users;
  std::vector<LoadRow> loads;
  std::vector<InvocationRow> invocations;
};

namespace detail {

inline std::vector<std::string> read_rows(const fs::path& path, const char* header) {
  auto in = open_in(path);
  expect_header(in, header, path);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  return rows;
}

template <class T>
T field_as(std::string_view s, const fs::path& path) {
  if constexpr (std::is_same_v<T, double>) {
    const auto v = parse_double(s);
    if (!v) throw FormatError(path.string() + ": bad number '" + std::string(s) + "'");
    return *v;
  } else {
    const auto v = parse_int(s);
    if (!v) throw FormatError(path.string() + ": bad integer '" + std::string(s) + "'");
    return static_cast<T>(*v);
  }
}

}  // namespace detail

inline std::vector<EdgeServer> load_servers_csv(const fs::path& path) {
  std::vector<EdgeServer> out;
  for (const std::string& row : detail::read_rows(path, kServersHeader)) {
    const auto f = split_fields(row);
    if (f.size() != 7) throw FormatError(path.string() + ": expected 7 fields");
    EdgeServer e;
    e.id = detail::field_as<int>(f[0], path);
    e.pos.lon = detail::field_as<double>(f[1], path);
    e.pos.lat = detail::field_as<double>(f[2], path);
    e.radius_m = detail::field_as<int>(f[3], path);
    e.supply_c = detail::field_as<int>(f[4], path);
    e.supply_s = detail::field_as<int>(f[5], path);
    e.supply_b = detail::field_as<int>(f[6], path);
    out.push_back(e);
  }
  return out;
}

inline std::vector<ServiceSpec> load_services_csv(const fs::path& path) {
  std::vector<ServiceSpec> out;
  for (const std::string& row : detail::read_rows(path, kServicesHeader)) {
    const auto f = split_fields(row);
    if (f.size() != 4) throw FormatError(path.string() + ": expected 4 fields");
    ServiceSpec s;
    s.sid = detail::field_as<int>(f[0], path);
    s.pref_c = detail::field_as<int>(f[1], path);
    s.pref_s = detail::field_as<int>(f[2], path);
    s.pref_b = detail::field_as<int>(f[3], path);
    out.push_back(s);
  }
  return out;
}

/// Users come back grouped by uid with snapshots in file order; profiles
/// are not recomputed here.
inline std::vector<SelectedUser> load_users_csv(const fs::path& path) {
  std::map<int, SelectedUser> by_uid;
  for (const std::string& row : detail::read_rows(path, kUsersHeader)) {
    const auto f = split_fields(row);
    if (f.size() != 6) throw FormatError(path.string() + ": expected 6 fields");
    UserSnapshot s;
    s.uid = detail::field_as<int>(f[0], path);
    s.t = detail::field_as<long long>(f[1], path);
    s.pos.lon = detail::field_as<double>(f[2], path);
    s.pos.lat = detail::field_as<double>(f[3], path);
    s.speed_kmh = detail::field_as<double>(f[4], path);
    s.direction_deg = detail::field_as<double>(f[5], path);
    SelectedUser& u = by_uid[s.uid];
    u.uid = s.uid;
    u.snapshots.push_back(s);
  }
  std::vector<SelectedUser> out;
  out.reserve(by_uid.size());
  for (auto& [uid, u] : by_uid) out.push_back(std::move(u));
  return out;
}

inline std::vector<LoadRow> load_loads_csv(const fs::path& path) {
  std::vector<LoadRow> out;
  for (const std::string& row : detail::read_rows(path, kLoadsHeader)) {
    const auto f = split_fields(row);
    if (f.size() != 5) throw FormatError(path.string() + ": expected 5 fields");
    LoadRow r;
    r.t = detail::field_as<long long>(f[0], path);
    r.eid = detail::field_as<int>(f[1], path);
    r.rho.c = detail::parse_percent(f[2], path);
    r.rho.s = detail::parse_percent(f[3], path);
    r.rho.b = detail::parse_percent(f[4], path);
    out.push_back(r);
  }
  return out;
}

inline std::vector<InvocationRow> load_invocations_csv(const fs::path& path) {
  std::vector<InvocationRow> out;
  for (const std::string& row : detail::read_rows(path, kInvocationsHeader)) {
    const auto f = split_fields(row);
    if (f.size() != 6) throw FormatError(path.string() + ": expected 6 fields");
    InvocationRow r;
    r.uid = detail::field_as<int>(f[0], path);
    r.eid = detail::field_as<int>(f[1], path);
    r.sid = detail::field_as<int>(f[2], path);
    r.t = detail::field_as<long long>(f[3], path);
    r.rt = detail::field_as<double>(f[4], path);
    r.nj = detail::field_as<double>(f[5], path);
    out.push_back(r);
  }
  return out;
}

inline LoadedDataset load_dataset(const fs::path& dir) {
  LoadedDataset d;
  const fs::path manifest_path = dir / "manifest.json";
  auto in = detail::open_in(manifest_path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  if (!j.contains("config") || !j.contains("counts"))
    throw FormatError(manifest_path.string() + ": missing config or counts");
  for (const auto& [key, value] : j["config"].items()) {
    const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    set_config_key(d.cfg, key, text);
  }
  const auto& counts = j["counts"];
  d.counts.users = counts.value("users", size_t{0});
  d.counts.servers = counts.value("servers", size_t{0});
  d.counts.services = counts.value("services", size_t{0});
  d.counts.invocations = counts.value("invocations", size_t{0});
  d.counts.snapshots = counts.value("snapshots", size_t{0});
  d.counts.load_rows = counts.value("load_rows", size_t{0});
  d.max_t = j.value("max_timestamp", 0LL);
  d.servers = load_servers_csv(dir / "servers.csv");
  d.services = load_services_csv(dir / "services.csv");
  d.users = load_users_csv(dir / "users.csv");
  d.loads = load_loads_csv(dir / "loads.csv");
  d.invocations = load_invocations_csv(dir / "invocations.csv");
  return d;
}

/// Rebuilds the per-record factor columns from the emitted files; every
/// value is recomputed the same way the generator computed it.
inline StatsInputs make_stats_inputs(const LoadedDataset& d) {
  const GeoConstants gc = d.cfg.geo_constants();
  StatsInputs in;
  in.users = d.users;
  in.servers = d.servers;
  in.max_t = d.max_t;

  std::map<int, size_t> user_index;
  for (size_t i = 0; i < d.users.size(); ++i) user_index[d.users[i].uid] = i;
  std::map<std::pair<int, long long>, size_t> snap_index; // (uid, t) -> offset
  for (const SelectedUser& u : d.users)
    for (size_t i = 0; i < u.snapshots.size(); ++i)
      snap_index[{u.uid, u.snapshots[i].t}] = i;
  std::map<int, std::map<long long, UtilTriple>> loads_by_server;
  for (const LoadRow& r : d.loads) loads_by_server[r.eid][r.t] = r.rho;

  auto trend_at = [&](int eid, long long t) {
    const auto& series = loads_by_server[eid];
    std::vector<double> window;
    for (long long i = std::max<long long>(0, t - d.cfg.k + 1); i <= t; ++i) {
      const auto it = series.find(i);
      if (it != series.end()) window.push_back(it->second.b);
    }
    if (window.size() < 2) return 0.0;
    double acc = 0.0;
    for (size_t i = 1; i < window.size(); ++i) acc += window[i] - window[i - 1];
    return acc / static_cast<double>(window.size() - 1);
  };

  for (const InvocationRow& r : d.invocations) {
    const auto ui = user_index.find(r.uid);
    const auto si = snap_index.find({r.uid, r.t});
    if (ui == user_index.end() || si == snap_index.end())
      throw FormatError("invocation references a missing user snapshot (uid=" +
                        std::to_string(r.uid) + ", t=" + std::to_string(r.t) + ")");
    if (r.eid < 0 || r.eid >= static_cast<int>(d.servers.size()) || r.sid < 0 ||
        r.sid >= static_cast<int>(d.services.size()))
      throw FormatError("invocation references an unknown server or service");
    const SelectedUser& user = d.users[ui->second];
    const UserSnapshot& snap = user.snapshots[si->second];
    const EdgeServer& server = d.servers[static_cast<size_t>(r.eid)];
    const ServiceSpec& svc = d.services[static_cast<size_t>(r.sid)];
    const auto load_it = loads_by_server[r.eid].find(r.t);
    if (load_it == loads_by_server[r.eid].end())
      throw FormatError("invocation references a missing load row (eid=" +
                        std::to_string(r.eid) + ", t=" + std::to_string(r.t) + ")");
    const UtilTriple& rho = load_it->second;

    in.rt.push_back(r.rt);
    in.nj.push_back(r.nj);
    in.pref_sum.push_back(svc.pref_sum());
    in.supply_sum.push_back(server.supply_sum());
    in.load_mean.push_back((rho.c + rho.s + rho.b) / 3.0);
    in.dist_ratio.push_back(haversine(snap.pos, server.pos, gc) /
                            static_cast<double>(server.radius_m));
    in.speed.push_back(snap.speed_kmh);
    const std::span<const UserSnapshot> history(user.snapshots.data(), si->second + 1);
    in.dir_change.push_back(direction_change_mean(history, d.cfg.k));
    in.trend.push_back(trend_at(r.eid, r.t));
  }
  return in;
}

}  // namespace chestnut
