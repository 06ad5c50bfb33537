// chestnut: synthesize a mobile-edge QoS invocation dataset from GPS
// traces and base-station sites (or fully synthetic substitutes), then
// recompute statistics or re-check invariants on an emitted directory.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chestnut/chestnut.hpp"

namespace {

chestnut::RunInputs load_file_inputs(const chestnut::SimConfig& cfg, const std::string& gps_path,
                                     const std::string& stations_path) {
  chestnut::RunInputs inputs;
  {
    std::ifstream in(gps_path, std::ios::binary);
    if (!in) throw chestnut::IoError("cannot open gps log: " + gps_path);
    auto parsed = chestnut::parse_gps_log(in, cfg);
    inputs.gps = std::move(parsed.records);
    inputs.gps_dropped = parsed.dropped;
  }
  {
    std::ifstream in(stations_path, std::ios::binary);
    if (!in) throw chestnut::IoError("cannot open station list: " + stations_path);
    auto parsed = chestnut::parse_stations(in);
    inputs.stations = std::move(parsed.records);
    inputs.stations_dropped = parsed.dropped;
  }
  return inputs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CHESTNUT mobile-edge QoS dataset generator"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "run the full synthesis pipeline");
  std::string config_path, gps_path, stations_path, out_dir = "chestnut-out";
  std::string mode, seed_text;
  int services_per_snapshot = 0;
  bool synthetic = false;
  gen->add_option("--config", config_path, "key = value config file");
  gen->add_option("--seed", seed_text, "root seed override");
  gen->add_flag("--synthetic", synthetic, "synthesize traces and stations");
  gen->add_option("--gps", gps_path, "GPS log CSV   (requires --stations)");
  gen->add_option("--stations", stations_path, "station list CSV (requires --gps)");
  gen->add_option("--out", out_dir, "output directory");
  gen->add_option("--mode", mode, "invocation mode: full | sampled");
  gen->add_option("--services-per-snapshot", services_per_snapshot,
                  "sampled-mode services per snapshot");

  // stats
  auto* stats = app.add_subcommand("stats", "recompute statistics from an output directory");
  std::string stats_dir;
  stats->add_option("dir", stats_dir, "dataset directory")->required();

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "re-check all invariants on an output directory");
  std::string validate_dir;
  validate_cmd->add_option("dir", validate_dir, "dataset directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      chestnut::SimConfig cfg =
          config_path.empty() ? chestnut::SimConfig{} : chestnut::load_config_file(config_path);
      if (!seed_text.empty()) chestnut::set_config_key(cfg, "seed", seed_text);
      if (!mode.empty()) chestnut::set_config_key(cfg, "mode", mode);
      if (services_per_snapshot > 0) cfg.services_per_snapshot = services_per_snapshot;
      chestnut::validate(cfg);

      const bool have_files = !gps_path.empty() || !stations_path.empty();
      if (synthetic == have_files)
        throw chestnut::ConfigError("pass either --synthetic or both --gps and --stations");
      if (have_files && (gps_path.empty() || stations_path.empty()))
        throw chestnut::ConfigError("--gps and --stations must be given together");

      const chestnut::RunInputs inputs =
          synthetic ? chestnut::synth_inputs(cfg) : load_file_inputs(cfg, gps_path, stations_path);
      const chestnut::RunResult res = chestnut::run(cfg, inputs);
      chestnut::write_outputs(res, out_dir);
      std::cout << "wrote " << out_dir << ": " << res.users.size() << " users, "
                << res.servers.size() << " servers, " << res.services.size() << " services, "
                << res.records.size() << " invocations\n";
    } else if (stats->parsed()) {
      const chestnut::LoadedDataset d = chestnut::load_dataset(stats_dir);
      chestnut::emit_stats(chestnut::fs::path(stats_dir) / "stats", d.cfg,
                           chestnut::make_stats_inputs(d));
      std::cout << "wrote " << (chestnut::fs::path(stats_dir) / "stats").string() << '\n';
    } else if (validate_cmd->parsed()) {
      const auto violations = chestnut::validate_output(validate_dir);
      for (const std::string& v : violations) std::cout << "violation: " << v << '\n';
      if (!violations.empty()) {
        std::cout << violations.size() << " violation(s)\n";
        return 1;
      }
      std::cout << "ok: all invariants hold\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
