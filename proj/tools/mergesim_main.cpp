// mergesim: run and compare merging-control scenarios, and export per-vehicle
// plot data from recorded traces.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocbf/errors.hpp"
#include "ocbf/trace_io.hpp"

namespace {

const std::vector<std::string> kConfigKeys = {
    "L",      "phi",      "delta",   "u_min",   "u_max",
    "v_min",  "v_max",    "dt",      "beta",    "k1",
    "k2",     "k_v",      "eps_clf", "lambda_e", "arrival_rate_main",
    "arrival_rate_merge", "v0_min",  "v0_max",  "horizon",
    "seed",   "mode",     "speed_limit_rows"};

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::map<std::string, std::string> overrides;
};

std::string default_out_dir() {
  if (const char* env = std::getenv("MERGESIM_OUT_DIR")) return env;
  return ".";
}

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "scenario config file (key = value lines)");
  sub->add_option("--out", o.out_dir, "output directory (default $MERGESIM_OUT_DIR or .)");
  for (const std::string& key : kConfigKeys) {
    sub->add_option("--" + key, o.overrides[key], "override config key " + key);
  }
}

ocbf::ScenarioConfig resolve_config(const CLI::App* sub, const CommonOpts& o) {
  ocbf::ScenarioConfig cfg;
  if (!o.config_path.empty()) cfg = ocbf::parse_config(o.config_path);
  for (const std::string& key : kConfigKeys) {
    if (sub->count("--" + key) > 0) {
      ocbf::apply_config_kv(cfg, key, o.overrides.at(key));
    }
  }
  ocbf::validate(cfg);
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CAV merging simulator: tracking QPs with barrier-function "
               "safety rows and optional feasibility guarantees"};
  app.require_subcommand(1);

  CommonOpts run_o, cmp_o, val_o;
  run_o.out_dir = cmp_o.out_dir = default_out_dir();

  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario, write trace and summary");
  add_common(run_cmd, run_o);

  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "run the scenario in both modes with one seed and diff the outcomes");
  add_common(cmp_cmd, cmp_o);

  CLI::App* plot_cmd = app.add_subcommand("plot-data", "export per-vehicle plot columns");
  std::string trace_path, plot_out = default_out_dir();
  int vehicle_id = -1;
  plot_cmd->add_option("--trace", trace_path, "trace file")->required();
  plot_cmd->add_option("--vehicle", vehicle_id, "vehicle id")->required();
  plot_cmd->add_option("--out", plot_out, "output directory");

  CLI::App* val_cmd = app.add_subcommand("validate-config", "resolve and print a config");
  add_common(val_cmd, val_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) {
      const ocbf::ScenarioConfig cfg = resolve_config(run_cmd, run_o);
      auto [records, summary] = ocbf::Simulation::run(cfg);
      const std::filesystem::path dir(run_o.out_dir);
      std::filesystem::create_directories(dir);
      ocbf::TraceFile trace{cfg, ocbf::kVersion, std::move(records)};
      write_file(dir / "trace.csv", ocbf::serialize_trace(trace));
      write_file(dir / "summary.json", ocbf::serialize_summary(summary));
      std::cout << "mode=" << to_string(cfg.mode) << " vehicles=" << summary.vehicles.size()
                << " completed=" << summary.completed_count
                << " infeasible_steps=" << summary.total_infeasible_steps
                << " mean_travel_time=" << summary.mean_travel_time << "s\n"
                << "wrote " << (dir / "trace.csv").string() << ", "
                << (dir / "summary.json").string() << "\n";
    } else if (*cmp_cmd) {
      const ocbf::ScenarioConfig cfg = resolve_config(cmp_cmd, cmp_o);
      const ocbf::CompareResult res = ocbf::run_compare(cfg);
      const std::filesystem::path dir(cmp_o.out_dir);
      std::filesystem::create_directories(dir);
      write_file(dir / "trace_ocbf.csv", ocbf::serialize_trace(res.ocbf));
      write_file(dir / "trace_fg.csv", ocbf::serialize_trace(res.fg));
      write_file(dir / "compare.json", ocbf::serialize_report(res.report));
      std::cout << "seed=" << res.report.seed
                << " infeasible: ocbf=" << res.report.total_infeasible_ocbf
                << " fg=" << res.report.total_infeasible_fg << "\n"
                << "wrote " << (dir / "trace_ocbf.csv").string() << ", "
                << (dir / "trace_fg.csv").string() << ", "
                << (dir / "compare.json").string() << "\n";
    } else if (*plot_cmd) {
      const ocbf::TraceFile trace = ocbf::parse_trace(trace_path);
      const std::string data = ocbf::emit_plot_data(trace, vehicle_id);
      const std::filesystem::path dir(plot_out);
      std::filesystem::create_directories(dir);
      const auto path = dir / ("vehicle_" + std::to_string(vehicle_id) + ".csv");
      write_file(path, data);
      std::cout << "wrote " << path.string() << "\n";
    } else if (*val_cmd) {
      const ocbf::ScenarioConfig cfg = resolve_config(val_cmd, val_o);
      std::cout << ocbf::serialize_config(cfg);
    }
  } catch (const ocbf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ocbf::UnknownVehicle& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
