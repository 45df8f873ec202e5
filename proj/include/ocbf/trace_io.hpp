#ifndef OCBF_TRACE_IO_HPP
#define OCBF_TRACE_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ocbf/simulation.hpp"

namespace ocbf {

inline constexpr const char* kVersion = "0.1.0";

// A full run: resolved configuration plus one row per StepRecord. On disk
// this is a one-line JSON header followed by CSV rows ordered by
// (t, fifo_index); floating-point columns carry 9 significant digits.
struct TraceFile {
  ScenarioConfig config;
  std::string version = kVersion;
  std::vector<StepRecord> records;
};

// --- scenario configuration (flat key = value text) ---

// Parse a config file; missing keys take documented defaults, unknown or
// duplicate keys are rejected. Throws ConfigError.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

// Apply one "key=value" pair to an existing config (CLI overrides reuse
// the file grammar). Throws ConfigError.
void apply_config_kv(ScenarioConfig& cfg, const std::string& key, const std::string& value);

std::string serialize_config(const ScenarioConfig& cfg);

// --- traces ---

std::string serialize_trace(const TraceFile& trace);
TraceFile parse_trace_text(const std::string& text);
TraceFile parse_trace(const std::string& path);
void write_trace(const TraceFile& trace, const std::string& path);

// --- summaries ---

// Summary as JSON text: per-vehicle entries plus aggregates that are
// recomputable from them.
std::string serialize_summary(const RunSummary& summary);

// --- comparison runner ---

struct VehicleComparison {
  int id = -1;
  Lane lane = Lane::Main;
  std::optional<double> first_infeasible_ocbf;
  std::optional<double> first_infeasible_fg;
  std::optional<double> min_b1_ocbf, min_b2_ocbf;
  std::optional<double> min_b1_fg, min_b2_fg;
  // First time the two modes' feasible intervals differ for this vehicle.
  std::optional<double> divergence_time;
};

struct ComparisonReport {
  std::uint64_t seed = 0;
  std::vector<VehicleComparison> vehicles;
  int total_infeasible_ocbf = 0;
  int total_infeasible_fg = 0;
  std::optional<double> min_b1_ocbf, min_b2_ocbf;
  std::optional<double> min_b1_fg, min_b2_fg;
};

struct CompareResult {
  TraceFile ocbf;
  TraceFile fg;
  ComparisonReport report;
};

// Run the scenario twice with the same seed (plain and feasibility-
// guaranteed) and diff the outcomes per vehicle.
CompareResult run_compare(const ScenarioConfig& cfg);

std::string serialize_report(const ComparisonReport& report);

// --- plot data ---

// Per-vehicle columns (t, u, feasible_lo, feasible_hi, u_min, u_max, b1, b2)
// for external plotting. Throws UnknownVehicle.
std::string emit_plot_data(const TraceFile& trace, int vehicle_id);

}  // namespace ocbf

#endif  // OCBF_TRACE_IO_HPP
