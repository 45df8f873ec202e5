#ifndef OCBF_SIMULATION_HPP
#define OCBF_SIMULATION_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "ocbf/constraints.hpp"
#include "ocbf/params.hpp"
#include "ocbf/qp.hpp"
#include "ocbf/reference.hpp"
#include "ocbf/vehicle.hpp"

namespace ocbf {

enum class Mode : std::uint8_t { Ocbf, FgOcbf };

inline const char* to_string(Mode m) { return m == Mode::Ocbf ? "ocbf" : "fg-ocbf"; }

struct ScenarioConfig {
  SimParams params;
  double arrival_rate_main = 0.1;   // Poisson arrivals [vehicles/s]
  double arrival_rate_merge = 0.1;
  double v0_min = 15.0;             // entry-speed range before sanitization [m/s]
  double v0_max = 25.0;
  double horizon = 120.0;           // [s]
  std::uint64_t seed = 1;
  Mode mode = Mode::FgOcbf;
  bool speed_limit_rows = true;
};

// Throws ConfigError on the first violated invariant.
void validate(const ScenarioConfig& cfg);

// Per-vehicle per-step trace entry; one per in-zone vehicle per step.
struct StepRecord {
  double t = 0.0;
  int vehicle_id = -1;
  int fifo_index = 0;
  Lane lane = Lane::Main;
  double x = 0.0;
  double v = 0.0;
  double u_applied = 0.0;
  double u_ref = 0.0;
  double e = 0.0;
  QpStatus qp_status = QpStatus::Optimal;
  double feasible_lo = 0.0;
  double feasible_hi = 0.0;
  BarrierSnapshot barriers;
};

struct VehicleSummary {
  int id = -1;
  Lane lane = Lane::Main;
  double t0 = 0.0;
  std::optional<double> tm;          // crossing time; absent if still inside at horizon
  double travel_time = 0.0;          // tm - t0, completed vehicles only
  double energy = 0.0;               // integral of u^2/2 over the transit
  int infeasible_steps = 0;
  std::optional<double> min_b1, min_b2;
  bool violated_rear = false;        // min b1 < -1e-3
  bool violated_merge = false;       // min b2 < -1e-3
  bool completed = false;
};

struct RunSummary {
  std::vector<VehicleSummary> vehicles;
  double mean_travel_time = 0.0;     // over completed vehicles
  double mean_energy = 0.0;
  int total_infeasible_steps = 0;
  std::optional<double> min_b1, min_b2;
  int completed_count = 0;
  int in_zone_at_end = 0;
  long velocity_clamp_events = 0;
  // Inequality-direction audit over generated safety/feasibility rows:
  long rows_audited = 0;
  long rows_bad_direction = 0;       // coef_u > 0 among those rows (never expected)
};

struct ControllerOptions {
  Mode mode = Mode::FgOcbf;
  bool speed_limit_rows = false;
};

struct ControlDecision {
  double u = 0.0;           // applied control (u_min fallback when infeasible)
  double e = 0.0;
  QpStatus status = QpStatus::Optimal;
  StepRecord record;
  std::vector<LinearRow> rows;  // rows handed to the QP, for audits and tests
};

// Assemble the per-step rows for one vehicle against a state snapshot and
// solve the QP. Rear-end rows require a physical leader; merging rows
// require a FIFO predecessor on the other road. FG mode adds one
// feasibility row per safety row present. An infeasible QP falls back to
// u = u_min and is flagged in the record.
ControlDecision controller_step(const VehicleState& ego, const NeighborView& nb,
                                const ReferenceTrajectory& traj, const SimParams& p,
                                const ControllerOptions& opt, double t);

// Closed-loop engine: FIFO queue over the control zone, Poisson arrivals
// with entry sanitization, synchronous per-step control against the
// previous-step snapshot, crossing bookkeeping, and metrics. Arrival times
// and entry speeds depend only on (seed, rates, v0 range), so runs in the
// two modes with equal seeds see identical traffic.
class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& cfg);

  // One synchronous step: snapshot, control every in-zone vehicle,
  // integrate, process crossings, admit arrivals, advance the clock.
  void advance();

  bool finished() const { return clock_ >= cfg_.horizon - 1e-12; }
  double clock() const { return clock_; }
  const std::vector<StepRecord>& records() const { return records_; }
  const ScenarioConfig& config() const { return cfg_; }

  RunSummary make_summary() const;

  // Run to the horizon.
  static std::pair<std::vector<StepRecord>, RunSummary> run(const ScenarioConfig& cfg);

 private:
  struct Agent {
    VehicleState s;
    ReferenceTrajectory traj;
    bool crossed = false;
  };
  struct ArrivalStream {
    std::mt19937_64 eng{0};
    double rate = 0.0;
    double next_due = 0.0;
    std::deque<double> pending_v0;  // due but not yet admitted (entry deferral)
  };

  void pump_arrivals(ArrivalStream& st, double now);
  void admit_pending(ArrivalStream& st, Lane lane, double now);
  bool try_admit(Lane lane, double v0_sampled, double now);
  NeighborView neighbors_of(std::size_t qpos,
                            const std::vector<VehicleState>& snap) const;
  void process_crossings(double t_cross);

  ScenarioConfig cfg_;
  std::vector<Agent> queue_;  // ascending fifo_index, front may be the crossed leaver
  double clock_ = 0.0;
  int next_id_ = 1;
  std::vector<StepRecord> records_;
  std::map<int, VehicleSummary> stats_;
  ArrivalStream main_, merge_;
  long clamp_events_ = 0;
  long rows_audited_ = 0;
  long rows_bad_direction_ = 0;
};

}  // namespace ocbf

#endif  // OCBF_SIMULATION_HPP
