#ifndef OCBF_VEHICLE_HPP
#define OCBF_VEHICLE_HPP

#include <cassert>
#include <cstdint>
#include <optional>

#include "ocbf/params.hpp"

namespace ocbf {

enum class Lane : std::uint8_t { Main, Merging };

inline const char* to_string(Lane l) { return l == Lane::Main ? "main" : "merge"; }

// State of one vehicle, in lane-origin coordinates. Both lanes have the
// same length L, so positions (and gaps) are comparable across lanes.
struct VehicleState {
  int id = -1;
  Lane lane = Lane::Main;
  double x = 0.0;      // distance from the lane origin [m]
  double v = 0.0;      // speed [m/s]
  double u = 0.0;      // last applied acceleration [m/s^2]
  double t0 = 0.0;     // control-zone entry time [s]
  int fifo_index = 0;  // current index in the coordinator queue
  double u_max = 3.0;  // this vehicle's maximum acceleration [m/s^2]
};

// The two predecessors a vehicle may constrain against: the physical
// leader in its own lane (i_p) and the FIFO predecessor (i-1). When they
// are the same vehicle the merging constraint is redundant.
struct NeighborView {
  std::optional<VehicleState> pred_physical;
  std::optional<VehicleState> pred_fifo;
  bool pred_fifo_same_lane = false;
};

struct StepResult {
  VehicleState state;
  bool velocity_clamped = false;  // braked through v = 0 this step
};

// One zero-order-hold step of the double-integrator dynamics; exact for
// piecewise-constant control. A vehicle braking through zero stops at the
// exact stop point and holds (no reversing).
inline StepResult integrate_step(const VehicleState& s, double u, double dt) {
  assert(dt > 0.0);
  VehicleState n = s;
  n.u = u;
  const double v_end = s.v + u * dt;
  if (v_end < 0.0) {
    const double t_stop = u < 0.0 ? s.v / -u : 0.0;
    n.x = s.x + s.v * t_stop + 0.5 * u * t_stop * t_stop;
    n.v = 0.0;
    return {n, true};
  }
  n.x = s.x + s.v * dt + 0.5 * u * dt * dt;
  n.v = v_end;
  return {n, false};
}

// Longitudinal distance from ego to a predecessor; positive when the
// predecessor is ahead.
inline double gap(const VehicleState& pred, const VehicleState& ego) {
  return pred.x - ego.x;
}

}  // namespace ocbf

#endif  // OCBF_VEHICLE_HPP
