#ifndef OCBF_CONSTRAINTS_HPP
#define OCBF_CONSTRAINTS_HPP

#include <array>
#include <cstdint>
#include <optional>

#include "ocbf/params.hpp"
#include "ocbf/vehicle.hpp"

namespace ocbf {

enum class Sense : std::uint8_t { Ge, Le };

enum class RowTag : std::uint8_t {
  RearEndCbf,
  MergeCbf,
  Clf,
  ControlLower,
  ControlUpper,
  SpeedMaxCbf,
  SpeedMinCbf,
  FeasRear,
  FeasMerge,
};

const char* to_string(RowTag tag);

// One affine inequality in the decision variables (u, e):
//   coef_u * u + coef_e * e  {>=|<=}  rhs
// Only the CLF row uses e; every other row is a hard half-line in u.
struct LinearRow {
  double coef_u = 0.0;
  double coef_e = 0.0;
  double rhs = 0.0;
  Sense sense = Sense::Ge;
  RowTag tag = RowTag::ControlLower;

  double lhs(double u, double e) const { return coef_u * u + coef_e * e; }
  bool satisfied(double u, double e, double tol = 0.0) const {
    const double s = lhs(u, e) - rhs;
    return sense == Sense::Ge ? s >= -tol : s <= tol;
  }
};

// Raw barrier values for one vehicle against its predecessors, for traces
// and invariance checks. Entries are absent when the corresponding
// predecessor does not exist (or the merging constraint is redundant).
struct BarrierSnapshot {
  std::optional<double> b1;        // rear-end gap barrier
  std::optional<double> b2;        // merging gap barrier
  std::optional<double> b_eta1;    // rear-end feasibility-candidate barrier
  std::optional<double> b_eta2;    // merging feasibility-candidate barrier
  std::optional<double> bf_rear;   // rear-end CBF/control-bound conflict margin
  std::optional<double> bf_merge;  // merging CBF/control-bound conflict margin
};

// --- rear-end chain (ego vs physical leader i_p) ---

// b1 = z - phi * v - delta
double rear_end_barrier(const VehicleState& ego, const VehicleState& pred,
                        const SimParams& p);

// v_ip - v - phi * u + k1 * b1 >= 0
LinearRow rear_end_cbf_row(const VehicleState& ego, const VehicleState& pred,
                           const SimParams& p);

// b_eta1 = v_ip - v - phi * u_min
double rear_eta_barrier(const VehicleState& ego, const VehicleState& pred,
                        const SimParams& p);

// bF = v_ip - v + k1 * b1 - phi * u_min; nonnegative iff the rear-end CBF
// row does not conflict with u >= u_min.
double rear_feasibility_barrier(const VehicleState& ego, const VehicleState& pred,
                                const SimParams& p);

// eta1 = u_ip - u + k1 * b_eta1 >= 0, with u_ip the leader's last applied
// control.
LinearRow feasibility_row_rear(const VehicleState& ego, const VehicleState& pred,
                               const SimParams& p);

// --- merging chain (ego vs FIFO predecessor i-1 on the other road) ---

// b2 = z - phi2 * x * v - delta
double merge_barrier(const VehicleState& ego, const VehicleState& pred_fifo,
                     const SimParams& p);

// v_im1 - v - phi2 * v^2 - phi2 * x * u + k2 * b2 >= 0
LinearRow merge_cbf_row(const VehicleState& ego, const VehicleState& pred_fifo,
                        const SimParams& p);

// b_eta2 = v_im1 - v - phi2 * v^2 - phi2 * x * u_min
double merge_eta_barrier(const VehicleState& ego, const VehicleState& pred_fifo,
                         const SimParams& p);

// bF = v_im1 - v - phi2 * v^2 + k2 * b2 - phi2 * x * u_min
double merge_feasibility_barrier(const VehicleState& ego, const VehicleState& pred_fifo,
                                 const SimParams& p);

// eta2 = u_im1 - (1 + 2 phi2 v) u - phi2 * v * u_min + k2 * b_eta2 >= 0
LinearRow feasibility_row_merge(const VehicleState& ego, const VehicleState& pred_fifo,
                                const SimParams& p);

// --- tracking and bounds ---

// Soft tracking row with V = (v - v_ref)^2:
//   2 (v - v_ref) u + eps * (v - v_ref)^2 <= e
LinearRow clf_row(const VehicleState& ego, double v_ref, const SimParams& p);

// u >= u_min, u <= ego.u_max
std::array<LinearRow, 2> control_bound_rows(const SimParams& p, const VehicleState& ego);

// Speed bounds as barriers: u <= k_v (v_max - v), u >= -k_v (v - v_min).
std::array<LinearRow, 2> speed_limit_rows(const VehicleState& ego, const SimParams& p);

// All applicable barrier values for one vehicle given its neighbors.
BarrierSnapshot snapshot_barriers(const VehicleState& ego, const NeighborView& nb,
                                  const SimParams& p);

}  // namespace ocbf

#endif  // OCBF_CONSTRAINTS_HPP
