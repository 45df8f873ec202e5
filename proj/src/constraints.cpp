#include "ocbf/constraints.hpp"

namespace ocbf {

const char* to_string(RowTag tag) {
  switch (tag) {
    case RowTag::RearEndCbf:   return "rear_end_cbf";
    case RowTag::MergeCbf:     return "merge_cbf";
    case RowTag::Clf:          return "clf";
    case RowTag::ControlLower: return "control_lower";
    case RowTag::ControlUpper: return "control_upper";
    case RowTag::SpeedMaxCbf:  return "speed_max_cbf";
    case RowTag::SpeedMinCbf:  return "speed_min_cbf";
    case RowTag::FeasRear:     return "feas_rear";
    case RowTag::FeasMerge:    return "feas_merge";
  }
  return "?";
}

double rear_end_barrier(const VehicleState& ego, const VehicleState& pred,
                        const SimParams& p) {
  return gap(pred, ego) - p.phi * ego.v - p.delta;
}

LinearRow rear_end_cbf_row(const VehicleState& ego, const VehicleState& pred,
                           const SimParams& p) {
  const double b1 = rear_end_barrier(ego, pred, p);
  LinearRow r;
  r.coef_u = -p.phi;
  r.rhs = -(pred.v - ego.v + p.k1 * b1);
  r.sense = Sense::Ge;
  r.tag = RowTag::RearEndCbf;
  return r;
}

double rear_eta_barrier(const VehicleState& ego, const VehicleState& pred,
                        const SimParams& p) {
  return pred.v - ego.v - p.phi * p.u_min;
}

double rear_feasibility_barrier(const VehicleState& ego, const VehicleState& pred,
                                const SimParams& p) {
  return pred.v - ego.v + p.k1 * rear_end_barrier(ego, pred, p) - p.phi * p.u_min;
}

LinearRow feasibility_row_rear(const VehicleState& ego, const VehicleState& pred,
                               const SimParams& p) {
  LinearRow r;
  r.coef_u = -1.0;
  r.rhs = -(pred.u + p.k1 * rear_eta_barrier(ego, pred, p));
  r.sense = Sense::Ge;
  r.tag = RowTag::FeasRear;
  return r;
}

double merge_barrier(const VehicleState& ego, const VehicleState& pred_fifo,
                     const SimParams& p) {
  return gap(pred_fifo, ego) - p.phi2() * ego.x * ego.v - p.delta;
}

LinearRow merge_cbf_row(const VehicleState& ego, const VehicleState& pred_fifo,
                        const SimParams& p) {
  const double phi2 = p.phi2();
  const double b2 = merge_barrier(ego, pred_fifo, p);
  LinearRow r;
  r.coef_u = -phi2 * ego.x;
  r.rhs = -(pred_fifo.v - ego.v - phi2 * ego.v * ego.v + p.k2 * b2);
  r.sense = Sense::Ge;
  r.tag = RowTag::MergeCbf;
  return r;
}

double merge_eta_barrier(const VehicleState& ego, const VehicleState& pred_fifo,
                         const SimParams& p) {
  const double phi2 = p.phi2();
  return pred_fifo.v - ego.v - phi2 * ego.v * ego.v - phi2 * ego.x * p.u_min;
}

double merge_feasibility_barrier(const VehicleState& ego, const VehicleState& pred_fifo,
                                 const SimParams& p) {
  const double phi2 = p.phi2();
  return pred_fifo.v - ego.v - phi2 * ego.v * ego.v +
         p.k2 * merge_barrier(ego, pred_fifo, p) - phi2 * ego.x * p.u_min;
}

LinearRow feasibility_row_merge(const VehicleState& ego, const VehicleState& pred_fifo,
                                const SimParams& p) {
  const double phi2 = p.phi2();
  LinearRow r;
  r.coef_u = -(1.0 + 2.0 * phi2 * ego.v);
  r.rhs = -(pred_fifo.u - phi2 * ego.v * p.u_min +
            p.k2 * merge_eta_barrier(ego, pred_fifo, p));
  r.sense = Sense::Ge;
  r.tag = RowTag::FeasMerge;
  return r;
}

LinearRow clf_row(const VehicleState& ego, double v_ref, const SimParams& p) {
  const double dv = ego.v - v_ref;
  LinearRow r;
  r.coef_u = 2.0 * dv;
  r.coef_e = -1.0;
  r.rhs = -p.eps_clf * dv * dv;
  r.sense = Sense::Le;
  r.tag = RowTag::Clf;
  return r;
}

std::array<LinearRow, 2> control_bound_rows(const SimParams& p, const VehicleState& ego) {
  LinearRow lo;
  lo.coef_u = 1.0;
  lo.rhs = p.u_min;
  lo.sense = Sense::Ge;
  lo.tag = RowTag::ControlLower;
  LinearRow hi;
  hi.coef_u = 1.0;
  hi.rhs = ego.u_max;
  hi.sense = Sense::Le;
  hi.tag = RowTag::ControlUpper;
  return {lo, hi};
}

std::array<LinearRow, 2> speed_limit_rows(const VehicleState& ego, const SimParams& p) {
  // b = v_max - v:  -u + k_v (v_max - v) >= 0
  LinearRow hi;
  hi.coef_u = -1.0;
  hi.rhs = -p.k_v * (p.v_max - ego.v);
  hi.sense = Sense::Ge;
  hi.tag = RowTag::SpeedMaxCbf;
  // b = v - v_min:   u + k_v (v - v_min) >= 0
  LinearRow lo;
  lo.coef_u = 1.0;
  lo.rhs = -p.k_v * (ego.v - p.v_min);
  lo.sense = Sense::Ge;
  lo.tag = RowTag::SpeedMinCbf;
  return {hi, lo};
}

BarrierSnapshot snapshot_barriers(const VehicleState& ego, const NeighborView& nb,
                                  const SimParams& p) {
  BarrierSnapshot s;
  if (nb.pred_physical) {
    s.b1 = rear_end_barrier(ego, *nb.pred_physical, p);
    s.b_eta1 = rear_eta_barrier(ego, *nb.pred_physical, p);
    s.bf_rear = rear_feasibility_barrier(ego, *nb.pred_physical, p);
  }
  if (nb.pred_fifo && !nb.pred_fifo_same_lane) {
    s.b2 = merge_barrier(ego, *nb.pred_fifo, p);
    s.b_eta2 = merge_eta_barrier(ego, *nb.pred_fifo, p);
    s.bf_merge = merge_feasibility_barrier(ego, *nb.pred_fifo, p);
  }
  return s;
}

}  // namespace ocbf
