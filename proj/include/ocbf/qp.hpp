#ifndef OCBF_QP_HPP
#define OCBF_QP_HPP

#include <limits>
#include <span>
#include <vector>

#include "ocbf/constraints.hpp"

namespace ocbf {

// Per-step program in the decision variables (u, e):
//   min  lambda_e * e^2 + (u - u_ref)^2 / 2   subject to rows.
struct QpProblem {
  double u_ref = 0.0;
  double lambda_e = 1.0;
  std::vector<LinearRow> rows;
};

enum class QpStatus : std::uint8_t { Optimal, Infeasible };

struct QpSolution {
  QpStatus status = QpStatus::Infeasible;
  double u = 0.0;
  double e = 0.0;
  std::vector<RowTag> active_set;  // rows tight at the optimum
};

// Feasible set of the hard rows, as an interval in u. Rows involving e are
// soft and never restrict u; a control-free row (coef_u = 0) either holds
// identically or empties the set.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool empty() const { return !(lo <= hi); }
};

Interval feasible_interval_u(std::span<const LinearRow> rows);

// Exact solve. The soft row is eliminated analytically (for fixed u the
// optimal relaxation is max(0, required e)), leaving a convex piecewise
// quadratic in u whose minimizer is found in closed form. Infeasible is a
// normal return; the strictly convex objective makes the optimum unique.
QpSolution solve_qp(const QpProblem& p);

}  // namespace ocbf

#endif  // OCBF_QP_HPP
