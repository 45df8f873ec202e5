#include "ocbf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocbf {

Interval feasible_interval_u(std::span<const LinearRow> rows) {
  Interval iv;
  bool state_row_violated = false;
  for (const LinearRow& r : rows) {
    if (r.coef_e != 0.0) continue;  // soft row, never restricts u
    if (r.coef_u == 0.0) {
      const bool ok = r.sense == Sense::Ge ? (0.0 >= r.rhs) : (0.0 <= r.rhs);
      if (!ok) state_row_violated = true;
      continue;
    }
    const double bound = r.rhs / r.coef_u;
    const bool is_upper = (r.sense == Sense::Ge) == (r.coef_u < 0.0);
    if (is_upper) {
      iv.hi = std::min(iv.hi, bound);
    } else {
      iv.lo = std::max(iv.lo, bound);
    }
  }
  if (state_row_violated) {
    iv.lo = std::numeric_limits<double>::infinity();
    iv.hi = -std::numeric_limits<double>::infinity();
  }
  return iv;
}

namespace {

// Lower bound on e as a function of u: e >= a * u + g.
struct EnvelopeLine {
  double a = 0.0;
  double g = 0.0;
};

}  // namespace

QpSolution solve_qp(const QpProblem& p) {
  const Interval iv = feasible_interval_u(p.rows);
  if (iv.empty()) {
    return QpSolution{QpStatus::Infeasible, 0.0, 0.0, {}};
  }
  if (!(p.lambda_e > 0.0)) {
    throw std::runtime_error("solve_qp: lambda_e must be > 0");
  }

  // Rewrite each soft row as a lower bound on e.
  std::vector<EnvelopeLine> env;
  for (const LinearRow& r : p.rows) {
    if (r.coef_e == 0.0) continue;
    if (r.sense == Sense::Le && r.coef_e < 0.0) {
      env.push_back({r.coef_u / -r.coef_e, r.rhs / r.coef_e});
    } else if (r.sense == Sense::Ge && r.coef_e > 0.0) {
      env.push_back({-r.coef_u / r.coef_e, r.rhs / r.coef_e});
    } else {
      throw std::runtime_error("solve_qp: relaxation row does not lower-bound e");
    }
  }

  const auto e_required = [&](double u) {
    double m = 0.0;  // cost prefers e = 0 when every bound is below zero
    for (const EnvelopeLine& l : env) m = std::max(m, l.a * u + l.g);
    return m;
  };
  const auto cost = [&](double u) {
    const double du = u - p.u_ref;
    const double e = e_required(u);
    return 0.5 * du * du + p.lambda_e * e * e;
  };
  const auto clamp_iv = [&](double u) { return std::clamp(u, iv.lo, iv.hi); };

  // The objective in u alone is convex piecewise quadratic; its minimum sits
  // at an interval endpoint, at a breakpoint of the e-envelope, or at the
  // stationary point of one quadratic piece. Evaluate all of them.
  std::vector<double> candidates;
  candidates.reserve(4 + 3 * env.size() + env.size() * env.size());
  if (std::isfinite(iv.lo)) candidates.push_back(iv.lo);
  if (std::isfinite(iv.hi)) candidates.push_back(iv.hi);
  candidates.push_back(clamp_iv(p.u_ref));  // piece with the relaxation inactive
  for (const EnvelopeLine& l : env) {
    if (l.a != 0.0) candidates.push_back(clamp_iv(-l.g / l.a));  // relu breakpoint
    const double den = 1.0 + 2.0 * p.lambda_e * l.a * l.a;
    candidates.push_back(clamp_iv((p.u_ref - 2.0 * p.lambda_e * l.a * l.g) / den));
  }
  for (std::size_t i = 0; i < env.size(); ++i) {
    for (std::size_t j = i + 1; j < env.size(); ++j) {
      const double da = env[i].a - env[j].a;
      if (da != 0.0) candidates.push_back(clamp_iv((env[j].g - env[i].g) / da));
    }
  }

  double best_u = candidates.front();
  double best_cost = cost(best_u);
  for (double u : candidates) {
    const double c = cost(u);
    if (c < best_cost) {
      best_cost = c;
      best_u = u;
    }
  }

  QpSolution sol;
  sol.status = QpStatus::Optimal;
  sol.u = best_u;
  sol.e = e_required(best_u);
  for (const LinearRow& r : p.rows) {
    const double slack = r.lhs(sol.u, sol.e) - r.rhs;
    if (std::abs(slack) <= 1e-9 * std::max(1.0, std::abs(r.rhs))) {
      sol.active_set.push_back(r.tag);
    }
  }
  return sol;
}

}  // namespace ocbf
