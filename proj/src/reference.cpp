#include "ocbf/reference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ocbf/errors.hpp"

namespace ocbf {
namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

// y = (a, b, c, d, tm)
Vec5 residual(const Vec5& y, double v0, double t0, double L, double beta) {
  const double a = y[0], b = y[1], c = y[2], d = y[3], tm = y[4];
  Vec5 f;
  f[0] = 0.5 * a * t0 * t0 + b * t0 + c - v0;
  f[1] = a * t0 * t0 * t0 / 6.0 + 0.5 * b * t0 * t0 + c * t0 + d;
  f[2] = a * tm * tm * tm / 6.0 + 0.5 * b * tm * tm + c * tm + d - L;
  f[3] = a * tm + b;
  f[4] = beta + 0.5 * a * a * tm * tm + a * b * tm + a * c;
  return f;
}

Mat5 jacobian(const Vec5& y, double t0) {
  const double a = y[0], b = y[1], c = y[2], tm = y[4];
  Mat5 J = Mat5::Zero();
  J(0, 0) = 0.5 * t0 * t0;
  J(0, 1) = t0;
  J(0, 2) = 1.0;
  J(1, 0) = t0 * t0 * t0 / 6.0;
  J(1, 1) = 0.5 * t0 * t0;
  J(1, 2) = t0;
  J(1, 3) = 1.0;
  J(2, 0) = tm * tm * tm / 6.0;
  J(2, 1) = 0.5 * tm * tm;
  J(2, 2) = tm;
  J(2, 3) = 1.0;
  J(2, 4) = 0.5 * a * tm * tm + b * tm + c;  // v*(tm)
  J(3, 0) = tm;
  J(3, 1) = 1.0;
  J(3, 4) = a;
  J(4, 0) = a * tm * tm + b * tm + c;
  J(4, 1) = a * tm;
  J(4, 2) = a;
  J(4, 4) = a * (a * tm + b);
  return J;
}

double scaled_norm(const Vec5& f, double v0, double L, double beta) {
  const double sv = std::max(1.0, std::abs(v0));
  const double sx = std::max(1.0, L);
  const double sb = std::max(1.0, beta);
  double r = std::abs(f[0]) / sv;
  r = std::max(r, std::abs(f[1]) / sx);
  r = std::max(r, std::abs(f[2]) / sx);
  r = std::max(r, std::abs(f[3]));
  r = std::max(r, std::abs(f[4]) / sb);
  return r;
}

// Damped Newton from one starting point. Returns true on convergence with
// a physically sensible root (tm > t0, positive merge speed).
bool newton_solve(Vec5& y, double v0, double t0, double L, double beta) {
  constexpr int kMaxIter = 60;
  constexpr double kTol = 1e-12;
  double res = scaled_norm(residual(y, v0, t0, L, beta), v0, L, beta);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    if (res <= kTol) break;
    const Vec5 f = residual(y, v0, t0, L, beta);
    const Mat5 J = jacobian(y, t0);
    Eigen::FullPivLU<Mat5> lu(J);
    if (!lu.isInvertible()) return false;
    const Vec5 step = lu.solve(-f);
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 10; ++bt) {
      Vec5 trial = y + lambda * step;
      if (trial[4] > t0 + 1e-9 && trial.allFinite()) {
        const double trial_res =
            scaled_norm(residual(trial, v0, t0, L, beta), v0, L, beta);
        if (trial_res < res) {
          y = trial;
          res = trial_res;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return false;
  }
  if (res > 1e-9) return false;
  const double vm = 0.5 * y[0] * y[4] * y[4] + y[1] * y[4] + y[2];
  return y[4] > t0 && vm > 0.0;
}

// For a fixed crossing time the four boundary equations are linear in
// (a, b, c, d); solving them exactly gives a well-conditioned Newton start
// even for near-zero entry speeds.
Vec5 boundary_consistent_start(double v0, double t0, double L, double tm) {
  Eigen::Matrix4d A;
  Eigen::Vector4d rhs;
  A << 0.5 * t0 * t0, t0, 1.0, 0.0,                       // v(t0) = v0
      t0 * t0 * t0 / 6.0, 0.5 * t0 * t0, t0, 1.0,         // x(t0) = 0
      tm * tm * tm / 6.0, 0.5 * tm * tm, tm, 1.0,         // x(tm) = L
      tm, 1.0, 0.0, 0.0;                                  // u(tm) = 0
  rhs << v0, 0.0, L, 0.0;
  const Eigen::Vector4d abcd = A.fullPivLu().solve(rhs);
  Vec5 y;
  y << abcd[0], abcd[1], abcd[2], abcd[3], tm;
  return y;
}

}  // namespace

ReferenceTrajectory solve_reference(double v0, double t0, double L, double beta,
                                    double v_max_hint) {
  if (!(v0 > 0.0) || !(L > 0.0) || !(beta >= 0.0)) {
    throw NoConvergence("solve_reference: requires v0 > 0, L > 0, beta >= 0");
  }
  // Plain start at constant speed with the nominal average-speed crossing
  // guess; handles the common case in a handful of iterations.
  {
    Vec5 y;
    y << 0.0, 0.0, v0, -v0 * t0, t0 + 2.0 * L / (v0 + std::max(v_max_hint, 1.0));
    if (newton_solve(y, v0, t0, L, beta)) {
      return ReferenceTrajectory{y[0], y[1], y[2], y[3], t0, y[4]};
    }
  }
  // Multistart over the crossing time, sweeping mean speeds from fast to
  // slow, each seeded with boundary-consistent coefficients.
  for (double s = std::max(v_max_hint, 1.0); s >= 0.5; s /= 1.5) {
    Vec5 y = boundary_consistent_start(v0, t0, L, t0 + L / s);
    if (newton_solve(y, v0, t0, L, beta)) {
      return ReferenceTrajectory{y[0], y[1], y[2], y[3], t0, y[4]};
    }
  }
  throw NoConvergence("solve_reference: no convergence for v0=" + std::to_string(v0) +
                      " t0=" + std::to_string(t0) + " L=" + std::to_string(L) +
                      " beta=" + std::to_string(beta));
}

RefPoint eval_reference(const ReferenceTrajectory& traj, double t) {
  const double tc = std::min(t, traj.tm);  // hold terminal values past tm
  RefPoint r;
  r.u = traj.a * tc + traj.b;
  r.v = 0.5 * traj.a * tc * tc + traj.b * tc + traj.c;
  r.x = traj.a * tc * tc * tc / 6.0 + 0.5 * traj.b * tc * tc + traj.c * tc + traj.d;
  return r;
}

RefCommand reference_control(const ReferenceTrajectory& traj, double x_actual, double t) {
  const RefPoint r = eval_reference(traj, t);
  double ratio = 1.0;
  if (x_actual >= 0.1) {
    ratio = std::clamp(r.x / x_actual, 0.5, 2.0);
  }
  return RefCommand{ratio * r.u, ratio * r.v};
}

double reference_residual(const ReferenceTrajectory& traj, double v0, double L,
                          double beta) {
  Vec5 y;
  y << traj.a, traj.b, traj.c, traj.d, traj.tm;
  return scaled_norm(residual(y, v0, traj.t0, L, beta), v0, L, beta);
}

}  // namespace ocbf
