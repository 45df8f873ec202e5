#ifndef OCBF_REFERENCE_HPP
#define OCBF_REFERENCE_HPP

namespace ocbf {

// Unconstrained optimum of the weighted time/energy entry problem. The
// optimal control is linear in time, so velocity is quadratic and position
// cubic:
//   u*(t) = a t + b
//   v*(t) = a t^2 / 2 + b t + c
//   x*(t) = a t^3 / 6 + b t^2 / 2 + c t + d
// with x*(t0) = 0, v*(t0) = v0, x*(tm) = L, u*(tm) = 0, and the
// free-terminal-time condition beta + a * v*(tm) = 0.
struct ReferenceTrajectory {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double t0 = 0.0;  // entry time [s]
  double tm = 0.0;  // planned merge time [s]
};

struct RefPoint {
  double u = 0.0;
  double v = 0.0;
  double x = 0.0;
};

struct RefCommand {
  double u_ref = 0.0;
  double v_ref = 0.0;
};

// Solves the five boundary/transversality equations for (a, b, c, d, tm)
// by damped Newton iteration with multistart over the crossing time.
// v_max_hint only seeds the initial guess for tm.
// Throws NoConvergence when every initialization fails.
ReferenceTrajectory solve_reference(double v0, double t0, double L, double beta,
                                    double v_max_hint = 30.0);

// Evaluates the reference at time t; for t > tm the merge-time values are
// held constant (the cubic is not extrapolated).
RefPoint eval_reference(const ReferenceTrajectory& traj, double t);

// Reference with position feedback: both commands are the planned values
// scaled by x*(t)/x. The ratio is clamped to [0.5, 2] and defined as 1
// below x = 0.1 m, where the raw quotient is singular.
RefCommand reference_control(const ReferenceTrajectory& traj, double x_actual, double t);

// Largest scaled residual of the five defining equations at the given
// coefficients; the solver drives this below 1e-9.
double reference_residual(const ReferenceTrajectory& traj, double v0, double L, double beta);

}  // namespace ocbf

#endif  // OCBF_REFERENCE_HPP
