#ifndef OCBF_PARAMS_HPP
#define OCBF_PARAMS_HPP

#include <optional>
#include <string>

namespace ocbf {

// Road geometry and controller gains shared by every vehicle in the
// control zone. u_min is fleet-wide (vehicles agree on a common minimum
// acceleration); u_max is the default per-vehicle maximum, copied into
// each vehicle at entry.
struct SimParams {
  double L = 400.0;       // control-zone length [m]
  double phi = 1.8;       // reaction time [s]
  double delta = 10.0;    // standstill gap [m]
  double u_min = -2.0;    // minimum acceleration, all vehicles [m/s^2]
  double u_max = 3.0;     // default maximum acceleration [m/s^2]
  double v_min = 0.0;     // speed bounds [m/s]
  double v_max = 30.0;
  double dt = 0.05;       // controller step length [s]
  double beta = 1.0;      // travel-time weight in the entry optimization
  double k1 = 1.0;        // class-K gain, rear-end barrier
  double k2 = 1.0;        // class-K gain, merging barrier
  double k_v = 1.0;       // class-K gain, speed-limit barriers
  double eps_clf = 10.0;  // CLF convergence rate
  double lambda_e = 1.0;  // weight on the CLF relaxation in the QP objective

  // Gain of the position-scaled merging gap: Phi(x) = phi2() * x, so that
  // Phi equals the reaction time exactly at the merging point x = L.
  double phi2() const { return phi / L; }
};

// First violated invariant, or nullopt when the parameter set is usable.
std::optional<std::string> invalid_reason(const SimParams& p);

}  // namespace ocbf

#endif  // OCBF_PARAMS_HPP
