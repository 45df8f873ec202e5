#include "ocbf/params.hpp"

namespace ocbf {

std::optional<std::string> invalid_reason(const SimParams& p) {
  if (!(p.L > 0.0)) return "L must be > 0";
  if (!(p.phi > 0.0)) return "phi must be > 0";
  if (!(p.delta >= 0.0)) return "delta must be >= 0";
  if (!(p.dt > 0.0)) return "dt must be > 0";
  if (!(p.u_min < 0.0)) return "u_min must be < 0";
  if (!(p.u_max > 0.0)) return "u_max must be > 0";
  if (!(p.v_min >= 0.0)) return "v_min must be >= 0";
  if (!(p.v_max > p.v_min)) return "v_max must be > v_min";
  if (!(p.beta >= 0.0)) return "beta must be >= 0";
  if (!(p.k1 > 0.0)) return "k1 must be > 0";
  if (!(p.k2 > 0.0)) return "k2 must be > 0";
  if (!(p.k_v > 0.0)) return "k_v must be > 0";
  if (!(p.eps_clf > 0.0)) return "eps_clf must be > 0";
  if (!(p.lambda_e > 0.0)) return "lambda_e must be > 0";
  return std::nullopt;
}

}  // namespace ocbf
