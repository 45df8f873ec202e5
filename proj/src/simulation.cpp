#include "ocbf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocbf/errors.hpp"

namespace ocbf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBarrierTol = 1e-3;  // discretization slack on barrier signs

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Engine draws mapped explicitly so streams do not depend on library
// distribution internals.
double unit_double(std::mt19937_64& eng) { return (eng() >> 11) * 0x1.0p-53; }

double draw_exponential(std::mt19937_64& eng, double rate) {
  return -std::log1p(-unit_double(eng)) / rate;
}

double draw_uniform(std::mt19937_64& eng, double a, double b) {
  return a + unit_double(eng) * (b - a);
}

bool audited_tag(RowTag tag) {
  return tag == RowTag::RearEndCbf || tag == RowTag::FeasRear ||
         tag == RowTag::MergeCbf || tag == RowTag::FeasMerge;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  if (auto why = invalid_reason(cfg.params)) throw ConfigError(*why);
  if (!(cfg.arrival_rate_main >= 0.0)) throw ConfigError("arrival_rate_main must be >= 0");
  if (!(cfg.arrival_rate_merge >= 0.0)) throw ConfigError("arrival_rate_merge must be >= 0");
  if (!(cfg.v0_min <= cfg.v0_max)) throw ConfigError("v0_min must be <= v0_max");
  if (!(cfg.v0_min >= cfg.params.v_min && cfg.v0_max <= cfg.params.v_max)) {
    throw ConfigError("entry-speed range must lie within [v_min, v_max]");
  }
  if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be > 0");
}

ControlDecision controller_step(const VehicleState& ego, const NeighborView& nb,
                                const ReferenceTrajectory& traj, const SimParams& p,
                                const ControllerOptions& opt, double t) {
  const RefCommand rc = reference_control(traj, ego.x, t);

  std::vector<LinearRow> rows;
  rows.reserve(9);
  rows.push_back(clf_row(ego, rc.v_ref, p));
  const auto bounds = control_bound_rows(p, ego);
  rows.push_back(bounds[0]);
  rows.push_back(bounds[1]);
  const bool rear = nb.pred_physical.has_value();
  const bool merging = nb.pred_fifo.has_value() && !nb.pred_fifo_same_lane;
  if (rear) rows.push_back(rear_end_cbf_row(ego, *nb.pred_physical, p));
  if (merging) rows.push_back(merge_cbf_row(ego, *nb.pred_fifo, p));
  if (opt.mode == Mode::FgOcbf) {
    if (rear) rows.push_back(feasibility_row_rear(ego, *nb.pred_physical, p));
    if (merging) rows.push_back(feasibility_row_merge(ego, *nb.pred_fifo, p));
  }
  if (opt.speed_limit_rows) {
    const auto sl = speed_limit_rows(ego, p);
    rows.push_back(sl[0]);
    rows.push_back(sl[1]);
  }

  QpProblem qp{rc.u_ref, p.lambda_e, rows};
  const QpSolution sol = solve_qp(qp);
  const Interval iv = feasible_interval_u(rows);

  ControlDecision dec;
  dec.status = sol.status;
  if (sol.status == QpStatus::Optimal) {
    dec.u = sol.u;
    dec.e = sol.e;
  } else {
    dec.u = p.u_min;  // continue on maximum braking when the QP is empty
    dec.e = 0.0;
  }
  dec.record = StepRecord{t,     ego.id, ego.fifo_index, ego.lane,
                          ego.x, ego.v,  dec.u,          rc.u_ref,
                          dec.e, sol.status, iv.lo,      iv.hi,
                          snapshot_barriers(ego, nb, p)};
  dec.rows = std::move(rows);
  return dec;
}

Simulation::Simulation(const ScenarioConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  main_.rate = cfg_.arrival_rate_main;
  merge_.rate = cfg_.arrival_rate_merge;
  main_.eng.seed(splitmix64(cfg_.seed ^ 0x4d41494eULL));
  merge_.eng.seed(splitmix64(cfg_.seed ^ 0x4d455247ULL));
  main_.next_due = main_.rate > 0.0 ? draw_exponential(main_.eng, main_.rate) : kInf;
  merge_.next_due = merge_.rate > 0.0 ? draw_exponential(merge_.eng, merge_.rate) : kInf;
}

void Simulation::pump_arrivals(ArrivalStream& st, double now) {
  while (st.next_due <= now) {
    st.pending_v0.push_back(draw_uniform(st.eng, cfg_.v0_min, cfg_.v0_max));
    st.next_due += draw_exponential(st.eng, st.rate);
  }
}

NeighborView Simulation::neighbors_of(std::size_t qpos,
                                      const std::vector<VehicleState>& snap) const {
  NeighborView nb;
  if (qpos > 0) {
    nb.pred_fifo = snap[qpos - 1];
    nb.pred_fifo_same_lane = snap[qpos - 1].lane == snap[qpos].lane;
  }
  for (std::size_t j = qpos; j-- > 0;) {
    if (snap[j].lane == snap[qpos].lane) {
      nb.pred_physical = snap[j];
      break;
    }
  }
  return nb;
}

bool Simulation::try_admit(Lane lane, double v0_sampled, double now) {
  const SimParams& p = cfg_.params;
  double cap = v0_sampled;

  const Agent* pred_phys = nullptr;
  for (auto it = queue_.rbegin(); it != queue_.rend(); ++it) {
    if (it->s.lane == lane) {
      pred_phys = &*it;
      break;
    }
  }
  if (pred_phys) {
    const double xp = pred_phys->s.x;
    const double vp = pred_phys->s.v;
    cap = std::min(cap, (xp - p.delta) / p.phi);              // gap barrier
    cap = std::min(cap, vp - p.phi * p.u_min);                // eta barrier
    cap = std::min(cap, (vp + p.k1 * (xp - p.delta) - p.phi * p.u_min) /
                            (1.0 + p.k1 * p.phi));            // conflict margin
  }
  if (!queue_.empty() && queue_.back().s.lane != lane) {
    // Cross-road FIFO predecessor; entry is at x = 0 where the merging gap
    // barrier is speed-independent, so a short gap defers the arrival.
    const double xf = queue_.back().s.x;
    const double vf = queue_.back().s.v;
    if (xf - p.delta < 0.0) return false;
    const double phi2 = p.phi2();
    cap = std::min(cap, (-1.0 + std::sqrt(1.0 + 4.0 * phi2 * vf)) / (2.0 * phi2));
    const double margin = vf + p.k2 * (xf - p.delta);
    cap = std::min(cap, (-1.0 + std::sqrt(1.0 + 4.0 * phi2 * margin)) / (2.0 * phi2));
  }

  // The reference solve needs a strictly positive entry speed.
  const double v_floor = std::max(p.v_min, 0.01);
  if (cap < v_floor) return false;
  const double v0 = std::min(v0_sampled, cap);

  Agent ag;
  ag.s.id = next_id_++;
  ag.s.lane = lane;
  ag.s.x = 0.0;
  ag.s.v = v0;
  ag.s.u = 0.0;
  ag.s.t0 = now;
  ag.s.fifo_index = static_cast<int>(queue_.size());
  ag.s.u_max = p.u_max;
  ag.traj = solve_reference(v0, now, p.L, p.beta, p.v_max);
  queue_.push_back(ag);

  VehicleSummary vs;
  vs.id = ag.s.id;
  vs.lane = lane;
  vs.t0 = now;
  stats_.emplace(ag.s.id, vs);
  return true;
}

void Simulation::admit_pending(ArrivalStream& st, Lane lane, double now) {
  while (!st.pending_v0.empty() && try_admit(lane, st.pending_v0.front(), now)) {
    st.pending_v0.pop_front();
  }
}

void Simulation::process_crossings(double t_cross) {
  for (Agent& ag : queue_) {
    if (!ag.crossed && ag.s.x >= cfg_.params.L) {
      ag.crossed = true;
      VehicleSummary& vs = stats_.at(ag.s.id);
      vs.tm = t_cross;
      vs.travel_time = t_cross - vs.t0;
      vs.completed = true;
    }
  }
  // Keep only the most recent crosser; older ones leave the queue and all
  // indices shift down.
  while (true) {
    std::size_t first = queue_.size(), count = 0;
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      if (queue_[i].crossed) {
        if (count == 0) first = i;
        ++count;
      }
    }
    if (count < 2) break;
    queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(first));
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      queue_[i].s.fifo_index = static_cast<int>(i);
    }
  }
}

void Simulation::advance() {
  const double t = clock_;
  const double dt = cfg_.params.dt;
  const ControllerOptions opt{cfg_.mode, cfg_.speed_limit_rows};

  std::vector<VehicleState> snap;
  snap.reserve(queue_.size());
  for (const Agent& ag : queue_) snap.push_back(ag.s);

  // Decide controls against the common snapshot, then apply them.
  std::vector<double> controls(queue_.size());
  for (std::size_t i = 0; i < queue_.size(); ++i) {
    Agent& ag = queue_[i];
    if (ag.crossed) {
      controls[i] = ag.s.u;  // departed leader holds its last command
      continue;
    }
    const ControlDecision dec =
        controller_step(snap[i], neighbors_of(i, snap), ag.traj, cfg_.params, opt, t);
    controls[i] = dec.u;

    for (const LinearRow& r : dec.rows) {
      if (audited_tag(r.tag)) {
        ++rows_audited_;
        if (r.coef_u > 0.0) ++rows_bad_direction_;
      }
    }
    VehicleSummary& vs = stats_.at(ag.s.id);
    vs.energy += 0.5 * dec.u * dec.u * dt;
    if (dec.status == QpStatus::Infeasible) ++vs.infeasible_steps;
    const BarrierSnapshot& bs = dec.record.barriers;
    if (bs.b1) vs.min_b1 = vs.min_b1 ? std::min(*vs.min_b1, *bs.b1) : *bs.b1;
    if (bs.b2) vs.min_b2 = vs.min_b2 ? std::min(*vs.min_b2, *bs.b2) : *bs.b2;
    records_.push_back(dec.record);
  }
  for (std::size_t i = 0; i < queue_.size(); ++i) {
    const StepResult sr = integrate_step(queue_[i].s, controls[i], dt);
    queue_[i].s = sr.state;
    if (sr.velocity_clamped) ++clamp_events_;
  }

  const double now = t + dt;
  process_crossings(now);
  pump_arrivals(main_, now);
  pump_arrivals(merge_, now);
  admit_pending(main_, Lane::Main, now);
  admit_pending(merge_, Lane::Merging, now);
  clock_ = now;
}

RunSummary Simulation::make_summary() const {
  RunSummary rs;
  rs.velocity_clamp_events = clamp_events_;
  rs.rows_audited = rows_audited_;
  rs.rows_bad_direction = rows_bad_direction_;
  double tt_sum = 0.0, en_sum = 0.0;
  for (const auto& [id, vs] : stats_) {
    VehicleSummary v = vs;
    v.violated_rear = v.min_b1 && *v.min_b1 < -kBarrierTol;
    v.violated_merge = v.min_b2 && *v.min_b2 < -kBarrierTol;
    rs.vehicles.push_back(v);
    rs.total_infeasible_steps += v.infeasible_steps;
    if (v.min_b1) rs.min_b1 = rs.min_b1 ? std::min(*rs.min_b1, *v.min_b1) : *v.min_b1;
    if (v.min_b2) rs.min_b2 = rs.min_b2 ? std::min(*rs.min_b2, *v.min_b2) : *v.min_b2;
    if (v.completed) {
      ++rs.completed_count;
      tt_sum += v.travel_time;
      en_sum += v.energy;
    } else {
      ++rs.in_zone_at_end;
    }
  }
  if (rs.completed_count > 0) {
    rs.mean_travel_time = tt_sum / rs.completed_count;
    rs.mean_energy = en_sum / rs.completed_count;
  }
  return rs;
}

std::pair<std::vector<StepRecord>, RunSummary> Simulation::run(const ScenarioConfig& cfg) {
  Simulation sim(cfg);
  while (!sim.finished()) sim.advance();
  return {sim.records_, sim.make_summary()};
}

}  // namespace ocbf
