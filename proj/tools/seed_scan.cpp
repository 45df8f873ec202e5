// Scans seeds of a scenario for runs where the plain controller hits an
// infeasible QP followed by a barrier violation while the feasibility-
// guaranteed controller stays clean. Used to pin the stress fixtures in
// the test suite.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ocbf/errors.hpp"
#include "ocbf/trace_io.hpp"

namespace {

struct Phenomenon {
  bool rear = false;   // infeasible step, then b1 < -1e-3, same vehicle
  bool merge = false;  // infeasible step, then b2 < -1e-3, same vehicle
};

Phenomenon classify(const std::vector<ocbf::StepRecord>& records) {
  Phenomenon ph;
  std::map<int, double> first_infeasible;
  for (const auto& r : records) {
    if (r.qp_status == ocbf::QpStatus::Infeasible && !first_infeasible.count(r.vehicle_id)) {
      first_infeasible[r.vehicle_id] = r.t;
    }
  }
  for (const auto& r : records) {
    auto it = first_infeasible.find(r.vehicle_id);
    if (it == first_infeasible.end() || r.t < it->second) continue;
    if (r.barriers.b1 && *r.barriers.b1 < -1e-3) ph.rear = true;
    if (r.barriers.b2 && *r.barriers.b2 < -1e-3) ph.merge = true;
  }
  return ph;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scan seeds for infeasibility-then-violation scenarios"};
  std::string config_path;
  std::uint64_t from = 1, to = 100;
  app.add_option("--config", config_path, "scenario config file");
  app.add_option("--from", from, "first seed");
  app.add_option("--to", to, "last seed");
  CLI11_PARSE(app, argc, argv);

  try {
    ocbf::ScenarioConfig base;
    if (!config_path.empty()) base = ocbf::parse_config(config_path);
    for (std::uint64_t seed = from; seed <= to; ++seed) {
      ocbf::ScenarioConfig cfg = base;
      cfg.seed = seed;
      const ocbf::CompareResult res = ocbf::run_compare(cfg);
      const Phenomenon ph = classify(res.ocbf.records);
      const bool fg_clean =
          res.report.total_infeasible_fg == 0 &&
          (!res.report.min_b1_fg || *res.report.min_b1_fg >= -1e-3) &&
          (!res.report.min_b2_fg || *res.report.min_b2_fg >= -1e-3);
      std::cout << "seed " << seed << ": ocbf_infeasible=" << res.report.total_infeasible_ocbf
                << " b1min=" << (res.report.min_b1_ocbf ? *res.report.min_b1_ocbf : 0.0)
                << " b2min=" << (res.report.min_b2_ocbf ? *res.report.min_b2_ocbf : 0.0)
                << " fg_infeasible=" << res.report.total_infeasible_fg
                << " fg_b1min=" << (res.report.min_b1_fg ? *res.report.min_b1_fg : 0.0)
                << " fg_b2min=" << (res.report.min_b2_fg ? *res.report.min_b2_fg : 0.0)
                << (ph.rear && fg_clean ? " REAR" : "")
                << (ph.merge && fg_clean ? " MERGE" : "") << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
