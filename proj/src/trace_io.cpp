#include "ocbf/trace_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ocbf/errors.hpp"

namespace ocbf {
namespace {

using nlohmann::json;

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string g9_opt(const std::optional<double>& v) { return v ? g9(*v) : std::string(); }

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  const char* begin = t.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  const char* begin = t.c_str();
  char* end = nullptr;
  const unsigned long long x = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + v + "'");
  }
  return x;
}

bool parse_flag(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "on" || t == "true" || t == "1") return true;
  if (t == "off" || t == "false" || t == "0") return false;
  throw ConfigError("key '" + key + "': expected on/off, got '" + v + "'");
}

Mode parse_mode(const std::string& v) {
  const std::string t = trim(v);
  if (t == "ocbf") return Mode::Ocbf;
  if (t == "fg-ocbf") return Mode::FgOcbf;
  throw ConfigError("key 'mode': expected ocbf or fg-ocbf, got '" + v + "'");
}

Lane parse_lane(const std::string& v) {
  if (v == "main") return Lane::Main;
  if (v == "merge") return Lane::Merging;
  throw ConfigError("trace: unknown lane '" + v + "'");
}

const char* to_string(QpStatus s) {
  return s == QpStatus::Optimal ? "optimal" : "infeasible";
}

QpStatus parse_status(const std::string& v) {
  if (v == "optimal") return QpStatus::Optimal;
  if (v == "infeasible") return QpStatus::Infeasible;
  throw ConfigError("trace: unknown qp status '" + v + "'");
}

constexpr const char* kCsvHeader =
    "t,vehicle_id,fifo_index,lane,x,v,u_applied,u_ref,e,qp_status,"
    "feasible_lo,feasible_hi,b1,b2,b_eta1,b_eta2,bf_rear,bf_merge";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> field_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

void apply_config_kv(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  SimParams& p = cfg.params;
  if (key == "L") p.L = parse_double(key, value);
  else if (key == "phi") p.phi = parse_double(key, value);
  else if (key == "delta") p.delta = parse_double(key, value);
  else if (key == "u_min") p.u_min = parse_double(key, value);
  else if (key == "u_max") p.u_max = parse_double(key, value);
  else if (key == "v_min") p.v_min = parse_double(key, value);
  else if (key == "v_max") p.v_max = parse_double(key, value);
  else if (key == "dt") p.dt = parse_double(key, value);
  else if (key == "beta") p.beta = parse_double(key, value);
  else if (key == "k1") p.k1 = parse_double(key, value);
  else if (key == "k2") p.k2 = parse_double(key, value);
  else if (key == "k_v") p.k_v = parse_double(key, value);
  else if (key == "eps_clf") p.eps_clf = parse_double(key, value);
  else if (key == "lambda_e") p.lambda_e = parse_double(key, value);
  else if (key == "arrival_rate_main") cfg.arrival_rate_main = parse_double(key, value);
  else if (key == "arrival_rate_merge") cfg.arrival_rate_merge = parse_double(key, value);
  else if (key == "v0_min") cfg.v0_min = parse_double(key, value);
  else if (key == "v0_max") cfg.v0_max = parse_double(key, value);
  else if (key == "horizon") cfg.horizon = parse_double(key, value);
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "mode") cfg.mode = parse_mode(value);
  else if (key == "speed_limit_rows") cfg.speed_limit_rows = parse_flag(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("duplicate config key '" + key + "'");
    }
    apply_config_kv(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  const SimParams& p = cfg.params;
  std::ostringstream out;
  out << "L = " << g9(p.L) << '\n'
      << "phi = " << g9(p.phi) << '\n'
      << "delta = " << g9(p.delta) << '\n'
      << "u_min = " << g9(p.u_min) << '\n'
      << "u_max = " << g9(p.u_max) << '\n'
      << "v_min = " << g9(p.v_min) << '\n'
      << "v_max = " << g9(p.v_max) << '\n'
      << "dt = " << g9(p.dt) << '\n'
      << "beta = " << g9(p.beta) << '\n'
      << "k1 = " << g9(p.k1) << '\n'
      << "k2 = " << g9(p.k2) << '\n'
      << "k_v = " << g9(p.k_v) << '\n'
      << "eps_clf = " << g9(p.eps_clf) << '\n'
      << "lambda_e = " << g9(p.lambda_e) << '\n'
      << "arrival_rate_main = " << g9(cfg.arrival_rate_main) << '\n'
      << "arrival_rate_merge = " << g9(cfg.arrival_rate_merge) << '\n'
      << "v0_min = " << g9(cfg.v0_min) << '\n'
      << "v0_max = " << g9(cfg.v0_max) << '\n'
      << "horizon = " << g9(cfg.horizon) << '\n'
      << "seed = " << cfg.seed << '\n'
      << "mode = " << to_string(cfg.mode) << '\n'
      << "speed_limit_rows = " << (cfg.speed_limit_rows ? "on" : "off") << '\n';
  return out.str();
}

namespace {

json config_to_json(const ScenarioConfig& cfg) {
  const SimParams& p = cfg.params;
  return json{{"L", p.L},
              {"phi", p.phi},
              {"delta", p.delta},
              {"u_min", p.u_min},
              {"u_max", p.u_max},
              {"v_min", p.v_min},
              {"v_max", p.v_max},
              {"dt", p.dt},
              {"beta", p.beta},
              {"k1", p.k1},
              {"k2", p.k2},
              {"k_v", p.k_v},
              {"eps_clf", p.eps_clf},
              {"lambda_e", p.lambda_e},
              {"arrival_rate_main", cfg.arrival_rate_main},
              {"arrival_rate_merge", cfg.arrival_rate_merge},
              {"v0_min", cfg.v0_min},
              {"v0_max", cfg.v0_max},
              {"horizon", cfg.horizon},
              {"seed", cfg.seed},
              {"mode", to_string(cfg.mode)},
              {"speed_limit_rows", cfg.speed_limit_rows}};
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg;
  SimParams& p = cfg.params;
  for (const auto& [key, value] : j.items()) {
    if (key == "L") p.L = value.get<double>();
    else if (key == "phi") p.phi = value.get<double>();
    else if (key == "delta") p.delta = value.get<double>();
    else if (key == "u_min") p.u_min = value.get<double>();
    else if (key == "u_max") p.u_max = value.get<double>();
    else if (key == "v_min") p.v_min = value.get<double>();
    else if (key == "v_max") p.v_max = value.get<double>();
    else if (key == "dt") p.dt = value.get<double>();
    else if (key == "beta") p.beta = value.get<double>();
    else if (key == "k1") p.k1 = value.get<double>();
    else if (key == "k2") p.k2 = value.get<double>();
    else if (key == "k_v") p.k_v = value.get<double>();
    else if (key == "eps_clf") p.eps_clf = value.get<double>();
    else if (key == "lambda_e") p.lambda_e = value.get<double>();
    else if (key == "arrival_rate_main") cfg.arrival_rate_main = value.get<double>();
    else if (key == "arrival_rate_merge") cfg.arrival_rate_merge = value.get<double>();
    else if (key == "v0_min") cfg.v0_min = value.get<double>();
    else if (key == "v0_max") cfg.v0_max = value.get<double>();
    else if (key == "horizon") cfg.horizon = value.get<double>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "mode") cfg.mode = parse_mode(value.get<std::string>());
    else if (key == "speed_limit_rows") cfg.speed_limit_rows = value.get<bool>();
    else throw ConfigError("trace header: unknown config key '" + key + "'");
  }
  return cfg;
}

}  // namespace

std::string serialize_trace(const TraceFile& trace) {
  json header;
  header["trace"] = "mergesim";
  header["version"] = trace.version;
  header["config"] = config_to_json(trace.config);

  std::vector<const StepRecord*> rows;
  rows.reserve(trace.records.size());
  for (const StepRecord& r : trace.records) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const StepRecord* a, const StepRecord* b) {
    if (a->t != b->t) return a->t < b->t;
    return a->fifo_index < b->fifo_index;
  });

  std::ostringstream out;
  out << header.dump() << '\n' << kCsvHeader << '\n';
  for (const StepRecord* r : rows) {
    out << g9(r->t) << ',' << r->vehicle_id << ',' << r->fifo_index << ','
        << to_string(r->lane) << ',' << g9(r->x) << ',' << g9(r->v) << ','
        << g9(r->u_applied) << ',' << g9(r->u_ref) << ',' << g9(r->e) << ','
        << to_string(r->qp_status) << ',' << g9(r->feasible_lo) << ','
        << g9(r->feasible_hi) << ',' << g9_opt(r->barriers.b1) << ','
        << g9_opt(r->barriers.b2) << ',' << g9_opt(r->barriers.b_eta1) << ','
        << g9_opt(r->barriers.b_eta2) << ',' << g9_opt(r->barriers.bf_rear) << ','
        << g9_opt(r->barriers.bf_merge) << '\n';
  }
  return out.str();
}

TraceFile parse_trace_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace: empty input");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("trace: bad header: ") + e.what());
  }
  if (!header.contains("trace") || header["trace"] != "mergesim") {
    throw ConfigError("trace: missing mergesim header");
  }
  TraceFile trace;
  trace.version = header.value("version", std::string(kVersion));
  trace.config = config_from_json(header.at("config"));

  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw ConfigError("trace: missing column header");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 18) {
      throw ConfigError("trace: expected 18 columns, got " + std::to_string(f.size()));
    }
    StepRecord r;
    r.t = std::strtod(f[0].c_str(), nullptr);
    r.vehicle_id = static_cast<int>(std::strtol(f[1].c_str(), nullptr, 10));
    r.fifo_index = static_cast<int>(std::strtol(f[2].c_str(), nullptr, 10));
    r.lane = parse_lane(f[3]);
    r.x = std::strtod(f[4].c_str(), nullptr);
    r.v = std::strtod(f[5].c_str(), nullptr);
    r.u_applied = std::strtod(f[6].c_str(), nullptr);
    r.u_ref = std::strtod(f[7].c_str(), nullptr);
    r.e = std::strtod(f[8].c_str(), nullptr);
    r.qp_status = parse_status(f[9]);
    r.feasible_lo = std::strtod(f[10].c_str(), nullptr);
    r.feasible_hi = std::strtod(f[11].c_str(), nullptr);
    r.barriers.b1 = field_opt(f[12]);
    r.barriers.b2 = field_opt(f[13]);
    r.barriers.b_eta1 = field_opt(f[14]);
    r.barriers.b_eta2 = field_opt(f[15]);
    r.barriers.bf_rear = field_opt(f[16]);
    r.barriers.bf_merge = field_opt(f[17]);
    trace.records.push_back(r);
  }
  return trace;
}

TraceFile parse_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace_text(ss.str());
}

void write_trace(const TraceFile& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << serialize_trace(trace);
}

namespace {

json opt_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

std::string serialize_summary(const RunSummary& summary) {
  json jv = json::array();
  for (const VehicleSummary& v : summary.vehicles) {
    jv.push_back(json{{"id", v.id},
                      {"lane", to_string(v.lane)},
                      {"t0", v.t0},
                      {"tm", opt_to_json(v.tm)},
                      {"travel_time", v.completed ? json(v.travel_time) : json(nullptr)},
                      {"energy", v.energy},
                      {"infeasible_steps", v.infeasible_steps},
                      {"min_b1", opt_to_json(v.min_b1)},
                      {"min_b2", opt_to_json(v.min_b2)},
                      {"violated_rear", v.violated_rear},
                      {"violated_merge", v.violated_merge},
                      {"completed", v.completed}});
  }
  json j;
  j["vehicles"] = jv;
  j["aggregates"] = json{{"mean_travel_time", summary.mean_travel_time},
                         {"mean_energy", summary.mean_energy},
                         {"total_infeasible_steps", summary.total_infeasible_steps},
                         {"min_b1", opt_to_json(summary.min_b1)},
                         {"min_b2", opt_to_json(summary.min_b2)},
                         {"completed_count", summary.completed_count},
                         {"in_zone_at_end", summary.in_zone_at_end},
                         {"velocity_clamp_events", summary.velocity_clamp_events},
                         {"rows_audited", summary.rows_audited},
                         {"rows_bad_direction", summary.rows_bad_direction}};
  return j.dump(2) + "\n";
}

CompareResult run_compare(const ScenarioConfig& cfg) {
  validate(cfg);
  ScenarioConfig cfg_o = cfg;
  cfg_o.mode = Mode::Ocbf;
  ScenarioConfig cfg_f = cfg;
  cfg_f.mode = Mode::FgOcbf;

  auto [rec_o, sum_o] = Simulation::run(cfg_o);
  auto [rec_f, sum_f] = Simulation::run(cfg_f);

  CompareResult res;
  res.ocbf = TraceFile{cfg_o, kVersion, std::move(rec_o)};
  res.fg = TraceFile{cfg_f, kVersion, std::move(rec_f)};
  res.report.seed = cfg.seed;
  res.report.total_infeasible_ocbf = sum_o.total_infeasible_steps;
  res.report.total_infeasible_fg = sum_f.total_infeasible_steps;
  res.report.min_b1_ocbf = sum_o.min_b1;
  res.report.min_b2_ocbf = sum_o.min_b2;
  res.report.min_b1_fg = sum_f.min_b1;
  res.report.min_b2_fg = sum_f.min_b2;

  // Per-vehicle step sequences, in record order (time-ascending).
  struct PerVehicle {
    std::vector<const StepRecord*> ocbf, fg;
  };
  std::map<int, PerVehicle> by_id;
  for (const StepRecord& r : res.ocbf.records) by_id[r.vehicle_id].ocbf.push_back(&r);
  for (const StepRecord& r : res.fg.records) by_id[r.vehicle_id].fg.push_back(&r);

  std::map<int, const VehicleSummary*> vo, vf;
  for (const VehicleSummary& v : sum_o.vehicles) vo[v.id] = &v;
  for (const VehicleSummary& v : sum_f.vehicles) vf[v.id] = &v;

  for (const auto& [id, pv] : by_id) {
    VehicleComparison c;
    c.id = id;
    if (!pv.ocbf.empty()) c.lane = pv.ocbf.front()->lane;
    else if (!pv.fg.empty()) c.lane = pv.fg.front()->lane;
    for (const StepRecord* r : pv.ocbf) {
      if (r->qp_status == QpStatus::Infeasible) {
        c.first_infeasible_ocbf = r->t;
        break;
      }
    }
    for (const StepRecord* r : pv.fg) {
      if (r->qp_status == QpStatus::Infeasible) {
        c.first_infeasible_fg = r->t;
        break;
      }
    }
    if (auto it = vo.find(id); it != vo.end()) {
      c.min_b1_ocbf = it->second->min_b1;
      c.min_b2_ocbf = it->second->min_b2;
    }
    if (auto it = vf.find(id); it != vf.end()) {
      c.min_b1_fg = it->second->min_b1;
      c.min_b2_fg = it->second->min_b2;
    }
    const std::size_t n = std::min(pv.ocbf.size(), pv.fg.size());
    for (std::size_t k = 0; k < n; ++k) {
      const StepRecord* a = pv.ocbf[k];
      const StepRecord* b = pv.fg[k];
      if (a->t != b->t || a->feasible_lo != b->feasible_lo ||
          a->feasible_hi != b->feasible_hi) {
        c.divergence_time = std::min(a->t, b->t);
        break;
      }
    }
    if (!c.divergence_time && pv.ocbf.size() != pv.fg.size()) {
      // one mode left the zone earlier; the first unpaired step diverges
      const auto& longer = pv.ocbf.size() > pv.fg.size() ? pv.ocbf : pv.fg;
      c.divergence_time = longer[n]->t;
    }
    res.report.vehicles.push_back(c);
  }
  return res;
}

std::string serialize_report(const ComparisonReport& report) {
  json jv = json::array();
  for (const VehicleComparison& c : report.vehicles) {
    jv.push_back(json{{"id", c.id},
                      {"lane", to_string(c.lane)},
                      {"first_infeasible_ocbf", opt_to_json(c.first_infeasible_ocbf)},
                      {"first_infeasible_fg", opt_to_json(c.first_infeasible_fg)},
                      {"min_b1_ocbf", opt_to_json(c.min_b1_ocbf)},
                      {"min_b2_ocbf", opt_to_json(c.min_b2_ocbf)},
                      {"min_b1_fg", opt_to_json(c.min_b1_fg)},
                      {"min_b2_fg", opt_to_json(c.min_b2_fg)},
                      {"divergence_time", opt_to_json(c.divergence_time)}});
  }
  json j;
  j["seed"] = report.seed;
  j["vehicles"] = jv;
  j["totals"] = json{{"infeasible_ocbf", report.total_infeasible_ocbf},
                     {"infeasible_fg", report.total_infeasible_fg},
                     {"min_b1_ocbf", opt_to_json(report.min_b1_ocbf)},
                     {"min_b2_ocbf", opt_to_json(report.min_b2_ocbf)},
                     {"min_b1_fg", opt_to_json(report.min_b1_fg)},
                     {"min_b2_fg", opt_to_json(report.min_b2_fg)}};
  return j.dump(2) + "\n";
}

std::string emit_plot_data(const TraceFile& trace, int vehicle_id) {
  std::ostringstream out;
  out << "t,u,feasible_lo,feasible_hi,u_min,u_max,b1,b2\n";
  bool found = false;
  for (const StepRecord& r : trace.records) {
    if (r.vehicle_id != vehicle_id) continue;
    found = true;
    out << g9(r.t) << ',' << g9(r.u_applied) << ',' << g9(r.feasible_lo) << ','
        << g9(r.feasible_hi) << ',' << g9(trace.config.params.u_min) << ','
        << g9(trace.config.params.u_max) << ',' << g9_opt(r.barriers.b1) << ','
        << g9_opt(r.barriers.b2) << '\n';
  }
  if (!found) {
    throw UnknownVehicle("vehicle " + std::to_string(vehicle_id) + " not in trace");
  }
  return out.str();
}

}  // namespace ocbf
