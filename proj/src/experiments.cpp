#include "radreact/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "radreact/errors.hpp"
#include "radreact/maxaccel.hpp"
#include "radreact/worldline.hpp"
#include "text_util.hpp"

namespace radreact {

using json = nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::config, path + ": " + msg);
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  return j;
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return key == a; });
    if (!ok) config_error(path + "." + key, "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(path, "must be finite");
  return v;
}

double required_number(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) config_error(path + "." + key, "required");
  return number(obj.at(key), path + "." + key);
}

double optional_number(const json& obj, const char* key, const std::string& path,
                       double fallback) {
  return obj.contains(key) ? number(obj.at(key), path + "." + key) : fallback;
}

std::string text(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) config_error(path + "." + key, "required");
  const auto& v = obj.at(key);
  if (!v.is_string()) config_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

template <std::size_t N>
std::array<double, N> vector_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != N) {
    config_error(path, "expected an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return out;
}

FourVector four(const json& j, const std::string& path) {
  const auto a = vector_of<4>(j, path);
  return {a[0], a[1], a[2], a[3]};
}

ParamWindow window_of(const json& j, const std::string& path) {
  check_keys(j, path, {"on", "off"});
  ParamWindow w;
  if (j.contains("on")) w.on = number(j.at("on"), path + ".on");
  if (j.contains("off")) w.off = number(j.at("off"), path + ".off");
  return w;
}

FieldSpec field_of(const json& j, const std::string& path) {
  if (!j.is_array()) config_error(path, "expected an array of field components");
  FieldSpec f;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& c = require_object(j[i], p);
    const std::string kind = text(c, "kind", p);
    const ParamWindow w = c.contains("window") ? window_of(c.at("window"), p + ".window")
                                               : ParamWindow{};
    if (kind == "vacuum") {
      check_keys(c, p, {"kind", "window"});
      f.add(VacuumField{}, w);
    } else if (kind == "constant") {
      check_keys(c, p, {"kind", "window", "E", "B"});
      ConstantField s;
      if (c.contains("E")) s.E = vector_of<3>(c.at("E"), p + ".E");
      if (c.contains("B")) s.B = vector_of<3>(c.at("B"), p + ".B");
      f.add(s, w);
    } else if (kind == "gaussian_pulse") {
      check_keys(c, p, {"kind", "window", "kappa", "width", "center", "direction"});
      GaussianPulse s;
      s.kappa = required_number(c, "kappa", p);
      s.width = required_number(c, "width", p);
      if (!(s.width > 0.0)) config_error(p + ".width", "must be positive");
      s.center = optional_number(c, "center", p, 0.0);
      if (c.contains("direction")) s.direction = vector_of<3>(c.at("direction"), p + ".direction");
      f.add(s, w);
    } else if (kind == "plane_wave") {
      check_keys(c, p, {"kind", "window", "amplitude", "wave_vector", "polarization", "phase"});
      PlaneWave s;
      s.amplitude = required_number(c, "amplitude", p);
      if (!c.contains("wave_vector")) config_error(p + ".wave_vector", "required");
      s.wave_vector = vector_of<3>(c.at("wave_vector"), p + ".wave_vector");
      if (c.contains("polarization")) {
        s.polarization = vector_of<3>(c.at("polarization"), p + ".polarization");
      }
      s.phase = optional_number(c, "phase", p, 0.0);
      f.add(s, w);
    } else {
      config_error(p + ".kind", "unknown field kind '" + kind + "'");
    }
  }
  try {
    f.validate();
  } catch (const Error& e) {
    config_error(path, e.what());
  }
  return f;
}

json window_json(const ParamWindow& w) {
  json j = json::object();
  if (std::isfinite(w.on)) j["on"] = w.on;
  if (std::isfinite(w.off)) j["off"] = w.off;
  return j;
}

}  // namespace

std::string field_to_json(const FieldSpec& field) {
  json arr = json::array();
  for (const auto& c : field.components) {
    json j = std::visit(
        [](const auto& s) -> json {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, VacuumField>) {
            return {{"kind", "vacuum"}};
          } else if constexpr (std::is_same_v<T, ConstantField>) {
            return {{"kind", "constant"}, {"E", s.E}, {"B", s.B}};
          } else if constexpr (std::is_same_v<T, GaussianPulse>) {
            return {{"kind", "gaussian_pulse"}, {"kappa", s.kappa}, {"width", s.width},
                    {"center", s.center}, {"direction", s.direction}};
          } else {
            return {{"kind", "plane_wave"},     {"amplitude", s.amplitude},
                    {"wave_vector", s.wave_vector}, {"polarization", s.polarization},
                    {"phase", s.phase}};
          }
        },
        c.shape);
    const json w = window_json(c.window);
    if (!w.empty()) j["window"] = w;
    arr.push_back(j);
  }
  return arr.dump();
}

FieldSpec field_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error("field", std::string("not valid JSON: ") + e.what());
  }
  return field_of(j, "field");
}

void RunConfig::validate() const {
  try {
    model.validate();
  } catch (const Error& e) {
    const std::string_view msg = e.what();
    const bool keyed = msg.starts_with("model.") || msg.starts_with("solver.");
    throw Error(ErrorCode::config, (keyed ? "" : "model: ") + std::string(msg));
  }
  try {
    field.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::config, std::string("field: ") + e.what());
  }
  if (!x0.is_finite()) config_error("init.x", "must be finite");
  for (double v : u0_spatial) {
    if (!std::isfinite(v)) config_error("init.u", "must be finite");
  }
  if (a0 && model.model != ForceModel::ald) config_error("init.a", "only the ald model takes one");
  if (a0 && !a0->is_finite()) config_error("init.a", "must be finite");
  if (!std::isfinite(tau_start) || !std::isfinite(tau_end) || !(tau_end > tau_start)) {
    config_error("tau_span", "needs finite start < end");
  }
  for (const auto* name : {&output.trajectory, &output.audit, &output.gaps}) {
    if (name->empty()) config_error("output", "file names must be non-empty");
  }
  const double th[] = {thresholds.normalization, thresholds.kinematic, thresholds.fl2_relative,
                       thresholds.larmor_factor, thresholds.mass_relative,
                       thresholds.preaccel_factor};
  for (double v : th) {
    if (!(v > 0.0) || !std::isfinite(v)) config_error("audit", "thresholds must be positive");
  }
}

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config, std::string("config: not valid JSON: ") + e.what());
  }
  check_keys(j, "config", {"model", "solver", "field", "init", "tau_span", "output", "seed", "audit"});
  RunConfig c;

  if (!j.contains("model")) config_error("model", "required");
  const json& m = j.at("model");
  check_keys(m, "model", {"name", "e", "m", "a_max", "field_raising"});
  const std::string name = text(m, "name", "model");
  try {
    c.model.model = parse_force_model(name);
  } catch (const Error& e) {
    config_error("model.name", e.what());
  }
  if (m.contains("field_raising")) {
    const std::string raising = text(m, "field_raising", "model");
    try {
      c.model.raising = parse_field_raising(raising);
    } catch (const Error& e) {
      config_error("model.field_raising", e.what());
    }
  }
  c.model.e = required_number(m, "e", "model");
  c.model.m = required_number(m, "m", "model");
  if (m.contains("a_max")) {
    c.model.a_max = number(m.at("a_max"), "model.a_max");
  } else if (requires_a_max(c.model.model)) {
    config_error("model.a_max", std::string("required for ") + to_string(c.model.model));
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver",
               {"method", "dt", "tol", "max_iter", "eps_dot_min", "runaway_factor", "max_steps"});
    auto& o = c.model.solver;
    if (s.contains("method")) {
      try {
        o.method = parse_step_method(text(s, "method", "solver"));
      } catch (const Error& e) {
        config_error("solver.method", e.what());
      }
    }
    o.dt = optional_number(s, "dt", "solver", o.dt);
    o.tol = optional_number(s, "tol", "solver", o.tol);
    o.eps_dot_min = optional_number(s, "eps_dot_min", "solver", o.eps_dot_min);
    o.runaway_factor = optional_number(s, "runaway_factor", "solver", o.runaway_factor);
    for (const char* key : {"max_iter", "max_steps"}) {
      if (!s.contains(key)) continue;
      if (!s.at(key).is_number_integer()) {
        config_error(std::string("solver.") + key, "expected an integer");
      }
      const auto v = s.at(key).get<long long>();
      if (std::string_view(key) == "max_iter") o.max_iter = static_cast<int>(v);
      else o.max_steps = static_cast<long>(v);
    }
  }

  if (!j.contains("field")) config_error("field", "required (use [] for vacuum)");
  c.field = field_of(j.at("field"), "field");

  if (!j.contains("init")) config_error("init", "required");
  const json& in = j.at("init");
  check_keys(in, "init", {"x", "u", "a"});
  if (in.contains("x")) c.x0 = four(in.at("x"), "init.x");
  if (!in.contains("u")) config_error("init.u", "required");
  c.u0_spatial = vector_of<3>(in.at("u"), "init.u");
  if (in.contains("a")) c.a0 = four(in.at("a"), "init.a");

  if (!j.contains("tau_span")) config_error("tau_span", "required");
  const auto span = vector_of<2>(j.at("tau_span"), "tau_span");
  c.tau_start = span[0];
  c.tau_end = span[1];

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"dir", "trajectory", "audit", "gaps"});
    if (o.contains("dir")) c.output.dir = text(o, "dir", "output");
    if (o.contains("trajectory")) c.output.trajectory = text(o, "trajectory", "output");
    if (o.contains("audit")) c.output.audit = text(o, "audit", "output");
    if (o.contains("gaps")) c.output.gaps = text(o, "gaps", "output");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) config_error("seed", "expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("audit")) {
    const json& a = j.at("audit");
    check_keys(a, "audit",
               {"normalization", "kinematic", "fl2_relative", "larmor_factor", "mass_relative",
                "preaccel_factor"});
    auto& t = c.thresholds;
    t.normalization = optional_number(a, "normalization", "audit", t.normalization);
    t.kinematic = optional_number(a, "kinematic", "audit", t.kinematic);
    t.fl2_relative = optional_number(a, "fl2_relative", "audit", t.fl2_relative);
    t.larmor_factor = optional_number(a, "larmor_factor", "audit", t.larmor_factor);
    t.mass_relative = optional_number(a, "mass_relative", "audit", t.mass_relative);
    t.preaccel_factor = optional_number(a, "preaccel_factor", "audit", t.preaccel_factor);
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config, "config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void write_trajectory_csv(const TrajectoryRecord& traj, std::ostream& out) {
  for (const auto& [k, v] : traj.metadata) out << "# " << k << '=' << v << '\n';
  out << "# status=" << to_string(traj.status) << '\n';
  out << "# status_detail=" << traj.status_detail << '\n';
  for (const auto& e : traj.events) {
    out << "# event=" << to_string(e.kind) << '|' << detail::fmt17(e.tau) << '|' << e.detail
        << '\n';
  }
  const auto& names = TrajectoryRecord::column_names();
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  std::vector<std::vector<double>> cols;
  for (const auto& n : names) cols.push_back(traj.column(n));
  for (std::size_t r = 0; r < traj.rows.size(); ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << detail::fmt17(cols[i][r]);
    }
    out << '\n';
  }
}

TrajectoryRecord read_trajectory_csv(std::istream& in) {
  TrajectoryRecord t;
  std::string line;
  const auto& names = TrajectoryRecord::column_names();
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = detail::trim_cr(line);
    if (s.empty()) continue;
    if (!header && s.rfind("# ", 0) == 0) {
      const auto body = s.substr(2);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::io, "line " + std::to_string(lineno) + ": bad metadata line");
      }
      const std::string key(body.substr(0, eq));
      const std::string value(body.substr(eq + 1));
      if (key == "status") {
        t.status = parse_run_status(value);
      } else if (key == "status_detail") {
        t.status_detail = value;
      } else if (key == "event") {
        const auto p1 = value.find('|');
        const auto p2 = p1 == std::string::npos ? p1 : value.find('|', p1 + 1);
        if (p2 == std::string::npos) {
          throw Error(ErrorCode::io, "line " + std::to_string(lineno) + ": bad event line");
        }
        t.events.push_back({parse_event_kind(value.substr(0, p1)),
                            detail::parse_double(value.substr(p1 + 1, p2 - p1 - 1)),
                            value.substr(p2 + 1)});
      } else {
        t.metadata[key] = value;
      }
      continue;
    }
    const auto fields = detail::split(s, ',');
    if (!header) {
      if (fields.size() != names.size() ||
          !std::equal(fields.begin(), fields.end(), names.begin())) {
        throw Error(ErrorCode::io, "trajectory header does not match the column list");
      }
      header = true;
      continue;
    }
    if (fields.size() != names.size()) {
      throw Error(ErrorCode::io, "line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(names.size()) + " fields");
    }
    double v[20];
    for (std::size_t i = 0; i < 20; ++i) v[i] = detail::parse_double(fields[i]);
    TrajectoryRow r;
    r.tau = v[0];
    r.x = {v[1], v[2], v[3], v[4]};
    r.u = {v[5], v[6], v[7], v[8]};
    r.a = {v[9], v[10], v[11], v[12]};
    r.epsilon = v[13];
    r.epsilon_dot = v[14];
    r.a_sq = v[15];
    r.fL2 = v[16];
    r.m_b = v[17];
    r.larmor_residual = v[18];
    r.g_norm_residual = v[19];
    t.rows.push_back(r);
  }
  if (!header) throw Error(ErrorCode::io, "trajectory file has no header");
  return t;
}

bool same_record(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.rows.size() != b.rows.size() || a.status != b.status ||
      a.status_detail != b.status_detail || a.metadata != b.metadata) {
    return false;
  }
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto& x = a.events[i];
    const auto& y = b.events[i];
    if (x.kind != y.kind || x.detail != y.detail ||
        std::memcmp(&x.tau, &y.tau, sizeof(double)) != 0) {
      return false;
    }
  }
  for (const auto& n : TrajectoryRecord::column_names()) {
    const auto ca = a.column(n), cb = b.column(n);
    for (std::size_t i = 0; i < ca.size(); ++i) {
      const bool both_nan = std::isnan(ca[i]) && std::isnan(cb[i]);
      if (!both_nan && std::memcmp(&ca[i], &cb[i], sizeof(double)) != 0) return false;
    }
  }
  return true;
}

RunOutcome run_simulation(const RunConfig& config) {
  config.validate();
  const auto init = initial_state(config.model, config.field, config.x0, config.u0_spatial,
                                  config.tau_start, config.a0);
  RunOutcome out;
  out.trajectory = integrate(config.model, config.field, init, config.tau_start, config.tau_end);
  out.trajectory.metadata["field"] = field_to_json(config.field);
  out.trajectory.metadata["seed"] = std::to_string(config.seed);
  out.trajectory.metadata["code_version"] = kCodeVersion;
  out.report = audit(out.trajectory, config.model, config.field, config.thresholds);
  return out;
}

int exit_code(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::ok: return 0;
    case RunStatus::no_convergence: return 3;
    case RunStatus::maxaccel_breach: return 4;
    case RunStatus::runaway_abort: return 5;
    case RunStatus::regime_violation: return 7;
  }
  return 10;
}

bool CompareResult::all_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const ModelRun& r) {
    return r.trajectory && r.trajectory->status == RunStatus::ok;
  });
}

std::string CompareResult::gap_json() const {
  nlohmann::ordered_json j;
  j["epsilon0"] = epsilon0;
  auto& models = j["models"] = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    nlohmann::ordered_json m;
    m["model"] = to_string(r.model);
    m["status"] = r.trajectory ? to_string(r.trajectory->status) : "not_started";
    if (!r.error.empty()) m["error"] = r.error;
    models.push_back(m);
  }
  auto& gaps_j = j["gaps"] = nlohmann::ordered_json::array();
  for (const auto& g : gaps) {
    gaps_j.push_back({{"a", to_string(g.a)},
                      {"b", to_string(g.b)},
                      {"position_gap", g.gap.position},
                      {"velocity_gap", g.gap.velocity}});
  }
  return j.dump(2) + "\n";
}

CompareResult run_compare(const RunConfig& config, const std::vector<ForceModel>& models) {
  CompareResult res;
  for (ForceModel m : models) {
    ModelRun run;
    run.model = m;
    RunConfig c = config;
    c.model.model = m;
    if (m != ForceModel::ald) c.a0.reset();
    try {
      run.trajectory = run_simulation(c).trajectory;
    } catch (const Error& e) {
      run.error = e.what();
    }
    res.runs.push_back(std::move(run));
  }
  for (const auto& r : res.runs) {
    if (!r.trajectory) continue;
    for (const auto& row : r.trajectory->rows) {
      if (std::isfinite(row.epsilon)) res.epsilon0 = std::max(res.epsilon0, row.epsilon);
    }
  }
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    for (std::size_t k = i + 1; k < res.runs.size(); ++k) {
      const auto& a = res.runs[i];
      const auto& b = res.runs[k];
      if (!a.trajectory || !b.trajectory) continue;
      res.gaps.push_back({a.model, b.model, trajectory_gap(*a.trajectory, *b.trajectory)});
    }
  }
  return res;
}

bool CanonicalResult::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CanonicalCheck& c) { return c.pass; });
}

const std::vector<std::string>& canonical_names() {
  static const std::vector<std::string> names{"pulse", "runaway", "hyperbolic", "reparam",
                                              "identity_suite"};
  return names;
}

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ForceModelSpec unit_spec(ForceModel model, double a_max, double dt) {
  ForceModelSpec s;
  s.model = model;
  s.e = 1.0;
  s.m = 1.0;
  s.a_max = a_max;
  s.solver.dt = dt;
  return s;
}

CanonicalResult canonical_pulse() {
  CanonicalResult r{"pulse", {}};
  auto s = unit_spec(ForceModel::implicit_maxaccel, 1e6, 1e-2);
  s.solver.method = StepMethod::rk45_adaptive;
  s.solver.tol = 1e-12;
  PulseProbeOptions opt;
  opt.max_nonrel_ratio = 0.5;
  const auto res = preacceleration_probe(s, {0.1, 0.01, 0.001}, 0.5, opt);
  double pre = 0.0;
  for (const auto& row : res.rows) pre = std::max(pre, row.pre_max);
  const auto& fine = res.rows.back();
  r.checks.push_back({"post_pulse_u1", fine.error <= 1e-3,
                      "u1 = " + g6(fine.post) + " target " + g6(fine.target) + " at w = " +
                          g6(fine.width)});
  r.checks.push_back({"pre_pulse_quiet", pre <= 1e-9, "max |u1| before -5w = " + g6(pre)});
  const double slope = res.width_fit ? res.width_fit->slope : std::nan("");
  r.checks.push_back({"width_slope", slope >= 0.8 && slope <= 1.2, "slope " + g6(slope)});
  return r;
}

CanonicalResult canonical_runaway() {
  CanonicalResult r{"runaway", {}};
  auto ald = unit_spec(ForceModel::ald, 0.0, 1e-3);
  const auto vac = FieldSpec::vacuum();
  const auto t = integrate(ald, vac, initial_state(ald, vac, {}, {0, 0, 0}, 0, FourVector{0, 1e-6, 0, 0}),
                           0, 30);
  const auto rep = audit(t, ald, vac);
  const double rate = rep.fits.count("runaway_rate") ? rep.fits.at("runaway_rate").slope : 0.0;
  const double expected = 1.0 / ald.tau0();
  r.checks.push_back({"ald_runaway_flagged", rep.runaway_detected,
                      std::string("status ") + to_string(t.status)});
  r.checks.push_back({"ald_rate", std::abs(rate - expected) <= 0.02 * expected,
                      "rate " + g6(rate) + " expected " + g6(expected)});

  auto imp = unit_spec(ForceModel::implicit_maxaccel, 10.0, 1e-2);
  const auto ti = integrate(imp, vac, initial_state(imp, vac, {}, {0.3, 0, 0}, 0), 0, 30);
  double a2 = 0.0;
  for (const auto& row : ti.rows) a2 = std::max(a2, std::abs(row.a_sq));
  r.checks.push_back({"implicit_stays_unaccelerated", ti.status == RunStatus::ok && a2 <= 1e-12,
                      "max a^2 = " + g6(a2)});
  return r;
}

CanonicalResult canonical_hyperbolic() {
  CanonicalResult r{"hyperbolic", {}};
  const auto f = FieldSpec::constant({1, 0, 0});
  auto run = [&](double dt) {
    const auto s = unit_spec(ForceModel::lorentz, 0.0, dt);
    return integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, 0), 0, 5);
  };
  const auto t = run(1e-3);
  double worst = 0.0;
  for (const auto& row : t.rows) {
    const double c = std::cosh(row.tau);
    worst = std::max({worst, std::abs(row.x[0] - std::sinh(row.tau)) / c,
                      std::abs(row.x[1] - (c - 1.0)) / c});
  }
  r.checks.push_back({"closed_form", worst <= 1e-8, "max relative error " + g6(worst)});
  std::vector<double> dts{1e-2, 5e-3, 2.5e-3, 1.25e-3}, errs;
  for (double dt : dts) {
    const auto tr = run(dt);
    const auto& last = tr.rows.back();
    errs.push_back(std::max(std::abs(last.x[0] - std::sinh(5.0)),
                            std::abs(last.x[1] - (std::cosh(5.0) - 1.0))));
  }
  const double slope = fit_loglog(dts, errs).slope;
  r.checks.push_back({"rk4_order", std::abs(slope - 4.0) <= 0.2, "slope " + g6(slope)});
  return r;
}

CanonicalResult canonical_reparam(std::uint64_t seed) {
  CanonicalResult r{"reparam", {}};
  const double a_max = 10.0;
  const auto curve = sample_curve(
      [](double t) { return FourVector{std::sinh(t), std::cosh(t) - 1.0, 0.0, 0.0}; }, 0.0, 2.0,
      4001);
  const double ref = proper_time_maxaccel(curve, a_max).value;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha(-0.9, 0.9), beta(0.5, 3.0);
  double lo = ref, hi = ref;
  for (int k = 0; k < 20; ++k) {
    const double al = alpha(rng), be = beta(rng);
    const auto warped =
        reparameterize(curve, [=](double t) { return t + al * std::sin(be * t) / be; });
    const double v = proper_time_maxaccel(warped, a_max).value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double spread = (hi - lo) / ref;
  r.checks.push_back({"tau_spread", spread <= 1e-6, "relative spread " + g6(spread)});
  return r;
}

CanonicalResult canonical_identities(std::uint64_t seed) {
  CanonicalResult r{"identity_suite", {}};
  auto s = unit_spec(ForceModel::implicit_maxaccel, 1e-2, 1e-2);
  const auto f = FieldSpec::constant({1e-4, 0, 0});
  const auto t = integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, 0), 0, 50);
  const auto rep = audit(t, s, f);
  const auto& fl2 = rep.check("fl2_identity");
  r.checks.push_back({"fl2_identity", t.status == RunStatus::ok && fl2.pass,
                      "max relative residual " + g6(fl2.max_residual)});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    WorldlineState st;
    const Vec3 v{uni(rng), uni(rng), uni(rng)};
    st.u = {std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]), v[0], v[1], v[2]};
    const EMFieldTensor F{{uni(rng), uni(rng), uni(rng)}, {uni(rng), uni(rng), uni(rng)}};
    const double e = uni(rng), m = 1.5 + uni(rng);
    const Matrix4 prod = operator_M(st, F, e, m) * operator_O(st, F, e, m);
    worst = std::max(worst, prod.max_abs_diff(Matrix4::identity()));
  }
  r.checks.push_back({"operator_inverse", worst <= 1e-13, "max |M O - I| " + g6(worst)});

  const auto& lar = rep.check("larmor_contraction");
  r.checks.push_back({"larmor_contraction", lar.pass,
                      "max residual " + g6(lar.max_residual) + " bound " + g6(lar.tolerance)});
  return r;
}

}  // namespace

CanonicalResult run_canonical(std::string_view name, std::uint64_t seed) {
  if (name == "pulse") return canonical_pulse();
  if (name == "runaway") return canonical_runaway();
  if (name == "hyperbolic") return canonical_hyperbolic();
  if (name == "reparam") return canonical_reparam(seed);
  if (name == "identity_suite") return canonical_identities(seed);
  throw Error(ErrorCode::config, "unknown canonical scenario '" + std::string(name) + "'");
}

}  // namespace radreact
