#include "radreact/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "radreact/errors.hpp"
#include "radreact/maxaccel.hpp"
#include "text_util.hpp"

namespace radreact {

const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::uniform_stratum_entry: return "uniform_stratum_entry";
    case EventKind::uniform_stratum_exit: return "uniform_stratum_exit";
    case EventKind::continuation_point: return "continuation_point";
    case EventKind::maxaccel_breach: return "maxaccel_breach";
    case EventKind::runaway_abort: return "runaway_abort";
    case EventKind::no_convergence: return "no_convergence";
  }
  return "unknown";
}

EventKind parse_event_kind(std::string_view name) {
  for (EventKind k : {EventKind::uniform_stratum_entry, EventKind::uniform_stratum_exit,
                      EventKind::continuation_point, EventKind::maxaccel_breach,
                      EventKind::runaway_abort, EventKind::no_convergence}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::io, "unknown event kind '" + std::string(name) + "'");
}

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::maxaccel_breach: return "maxaccel_breach";
    case RunStatus::no_convergence: return "no_convergence";
    case RunStatus::runaway_abort: return "runaway_abort";
    case RunStatus::regime_violation: return "regime_violation";
  }
  return "unknown";
}

RunStatus parse_run_status(std::string_view name) {
  for (RunStatus s : {RunStatus::ok, RunStatus::maxaccel_breach, RunStatus::no_convergence,
                      RunStatus::runaway_abort, RunStatus::regime_violation}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::io, "unknown run status '" + std::string(name) + "'");
}

const std::vector<std::string>& TrajectoryRecord::column_names() {
  static const std::vector<std::string> names{
      "tau",     "x0",          "x1",   "x2",  "x3",  "u0",
      "u1",      "u2",          "u3",   "a0",  "a1",  "a2",
      "a3",      "epsilon",     "epsilon_dot", "a_sq", "fL2", "m_b",
      "larmor_residual", "g_norm_residual"};
  return names;
}

std::vector<double> TrajectoryRecord::column(std::string_view name) const {
  const auto& names = column_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(ErrorCode::invalid_argument, "unknown column '" + std::string(name) + "'");
  }
  const auto idx = static_cast<std::size_t>(it - names.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    double v;
    if (idx == 0) v = r.tau;
    else if (idx < 5) v = r.x[idx - 1];
    else if (idx < 9) v = r.u[idx - 5];
    else if (idx < 13) v = r.a[idx - 9];
    else {
      const double tail[] = {r.epsilon, r.epsilon_dot, r.a_sq, r.fL2,
                             r.m_b,     r.larmor_residual, r.g_norm_residual};
      v = tail[idx - 13];
    }
    out.push_back(v);
  }
  return out;
}

FourVector model_acceleration(const ForceModelSpec& spec, const FieldSpec& field, double tau,
                              const FourVector& x, const FourVector& u,
                              std::optional<FourVector> seed) {
  WorldlineState s;
  s.tau = tau;
  s.x = x;
  s.u = u;
  switch (spec.model) {
    case ForceModel::lorentz:
    case ForceModel::uniform_covariant:
      return (spec.e / spec.m) * field_apply(faraday_at(field, x, tau), u);
    case ForceModel::landau_lifshitz:
      return landau_lifshitz_accel(s, field, spec.e, spec.m, tau);
    case ForceModel::implicit_maxaccel:
      return solve_implicit_accel(s, faraday_at(field, x, tau), spec, seed).a;
    case ForceModel::explicit_approx:
      return explicit_approx_accel(s, faraday_at(field, x, tau), spec.e, spec.m);
    case ForceModel::ald:
      break;
  }
  throw Error(ErrorCode::invalid_argument, "the ald model carries its acceleration as state");
}

namespace {

constexpr std::size_t kMaxDim = 12;
using Vec = std::array<double, kMaxDim>;

bool third_order(ForceModel m) { return m == ForceModel::ald; }

FourVector part(const Vec& y, std::size_t off) {
  return {y[off], y[off + 1], y[off + 2], y[off + 3]};
}

void put(Vec& y, std::size_t off, const FourVector& v) {
  for (std::size_t i = 0; i < 4; ++i) y[off + i] = v[i];
}

struct System {
  const ForceModelSpec& spec;
  const FieldSpec& field;
  std::optional<FourVector> seed;

  std::size_t dim() const { return third_order(spec.model) ? 12 : 8; }

  Vec rhs(double tau, const Vec& y) const {
    const FourVector x = part(y, 0), u = part(y, 4);
    Vec d{};
    put(d, 0, u);
    if (third_order(spec.model)) {
      WorldlineState s;
      s.x = x;
      s.u = u;
      s.a = part(y, 8);
      put(d, 4, s.a);
      put(d, 8, ald_jerk(s, faraday_at(field, x, tau), spec.e, spec.m));
    } else {
      put(d, 4, model_acceleration(spec, field, tau, x, u, seed));
    }
    return d;
  }

  Vec stage(int k, double tau, const Vec& y) const {
    try {
      return rhs(tau, y);
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + std::to_string(k) + ": " + e.what());
    }
  }
};

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms,
         std::size_t dim) {
  Vec out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < dim; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

Vec rk4(const System& sys, double tau, const Vec& y, double h) {
  const std::size_t n = sys.dim();
  const Vec k1 = sys.stage(1, tau, y);
  const Vec k2 = sys.stage(2, tau + 0.5 * h, axpy(y, h, {{0.5, &k1}}, n));
  const Vec k3 = sys.stage(3, tau + 0.5 * h, axpy(y, h, {{0.5, &k2}}, n));
  const Vec k4 = sys.stage(4, tau + h, axpy(y, h, {{1.0, &k3}}, n));
  return axpy(y, h, {{1.0 / 6.0, &k1}, {1.0 / 3.0, &k2}, {1.0 / 3.0, &k3}, {1.0 / 6.0, &k4}},
              n);
}

// Dormand-Prince 5(4); returns the 5th-order solution and the error estimate.
std::pair<Vec, Vec> dopri(const System& sys, double tau, const Vec& y, double h) {
  const std::size_t n = sys.dim();
  const Vec k1 = sys.stage(1, tau, y);
  const Vec k2 = sys.stage(2, tau + h / 5.0, axpy(y, h, {{1.0 / 5.0, &k1}}, n));
  const Vec k3 = sys.stage(3, tau + 3.0 * h / 10.0,
                           axpy(y, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}, n));
  const Vec k4 = sys.stage(
      4, tau + 4.0 * h / 5.0,
      axpy(y, h, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}, n));
  const Vec k5 = sys.stage(5, tau + 8.0 * h / 9.0,
                           axpy(y, h,
                                {{19372.0 / 6561.0, &k1},
                                 {-25360.0 / 2187.0, &k2},
                                 {64448.0 / 6561.0, &k3},
                                 {-212.0 / 729.0, &k4}},
                                n));
  const Vec k6 = sys.stage(6, tau + h,
                           axpy(y, h,
                                {{9017.0 / 3168.0, &k1},
                                 {-355.0 / 33.0, &k2},
                                 {46732.0 / 5247.0, &k3},
                                 {49.0 / 176.0, &k4},
                                 {-5103.0 / 18656.0, &k5}},
                                n));
  const Vec y5 = axpy(y, h,
                      {{35.0 / 384.0, &k1},
                       {500.0 / 1113.0, &k3},
                       {125.0 / 192.0, &k4},
                       {-2187.0 / 6784.0, &k5},
                       {11.0 / 84.0, &k6}},
                      n);
  const Vec k7 = sys.stage(7, tau + h, y5);
  Vec err{};
  const double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
  const double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
  const double e4 = 125.0 / 192.0 - 393.0 / 640.0;
  const double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
  const double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
  const double e7 = -1.0 / 40.0;
  for (std::size_t i = 0; i < n; ++i) {
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  return {y5, err};
}

// Rescales u along itself so the model's normalization holds; returns
// |lambda - 1| and the acceleration at the rescaled velocity (second-order
// models only).
// eta(u,u) with the products and sum carried in extended precision.
double eta_norm2_ext(const FourVector& u) {
  const long double t = u[0], a = u[1], b = u[2], c = u[3];
  return static_cast<double>((a - t) * (a + t) + b * b + c * c);
}

// Puts u back on the model's mass shell by solving for u0 at fixed spatial
// part and returns the relative change in u0. Rescaling u along itself
// would move it nearly tangent to the shell at large gamma and turn an
// off-shell drift into a rapidity error. `a` is refreshed at the final
// velocity for second-order models.
double renormalize(const System& sys, double tau, const FourVector& x, FourVector& u,
                   FourVector& a) {
  const auto& spec = sys.spec;
  if (!(u[0] > 0.0) || !(eta_norm2_ext(u) < 0.0)) {
    throw Error(ErrorCode::not_timelike, "velocity left the forward light cone");
  }
  const double v2 = u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
  const double u0_old = u[0];
  if (!uses_g_normalization(spec.model)) {
    u[0] = std::sqrt(1.0 + v2);
    if (!third_order(spec.model)) a = model_acceleration(spec, sys.field, tau, x, u, sys.seed);
    return std::abs(u[0] / u0_old - 1.0);
  }
  const MaxAccelParams p{spec.a_max};
  for (int it = 0; it < spec.solver.max_iter; ++it) {
    a = model_acceleration(spec, sys.field, tau, x, u, sys.seed);
    const double cf = 1.0 - epsilon(a, p);
    if (!(cf > 0.0)) {
      throw Error(ErrorCode::maximal_accel_breach, "eta(a,a) reached A_max^2");
    }
    const double u0 = std::sqrt(v2 + 1.0 / cf);
    const double change = std::abs(u0 - u[0]);
    u[0] = u0;
    if (change <= 4.0 * std::numeric_limits<double>::epsilon() * u0) break;
  }
  a = model_acceleration(spec, sys.field, tau, x, u, sys.seed);
  return std::abs(u[0] / u0_old - 1.0);
}

TrajectoryRow make_row(const ForceModelSpec& spec, const FieldSpec& field, double tau,
                       const FourVector& x, const FourVector& u, const FourVector& a) {
  TrajectoryRow r;
  r.tau = tau;
  r.x = x;
  r.u = u;
  r.a = a;
  const EMFieldTensor F = faraday_at(field, x, tau);
  const bool has_a = spec.a_max > 0.0;
  const double A2 = spec.a_max * spec.a_max;
  r.a_sq = eta_norm2(a);
  r.epsilon = has_a ? r.a_sq / A2 : std::numeric_limits<double>::quiet_NaN();
  r.fL2 = lorentz_force_square(F, spec.e, u);
  const double cf = has_a ? 1.0 - r.epsilon : 1.0;
  r.larmor_residual = spec.m * cf * eta_dot(a, u) + 2.0 / 3.0 * spec.e * spec.e * r.a_sq;
  r.g_norm_residual =
      (uses_g_normalization(spec.model) ? cf : 1.0) * eta_norm2(u) + 1.0;
  r.epsilon_dot = std::numeric_limits<double>::quiet_NaN();
  r.m_b = std::numeric_limits<double>::quiet_NaN();
  if (has_a && spec.model == ForceModel::ald) {
    WorldlineState s;
    s.x = x;
    s.u = u;
    s.a = a;
    r.epsilon_dot = 2.0 * eta_dot(a, ald_jerk(s, F, spec.e, spec.m)) / A2;
  } else if (spec.model == ForceModel::uniform_covariant) {
    WorldlineState s;
    s.x = x;
    s.u = u;
    const EMFieldTensor dF = faraday_rate(field, x, u, tau, field_fd_step(field));
    r.epsilon_dot = uniform_eps_dot(s, F, dF, spec.e, spec.m, spec.a_max);
  }
  return r;
}

struct Stop {
  RunStatus status;
  EventKind kind;
  std::string detail;
};

std::optional<Stop> check_row(const ForceModelSpec& spec, const FieldSpec& field,
                              const TrajectoryRow& r, double a2_initial) {
  const bool finite = r.x.is_finite() && r.u.is_finite() && r.a.is_finite();
  if (!finite) return Stop{RunStatus::no_convergence, EventKind::no_convergence, "non-finite state"};
  if (uses_g_normalization(spec.model) && !(r.a_sq < spec.a_max * spec.a_max)) {
    return Stop{RunStatus::maxaccel_breach, EventKind::maxaccel_breach,
                "eta(a,a) = " + detail::fmt17(r.a_sq) + " >= A_max^2"};
  }
  if (spec.model == ForceModel::ald && a2_initial > 0.0 &&
      faraday_at(field, r.x, r.tau).is_zero() &&
      r.a_sq > spec.solver.runaway_factor * a2_initial) {
    return Stop{RunStatus::runaway_abort, EventKind::runaway_abort,
                "a^2 grew by more than " + detail::fmt17(spec.solver.runaway_factor) +
                    " under zero field"};
  }
  if (spec.model == ForceModel::uniform_covariant &&
      !(std::abs(r.epsilon_dot) < spec.solver.eps_dot_min)) {
    return Stop{RunStatus::regime_violation, EventKind::uniform_stratum_exit,
                "RegimeViolation: |eps_dot| = " + detail::fmt17(std::abs(r.epsilon_dot)) +
                    " >= " + detail::fmt17(spec.solver.eps_dot_min)};
  }
  return std::nullopt;
}

Stop stop_from_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::maximal_accel_breach:
    case ErrorCode::domain_breach:
      return {RunStatus::maxaccel_breach, EventKind::maxaccel_breach, e.what()};
    case ErrorCode::regime_violation:
      return {RunStatus::regime_violation, EventKind::uniform_stratum_exit,
              std::string("RegimeViolation: ") + e.what()};
    case ErrorCode::no_convergence:
    case ErrorCode::not_timelike:
    case ErrorCode::non_finite:
    case ErrorCode::normalization:
      return {RunStatus::no_convergence, EventKind::no_convergence, e.what()};
    default:
      throw e;
  }
}

void check_initial(const ForceModelSpec& spec, const FieldSpec& field,
                   const WorldlineState& init) {
  require_finite(init.x, "initial position");
  require_finite(init.u, "initial velocity");
  const double uu = eta_norm2(init.u);
  if (!(uu < 0.0)) throw Error(ErrorCode::not_timelike, "initial velocity is not timelike");
  if (!(init.u[0] > 0.0)) {
    throw Error(ErrorCode::normalization, "initial velocity must be future pointing (u0 > 0)");
  }
  if (uses_g_normalization(spec.model)) {
    const FourVector a = model_acceleration(spec, field, init.tau, init.x, init.u);
    const double eps = epsilon(a, MaxAccelParams{spec.a_max});
    if (!(eps < 1.0)) throw Error(ErrorCode::domain_breach, "initial eps >= 1");
    if (std::abs((1.0 - eps) * uu + 1.0) > 1e-8) {
      throw Error(ErrorCode::normalization, "initial velocity violates g(u,u) = -1");
    }
  } else if (std::abs(uu + 1.0) > 1e-8) {
    throw Error(ErrorCode::normalization, "initial velocity violates eta(u,u) = -1");
  }
  if (third_order(spec.model)) {
    require_finite(init.a, "initial acceleration");
    if (std::abs(eta_dot(init.a, init.u)) > 1e-8 * (1.0 + max_abs(init.a))) {
      throw Error(ErrorCode::normalization, "initial acceleration not orthogonal to u");
    }
  }
}

void post_process(TrajectoryRecord& rec, const ForceModelSpec& spec) {
  auto& rows = rec.rows;
  const std::size_t n = rows.size();
  const bool analytic = (spec.model == ForceModel::ald && spec.a_max > 0.0) ||
                        spec.model == ForceModel::uniform_covariant;
  const auto tau = rec.column("tau");
  const auto eps = rec.column("epsilon");
  if (!analytic) {
    std::vector<double> ed(n, std::numeric_limits<double>::quiet_NaN());
    if (n >= 3) {
      ed = differentiate(tau, eps, 1, 3);
    } else if (n == 2) {
      ed[0] = ed[1] = (eps[1] - eps[0]) / (tau[1] - tau[0]);
    }
    for (std::size_t i = 0; i < n; ++i) rows[i].epsilon_dot = ed[i];
  }
  const auto led =
      mass_ledger(tau, eps, rec.column("epsilon_dot"), rec.column("a_sq"), spec.e, spec.m,
                  spec.a_max > 0.0 ? spec.a_max : std::numeric_limits<double>::quiet_NaN(),
                  spec.solver.eps_dot_min);
  for (std::size_t i = 0; i < n; ++i) rows[i].m_b = led[i].m_b;
  rec.events = detect_events(rec, spec.solver);
}

}  // namespace

WorldlineState initial_state(const ForceModelSpec& spec, const FieldSpec& field,
                             const FourVector& x, const Vec3& u_spatial, double tau,
                             std::optional<FourVector> a0) {
  const double v2 = u_spatial[0] * u_spatial[0] + u_spatial[1] * u_spatial[1] +
                    u_spatial[2] * u_spatial[2];
  WorldlineState s;
  s.tau = tau;
  s.x = x;
  s.u = {std::sqrt(1.0 + v2), u_spatial[0], u_spatial[1], u_spatial[2]};
  if (uses_g_normalization(spec.model)) {
    const MaxAccelParams p{spec.a_max};
    for (int it = 0; it < 200; ++it) {
      s.a = model_acceleration(spec, field, tau, x, s.u, it ? std::optional(s.a) : std::nullopt);
      const double eps = epsilon(s.a, p);
      if (!(eps < 1.0)) throw Error(ErrorCode::domain_breach, "initial eps >= 1");
      const double u0 = std::sqrt(v2 + 1.0 / (1.0 - eps));
      const bool done = std::abs(u0 - s.u[0]) <= 1e-16 * u0;
      s.u[0] = u0;
      if (done) break;
    }
    s.a = model_acceleration(spec, field, tau, x, s.u, s.a);
  } else if (third_order(spec.model)) {
    s.a = a0 ? *a0 : (spec.e / spec.m) * field_apply(faraday_at(field, x, tau), s.u);
  } else {
    s.a = model_acceleration(spec, field, tau, x, s.u);
  }
  return s;
}

WorldlineState rk4_step(const ForceModelSpec& spec, const FieldSpec& field,
                        const WorldlineState& state, double h) {
  System sys{spec, field, std::nullopt};
  if (spec.model == ForceModel::implicit_maxaccel) sys.seed = state.a;
  Vec y{};
  put(y, 0, state.x);
  put(y, 4, state.u);
  if (third_order(spec.model)) put(y, 8, state.a);
  const Vec yn = rk4(sys, state.tau, y, h);
  WorldlineState out;
  out.tau = state.tau + h;
  out.x = part(yn, 0);
  out.u = part(yn, 4);
  out.a = third_order(spec.model)
              ? part(yn, 8)
              : model_acceleration(spec, field, out.tau, out.x, out.u, sys.seed);
  return out;
}

WorldlineState step_implicit(const WorldlineState& state, const ForceModelSpec& spec,
                             const FieldSpec& field, double dt) {
  if (spec.model != ForceModel::implicit_maxaccel) {
    throw Error(ErrorCode::invalid_argument, "step_implicit needs the implicit_maxaccel model");
  }
  return rk4_step(spec, field, state, dt);
}

TrajectoryRecord integrate(const ForceModelSpec& spec, const FieldSpec& field,
                           const WorldlineState& init, double tau_start, double tau_end) {
  spec.validate();
  field.validate();
  if (!(tau_end > tau_start) || !std::isfinite(tau_start) || !std::isfinite(tau_end)) {
    throw Error(ErrorCode::config, "tau_span must be finite with start < end");
  }
  WorldlineState s0 = init;
  s0.tau = tau_start;
  check_initial(spec, field, s0);

  const auto& opts = spec.solver;
  TrajectoryRecord rec;
  rec.metadata = {{"model", to_string(spec.model)},
                  {"e", detail::fmt17(spec.e)},
                  {"m", detail::fmt17(spec.m)},
                  {"a_max", detail::fmt17(spec.a_max)},
                  {"field_raising", to_string(spec.raising)},
                  {"method", to_string(opts.method)},
                  {"dt", detail::fmt17(opts.dt)},
                  {"tol", detail::fmt17(opts.tol)},
                  {"tau_start", detail::fmt17(tau_start)},
                  {"tau_end", detail::fmt17(tau_end)}};

  System sys{spec, field, std::nullopt};
  FourVector a = third_order(spec.model)
                     ? s0.a
                     : model_acceleration(spec, field, tau_start, s0.x, s0.u);
  sys.seed = a;
  rec.rows.push_back(make_row(spec, field, tau_start, s0.x, s0.u, a));
  rec.renorm_scale.push_back(0.0);
  const double a2_initial = rec.rows.front().a_sq;

  std::vector<Event> run_events;
  auto halt = [&](const Stop& st, double tau) {
    rec.status = st.status;
    rec.status_detail = st.detail;
    run_events.push_back({st.kind, tau, st.detail});
  };

  Vec y{};
  put(y, 0, s0.x);
  put(y, 4, s0.u);
  if (third_order(spec.model)) put(y, 8, s0.a);
  const std::size_t dim = sys.dim();
  double tau = tau_start;

  // Accepts a proposed state: renormalize, record, check.
  auto accept = [&](double tau_new, Vec& yn) -> bool {
    FourVector x = part(yn, 0), u = part(yn, 4);
    FourVector an = third_order(spec.model) ? part(yn, 8) : FourVector{};
    const double scale = renormalize(sys, tau_new, x, u, an);
    put(yn, 4, u);
    sys.seed = an;
    rec.rows.push_back(make_row(spec, field, tau_new, x, u, an));
    rec.renorm_scale.push_back(scale);
    if (const auto st = check_row(spec, field, rec.rows.back(), a2_initial)) {
      halt(*st, tau_new);
      return false;
    }
    return true;
  };

  if (const auto st = check_row(spec, field, rec.rows.front(), a2_initial)) {
    halt(*st, tau_start);
  } else {
    try {
      if (opts.method == StepMethod::rk4_fixed) {
        const double span = tau_end - tau_start;
        auto steps = static_cast<long>(std::llround(span / opts.dt));
        if (steps < 1 || std::abs(steps * opts.dt - span) > 1e-9 * span) {
          steps = static_cast<long>(std::ceil(span / opts.dt));
        }
        if (steps > opts.max_steps) {
          throw Error(ErrorCode::config, "rk4_fixed would need " + std::to_string(steps) +
                                             " steps, above solver.max_steps");
        }
        for (long k = 0; k < steps; ++k) {
          const double t0 = tau_start + span * static_cast<double>(k) / steps;
          const double t1 = k + 1 == steps ? tau_end
                                           : tau_start + span * static_cast<double>(k + 1) / steps;
          Vec yn = rk4(sys, t0, y, t1 - t0);
          tau = t1;
          if (!accept(t1, yn)) break;
          y = yn;
        }
      } else {
        // Steps never exceed half the field's shortest scale, so a narrow
        // pulse cannot be stepped over from a quiet stretch.
        const double h_max = 0.5 * field.time_scale();
        double h = std::min({opts.dt, h_max, tau_end - tau_start});
        long accepted = 0;
        while (tau < tau_end) {
          if (accepted >= opts.max_steps) {
            halt({RunStatus::no_convergence, EventKind::no_convergence, "step limit reached"},
                 tau);
            break;
          }
          const bool last = tau + h >= tau_end;
          const double hh = last ? tau_end - tau : h;
          const auto [yn0, err] = dopri(sys, tau, y, hh);
          double en = 0.0;
          for (std::size_t i = 0; i < dim; ++i) {
            const double sc = opts.tol * (1.0 + std::max(std::abs(y[i]), std::abs(yn0[i])));
            en = std::max(en, std::abs(err[i]) / sc);
          }
          if (!std::isfinite(en)) en = 1e10;
          const double grow = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
          if (en <= 1.0) {
            const double tn = last ? tau_end : tau + hh;
            Vec yn = yn0;
            tau = tn;
            ++accepted;
            if (!accept(tn, yn)) break;
            y = yn;
            h = std::min(hh * grow, h_max);
          } else {
            h = hh * grow;
            if (h < 1e-14 * std::max(1.0, std::abs(tau))) {
              halt({RunStatus::no_convergence, EventKind::no_convergence,
                    "step size underflow"},
                   tau);
              break;
            }
          }
        }
      }
    } catch (const Error& e) {
      halt(stop_from_error(e), tau);
    }
  }

  rec.events = run_events;
  post_process(rec, spec);
  return rec;
}

std::vector<Event> detect_events(const TrajectoryRecord& traj, const SolverOptions& opts) {
  // Run events go last so that at equal tau they follow the stratum bookkeeping.
  std::vector<Event> out, run;
  for (const auto& e : traj.events) {
    const bool run_event = e.kind == EventKind::maxaccel_breach ||
                           e.kind == EventKind::runaway_abort ||
                           e.kind == EventKind::no_convergence ||
                           e.detail.rfind("RegimeViolation", 0) == 0;
    if (run_event) run.push_back(e);
  }
  const auto& rows = traj.rows;
  const std::size_t n = rows.size();
  std::vector<bool> small(n, false), in_stratum(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double ed = rows[i].epsilon_dot;
    small[i] = std::isfinite(ed) && std::abs(ed) < opts.eps_dot_min;
  }
  for (std::size_t i = 0; i < n;) {
    if (!small[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && small[j]) ++j;
    if (j - i >= 3) {
      for (std::size_t k = i; k < j; ++k) in_stratum[k] = true;
      out.push_back({EventKind::uniform_stratum_entry, rows[i].tau,
                     "|eps_dot| < " + detail::fmt17(opts.eps_dot_min) + " over " +
                         std::to_string(j - i) + " rows"});
      const double t_exit = j < n ? rows[j].tau : rows[n - 1].tau;
      const bool reported = std::any_of(run.begin(), run.end(), [&](const Event& e) {
        return e.kind == EventKind::uniform_stratum_exit && e.tau == t_exit;
      });
      if (!reported) {
        out.push_back({EventKind::uniform_stratum_exit, t_exit,
                       j < n ? "eps_dot left the stratum" : "end of run"});
      }
    }
    i = j;
  }
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < n; ++i) {
    const double ed = rows[i].epsilon_dot;
    if (!std::isfinite(ed) || ed == 0.0) continue;
    if (prev) {
      const double ep = rows[*prev].epsilon_dot;
      if ((ep > 0.0) != (ed > 0.0) && !in_stratum[*prev] && !in_stratum[i]) {
        const double t0 = rows[*prev].tau, t1 = rows[i].tau;
        const double tz = t0 - ep * (t1 - t0) / (ed - ep);
        out.push_back({EventKind::continuation_point, tz, "eps_dot changes sign"});
      }
    }
    prev = i;
  }
  out.insert(out.end(), run.begin(), run.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const Event& a, const Event& b) { return a.tau < b.tau; });
  return out;
}

}  // namespace radreact
