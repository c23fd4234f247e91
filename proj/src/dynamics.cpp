#include "radreact/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radreact/errors.hpp"
#include "radreact/maxaccel.hpp"
#include "text_util.hpp"

namespace radreact {

const char* to_string(ForceModel model) noexcept {
  switch (model) {
    case ForceModel::lorentz: return "lorentz";
    case ForceModel::ald: return "ald";
    case ForceModel::landau_lifshitz: return "landau_lifshitz";
    case ForceModel::implicit_maxaccel: return "implicit_maxaccel";
    case ForceModel::explicit_approx: return "explicit_approx";
    case ForceModel::uniform_covariant: return "uniform_covariant";
  }
  return "unknown";
}

ForceModel parse_force_model(std::string_view name) {
  for (ForceModel m : {ForceModel::lorentz, ForceModel::ald, ForceModel::landau_lifshitz,
                       ForceModel::implicit_maxaccel, ForceModel::explicit_approx,
                       ForceModel::uniform_covariant}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::config, "unknown force model '" + std::string(name) + "'");
}

bool uses_g_normalization(ForceModel model) noexcept {
  return model == ForceModel::implicit_maxaccel || model == ForceModel::explicit_approx ||
         model == ForceModel::uniform_covariant;
}

bool requires_a_max(ForceModel model) noexcept { return uses_g_normalization(model); }

const char* to_string(FieldRaising r) noexcept { return r == FieldRaising::eta ? "eta" : "g"; }

FieldRaising parse_field_raising(std::string_view name) {
  if (name == "eta") return FieldRaising::eta;
  if (name == "g") return FieldRaising::g;
  throw Error(ErrorCode::config, "field_raising must be 'eta' or 'g', got '" +
                                     std::string(name) + "'");
}

const char* to_string(StepMethod m) noexcept {
  return m == StepMethod::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
}

StepMethod parse_step_method(std::string_view name) {
  if (name == "rk4_fixed") return StepMethod::rk4_fixed;
  if (name == "rk45_adaptive") return StepMethod::rk45_adaptive;
  throw Error(ErrorCode::config, "solver method must be 'rk4_fixed' or 'rk45_adaptive', got '" +
                                     std::string(name) + "'");
}

void SolverOptions::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::config, msg); };
  if (!(dt > 0.0) || !std::isfinite(dt)) bad("solver.dt must be finite and positive");
  if (!(tol > 0.0) || !std::isfinite(tol)) bad("solver.tol must be finite and positive");
  if (max_iter < 1) bad("solver.max_iter must be at least 1");
  if (!(eps_dot_min > 0.0) || !std::isfinite(eps_dot_min)) {
    bad("solver.eps_dot_min must be finite and positive");
  }
  if (!(runaway_factor > 1.0)) bad("solver.runaway_factor must exceed 1");
  if (max_steps < 1) bad("solver.max_steps must be at least 1");
}

void ForceModelSpec::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::config, msg); };
  if (!(m > 0.0) || !std::isfinite(m)) bad("model.m must be finite and positive");
  if (!std::isfinite(e)) bad("model.e must be finite");
  if (model == ForceModel::ald && e == 0.0) bad("the ald model needs a nonzero charge");
  if (requires_a_max(model)) {
    if (!(a_max > 0.0) || !std::isfinite(a_max)) {
      bad(std::string("model.a_max must be finite and positive for ") + to_string(model));
    }
  } else if (a_max < 0.0 || !std::isfinite(a_max)) {
    bad("model.a_max must be positive when given");
  }
  solver.validate();
}

double ForceModelSpec::tau0() const { return characteristic_time(e, m); }

double characteristic_time(double e, double m) { return 2.0 * e * e / (3.0 * m); }

FourVector ald_jerk(const WorldlineState& state, const EMFieldTensor& F, double e, double m) {
  if (e == 0.0) throw Error(ErrorCode::invalid_argument, "ald_jerk: charge must be nonzero");
  const double t0 = characteristic_time(e, m);
  const FourVector f = lorentz_force(F, e, state.u);
  return (m * state.a - f) / (m * t0) + eta_norm2(state.a) * state.u;
}

FourVector ald_residual(const WorldlineState& state, const EMFieldTensor& F, double e,
                        double m) {
  if (!state.jerk) throw Error(ErrorCode::invalid_argument, "ald_residual: state has no jerk");
  return m * state.a - lorentz_force(F, e, state.u) -
         (2.0 / 3.0 * e * e) * (*state.jerk - eta_norm2(state.a) * state.u);
}

FourVector landau_lifshitz_accel(const WorldlineState& state, const EMFieldTensor& F,
                                 const EMFieldTensor& dF, double e, double m) {
  const double q = e / m;
  const FourVector Fu = field_apply(F, state.u);
  const FourVector correction = q * field_apply(dF, state.u) + q * q * field_apply(F, Fu) -
                                (q * q * eta_norm2(Fu)) * state.u;
  return q * Fu + characteristic_time(e, m) * correction;
}

FourVector landau_lifshitz_accel(const WorldlineState& state, const FieldSpec& field, double e,
                                 double m, double tau) {
  const EMFieldTensor F = faraday_at(field, state.x, tau);
  const EMFieldTensor dF = faraday_rate(field, state.x, state.u, tau, field_fd_step(field));
  return landau_lifshitz_accel(state, F, dF, e, m);
}

FourVector implicit_residual(const FourVector& a_trial, const WorldlineState& state,
                             const EMFieldTensor& F, double e, double m) {
  return m * a_trial - lorentz_force(F, e, state.u) +
         (2.0 / 3.0 * e * e * eta_norm2(a_trial)) * state.u;
}

FourVector implicit_residual(const FourVector& a_trial, const WorldlineState& state,
                             const EMFieldTensor& F, const ForceModelSpec& spec) {
  double k = 1.0;
  if (spec.raising == FieldRaising::g) {
    k = 1.0 / (1.0 - epsilon(a_trial, MaxAccelParams{spec.a_max}));
  }
  return spec.m * a_trial - k * lorentz_force(F, spec.e, state.u) +
         (2.0 / 3.0 * spec.e * spec.e * eta_norm2(a_trial)) * state.u;
}

namespace {

// Roots of m a + c eta(a, a) u = f.
struct QuadraticSystem {
  FourVector f;
  FourVector u;
  double m;
  double c;

  FourVector residual(const FourVector& a) const {
    return m * a + (c * eta_norm2(a)) * u - f;
  }

  double relative(const FourVector& a) const {
    const double s = eta_norm2(a);
    const double scale =
        std::max({max_abs(f), m * max_abs(a), std::abs(c * s) * max_abs(u), 1e-300});
    return max_abs(residual(a)) / scale;
  }
};

struct InnerResult {
  FourVector a;
  int iterations = 0;
  bool converged = false;
  bool newton = false;
};

InnerResult newton(const QuadraticSystem& q, FourVector a, double tol, int max_iter) {
  InnerResult r{a, 0, false, true};
  for (int it = 0; it <= max_iter; ++it) {
    if (!a.is_finite()) break;
    if (q.relative(a) <= tol) {
      r.a = a;
      r.iterations = it;
      r.converged = true;
      return r;
    }
    if (it == max_iter) break;
    const FourVector res = q.residual(a);
    const double denom = q.m + 2.0 * q.c * eta_dot(a, q.u);
    if (!(denom > 0.0)) break;  // left the physical branch
    const FourVector step = (res - (2.0 * q.c * eta_dot(a, res) / denom) * q.u) / q.m;
    a -= step;
  }
  r.a = a;
  r.iterations = max_iter;
  return r;
}

InnerResult fixed_point_then_newton(const QuadraticSystem& q, FourVector a, double tol,
                                    int max_iter) {
  double prev_step = -1.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (q.relative(a) <= tol) return {a, it, true, false};
    const double denom = q.m + q.c * eta_dot(a, q.u);
    if (!(denom > 0.0)) break;
    const FourVector next = (q.f - (q.c * eta_dot(a, q.f) / denom) * q.u) / q.m;
    const double step = max_abs(next - a);
    a = next;
    if (!a.is_finite()) break;
    // Slow contraction: hand over to Newton.
    if (prev_step > 0.0 && step > 0.5 * prev_step) {
      ++it;
      break;
    }
    prev_step = step;
  }
  if (a.is_finite() && q.relative(a) <= tol) return {a, it, true, false};
  InnerResult r = newton(q, a.is_finite() ? a : q.f / q.m, tol, max_iter);
  r.iterations += it;
  return r;
}

InnerResult continuation(const QuadraticSystem& q, double tol, int max_iter) {
  for (int pieces : {4, 16, 64, 256}) {
    FourVector a = q.f / q.m;
    int total = 0;
    bool ok = true;
    for (int k = 1; k <= pieces; ++k) {
      QuadraticSystem qk = q;
      qk.c = q.c * static_cast<double>(k) / pieces;
      const InnerResult r = newton(qk, a, tol, max_iter);
      total += r.iterations;
      if (!r.converged) {
        ok = false;
        break;
      }
      a = r.a;
    }
    if (ok) return {a, total, true, true};
  }
  return {q.f / q.m, max_iter, false, true};
}

double root_tolerance(const SolverOptions& opts) {
  return std::clamp(opts.tol, 1e-15, 1e-12);
}

}  // namespace

ImplicitSolution solve_implicit_accel(const WorldlineState& state, const EMFieldTensor& F,
                                      const ForceModelSpec& spec,
                                      std::optional<FourVector> seed) {
  require_finite(state.u, "velocity");
  const double tol = root_tolerance(spec.solver);
  const int max_iter = spec.solver.max_iter;
  const FourVector fL = lorentz_force(F, spec.e, state.u);
  require_finite(fL, "Lorentz force");

  ImplicitSolution out;
  double k = 1.0;
  FourVector a = seed.value_or(fL / spec.m);
  const int outer_max = spec.raising == FieldRaising::g ? max_iter : 1;
  bool raised_converged = spec.raising == FieldRaising::eta;

  for (int outer = 0; outer < outer_max; ++outer) {
    const QuadraticSystem q{k * fL, state.u, spec.m, 2.0 / 3.0 * spec.e * spec.e};
    InnerResult r = fixed_point_then_newton(q, a, tol, max_iter);
    if (!r.converged) {
      r = continuation(q, tol, max_iter);
      out.used_continuation = true;
    }
    out.iterations += r.iterations;
    out.used_newton = out.used_newton || r.newton;
    if (!r.converged) {
      throw Error(ErrorCode::no_convergence,
                  "implicit acceleration did not converge; relative residual " +
                      detail::fmt17(q.relative(r.a)));
    }
    a = r.a;
    out.relative_residual = q.relative(a);
    if (spec.raising == FieldRaising::g) {
      const double eps = epsilon(a, MaxAccelParams{spec.a_max});
      if (!(eps < 1.0)) {
        throw Error(ErrorCode::maximal_accel_breach,
                    "eta(a,a) reached A_max^2 while raising F with g");
      }
      const double k_new = 1.0 / (1.0 - eps);
      const bool done = std::abs(k_new - k) <= tol * k_new;
      k = k_new;
      if (done) {
        raised_converged = true;
        break;
      }
    }
  }
  if (!raised_converged) {
    throw Error(ErrorCode::no_convergence, "conformal factor iteration did not converge");
  }
  if (spec.a_max > 0.0 && !(eta_norm2(a) < spec.a_max * spec.a_max)) {
    throw Error(ErrorCode::maximal_accel_breach,
                "eta(a,a) = " + detail::fmt17(eta_norm2(a)) + " >= A_max^2 = " +
                    detail::fmt17(spec.a_max * spec.a_max));
  }
  out.a = a;
  return out;
}

Matrix4 operator_M(const WorldlineState& state, const EMFieldTensor& F, double e, double m) {
  const FourCovector w = field_apply_lower(F, state.u);
  const double k = 2.0 * e * e * e / (3.0 * m);
  Matrix4 M = Matrix4::identity(m);
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t rho = 0; rho < 4; ++rho) M(mu, rho) += k * state.u[mu] * w[rho];
  return M;
}

Matrix4 operator_O(const WorldlineState& state, const EMFieldTensor& F, double e, double m) {
  const FourCovector w = field_apply_lower(F, state.u);
  const double k = 2.0 * e * e * e / (3.0 * m * m * m);
  Matrix4 O = Matrix4::identity(1.0 / m);
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t kap = 0; kap < 4; ++kap) O(mu, kap) -= k * state.u[mu] * w[kap];
  return O;
}

FourVector explicit_approx_accel(const WorldlineState& state, const EMFieldTensor& F, double e,
                                 double m) {
  const FourVector f = lorentz_force(F, e, state.u);
  return f / m - (characteristic_time(e, m) / (m * m) * eta_norm2(f)) * state.u;
}

ConnectionCoefficients connection_coeffs(const WorldlineState& state, const EMFieldTensor& F,
                                         double e, double m, double a_max) {
  if (a_max > 0.0) conformal_factor(state, MaxAccelParams{a_max});
  const double uu = eta_norm2(state.u);
  if (uu == 0.0) throw Error(ErrorCode::not_timelike, "connection_coeffs: null velocity");
  const Matrix4 Fm = F.mixed();
  const FourCovector ul = lower(state.u);
  ConnectionCoefficients cc;
  const double kK = -e / (2.0 * m * uu);
  const double kL = 2.0 * e * e * e * e / (3.0 * m * m * m);
  for (std::size_t nu = 0; nu < 4; ++nu) {
    for (std::size_t sig = 0; sig < 4; ++sig) {
      // F_{rho sigma} F^rho_nu
      double ff = 0.0;
      for (std::size_t rho = 0; rho < 4; ++rho) ff += F.lower(rho, sig) * Fm(rho, nu);
      for (std::size_t mu = 0; mu < 4; ++mu) {
        cc.K(mu, nu, sig) = kK * (Fm(mu, nu) * ul[sig] + Fm(mu, sig) * ul[nu]);
        cc.L(mu, nu, sig) = kL * ff * state.u[mu];
      }
    }
  }
  return cc;
}

FourVector larmor_power(const WorldlineState& state, double e) {
  return (-2.0 / 3.0 * e * e * eta_norm2(state.a)) * state.u;
}

double larmor_contraction_residual(const WorldlineState& state, double e, double m,
                                   double a_max) {
  return m * g_dot(state, MaxAccelParams{a_max}, state.a, state.u) +
         2.0 / 3.0 * e * e * eta_norm2(state.a);
}

double lorentz_force_square(const EMFieldTensor& F, double e, const FourVector& u) {
  return eta_norm2(lorentz_force(F, e, u));
}

double fl2_identity_residual(double fl2, double a2, double e, double m, double a_max) {
  const double c = 2.0 / 3.0 * e * e;
  const double eps = a2 / (a_max * a_max);
  const double rhs = c * c * a2 * a2 / (1.0 - eps) + m * m * a2;
  const double scale = std::max({std::abs(fl2), std::abs(m * m * a2), 1e-300});
  return (fl2 - rhs) / scale;
}

FourVector uniform_covariant_rhs(const WorldlineState& state, const EMFieldTensor& F, double e,
                                 double m, double eps_dot, double eps_dot_min) {
  if (!(std::abs(eps_dot) < eps_dot_min)) {
    throw Error(ErrorCode::regime_violation,
                "|eps_dot| = " + detail::fmt17(std::abs(eps_dot)) +
                    " left the uniform-acceleration stratum (threshold " +
                    detail::fmt17(eps_dot_min) + ")");
  }
  return (e / m) * field_apply(F, state.u);
}

double uniform_eps_dot(const WorldlineState& state, const EMFieldTensor& F,
                       const EMFieldTensor& dF, double e, double m, double a_max) {
  const double q = e / m;
  const FourVector a = q * field_apply(F, state.u);
  const FourVector j = q * (field_apply(dF, state.u) + field_apply(F, a));
  return 2.0 * eta_dot(a, j) / (a_max * a_max);
}

}  // namespace radreact
