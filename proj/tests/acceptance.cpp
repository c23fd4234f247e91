// Acceptance run: one line per criterion, nonzero exit if any fails.
// Tolerances are fixed here; oracles are closed forms or computed locally.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "radreact/diagnostics.hpp"
#include "radreact/dynamics.hpp"
#include "radreact/integrator.hpp"
#include "radreact/worldline.hpp"

using namespace radreact;

namespace {

// Tolerances.
constexpr double kPulseError = 1e-3;
constexpr double kPrePulse = 1e-9;
constexpr double kSlopeLo = 0.8, kSlopeHi = 1.2;
constexpr double kQuietA2 = 1e-12;
constexpr double kRateRel = 0.02;
constexpr double kFl2Rel = 1e-6;
constexpr double kLarmorFactor = 10.0;
constexpr double kInverse = 1e-13;
constexpr double kGapSlope = 1.0, kGapR2 = 0.99;
constexpr double kReparamSpread = 1e-6;
constexpr double kHyperbolic = 1e-8, kOrder = 4.0, kOrderTol = 0.2;
constexpr double kKinematic = 1e-7;
constexpr double kMassRel = 1e-10;
constexpr double kPerturbation = 1e-6;

struct Fit {
  double slope = NAN, intercept = NAN, r2 = NAN;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

Fit loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(lx, ly);
}

double mdot(const FourVector& a, const FourVector& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

ForceModelSpec spec(ForceModel model, double a_max, double dt) {
  ForceModelSpec s;
  s.model = model;
  s.e = 1.0;
  s.m = 1.0;
  s.a_max = a_max;
  s.solver.dt = dt;
  return s;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Weak constant-E implicit run shared by 4, 5 and 10: E = 1e-4, A = 1e-2, eps0 = 1e-4.
constexpr double kWeakE = 1e-4, kWeakA = 1e-2;

const TrajectoryRecord& weak_run() {
  static const TrajectoryRecord t = [] {
    const auto s = spec(ForceModel::implicit_maxaccel, kWeakA, 1e-2);
    const auto f = FieldSpec::constant({kWeakE, 0, 0});
    return integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, 0), 0, 50);
  }();
  return t;
}

Outcome c1_pulse() {
  const double kappa = 0.5;
  const double target = kappa / 1.5;  // kappa / a with a = 3m / (2 e^2)
  std::vector<double> ws{0.1, 0.01, 0.001}, errs;
  double pre = 0.0, post = NAN;
  for (double w : ws) {
    auto s = spec(ForceModel::implicit_maxaccel, 1e6, w / 20);
    s.solver.method = StepMethod::rk45_adaptive;
    s.solver.tol = 1e-12;
    const auto f = FieldSpec::pulse(kappa, w, 0.0);
    const double span = std::max(1.0, 10 * w);
    const auto t = integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, -span), -span, span);
    if (t.status != RunStatus::ok) return {false, std::string("run ended ") + to_string(t.status)};
    for (const auto& r : t.rows) {
      if (r.tau < -5 * w) pre = std::max(pre, std::abs(r.u[1]));
    }
    post = t.rows.back().u[1];
    errs.push_back(std::abs(post - target));
  }
  const Fit fit = loglog(ws, errs);
  const bool ok = errs.back() <= kPulseError && pre <= kPrePulse && fit.slope >= kSlopeLo &&
                  fit.slope <= kSlopeHi;
  return {ok, fmt("u1 %.6f vs 1/3 (err %.2e), pre-pulse %.2e, width slope %.3f", post,
                  errs.back(), pre, fit.slope)};
}

Outcome c2_no_runaway() {
  const double dt = 1e-3;
  const auto s = spec(ForceModel::implicit_maxaccel, 10.0, dt);
  FieldSpec f;
  f.add(ConstantField{{1, 0, 0}, {0, 0, 0}}, ParamWindow{-INFINITY, 1.0});
  const auto t = integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, 0), 0, 5);
  double before = 0.0, after = 0.0;
  for (const auto& r : t.rows) {
    const double a2 = std::abs(mdot(r.a, r.a));
    if (r.tau < 1.0) before = std::max(before, a2);
    if (r.tau > 1.0 + dt + 1e-12) after = std::max(after, a2);
  }
  const bool ok = t.status == RunStatus::ok && before > 0.1 && after <= kQuietA2;
  return {ok, fmt("max a^2 after switch-off %.2e (driven phase %.3f)", after, before)};
}

Outcome c3_ald_rate() {
  const auto s = spec(ForceModel::ald, 0.0, 1e-3);
  const auto f = FieldSpec::vacuum();
  const auto t = integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, 0, FourVector{0, 1e-6, 0, 0}),
                           0, 30);
  const std::size_t n = t.rows.size();
  std::vector<double> x, y;
  for (std::size_t i = n / 3; i < 2 * n / 3; ++i) {
    x.push_back(t.rows[i].tau);
    y.push_back(std::log(std::abs(t.rows[i].a[1])));
  }
  const double rate = least_squares(x, y).slope;
  const double expected = 1.0 / (2.0 / 3.0);
  return {std::abs(rate - expected) <= kRateRel * expected,
          fmt("rate %.6f vs %.6f over %.0f rows", rate, expected, double(x.size()))};
}

Outcome c4_fl2() {
  const auto& t = weak_run();
  double worst = 0.0, eps0 = 0.0;
  for (const auto& r : t.rows) {
    // F_L = e F u for a pure E field along x.
    const double f0 = kWeakE * r.u[1];
    const double f1 = kWeakE * r.u[0];
    const double fl2 = -f0 * f0 + f1 * f1;
    const double a2 = mdot(r.a, r.a);
    const double eps = a2 / (kWeakA * kWeakA);
    const double k = 2.0 / 3.0;
    const double rhs = k * k * a2 * a2 / (1.0 - eps) + a2;
    worst = std::max(worst, std::abs(fl2 - rhs) / std::abs(fl2));
    eps0 = std::max(eps0, eps);
  }
  return {t.status == RunStatus::ok && worst <= kFl2Rel,
          fmt("max relative residual %.2e at eps0 %.3e", worst, eps0)};
}

Outcome c5_larmor() {
  const auto& t = weak_run();
  const double tau0 = 2.0 / 3.0;
  double worst = 0.0, eps0 = 0.0, a2max = 0.0;
  for (const auto& r : t.rows) {
    const double a2 = mdot(r.a, r.a);
    const double eps = a2 / (kWeakA * kWeakA);
    const double g_au = (1.0 - eps) * mdot(r.a, r.u);
    worst = std::max(worst, std::abs(g_au + tau0 * a2));
    eps0 = std::max(eps0, eps);
    a2max = std::max(a2max, a2);
  }
  const double bound = kLarmorFactor * eps0 * eps0 * a2max * tau0;
  return {worst <= bound, fmt("max |m g(a,u) + 2/3 e^2 a^2| %.3e, bound %.3e", worst, bound)};
}

Outcome c6_inverse() {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    WorldlineState st;
    const double v1 = 2 * uni(rng), v2 = 2 * uni(rng), v3 = 2 * uni(rng);
    st.u = {std::sqrt(1 + v1 * v1 + v2 * v2 + v3 * v3), v1, v2, v3};
    st.a = {0, uni(rng), uni(rng), uni(rng)};
    const EMFieldTensor F{{uni(rng), uni(rng), uni(rng)}, {uni(rng), uni(rng), uni(rng)}};
    const double e = uni(rng), m = 1.5 + uni(rng);
    const Matrix4 p = operator_M(st, F, e, m) * operator_O(st, F, e, m);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        worst = std::max(worst, std::abs(p(i, j) - (i == j ? 1.0 : 0.0)));
      }
    }
  }
  return {worst <= kInverse, fmt("max |M O - I| %.2e over 1000 pairs", worst)};
}

Outcome c7_gap_scaling() {
  const double A = 10.0;
  std::vector<double> eps0s, gaps;
  for (double target : {1e-5, 1e-4, 1e-3, 1e-2}) {
    const auto f = FieldSpec::constant({std::sqrt(target) * A, 0, 0});
    const auto si = spec(ForceModel::implicit_maxaccel, A, 1e-2);
    const auto se = spec(ForceModel::explicit_approx, A, 1e-2);
    const auto ti = integrate(si, f, initial_state(si, f, {}, {0, 0, 0}, 0), 0, 10);
    const auto te = integrate(se, f, initial_state(se, f, {}, {0, 0, 0}, 0), 0, 10);
    if (ti.status != RunStatus::ok || te.status != RunStatus::ok ||
        ti.rows.size() != te.rows.size()) {
      return {false, fmt("run failed at target eps0 %.0e", target)};
    }
    double gap = 0.0, eps0 = 0.0;
    for (std::size_t i = 0; i < ti.rows.size(); ++i) {
      for (int k = 0; k < 4; ++k) {
        gap = std::max({gap, std::abs(ti.rows[i].x[k] - te.rows[i].x[k]),
                        std::abs(ti.rows[i].u[k] - te.rows[i].u[k])});
      }
      eps0 = std::max(eps0, mdot(ti.rows[i].a, ti.rows[i].a) / (A * A));
    }
    eps0s.push_back(eps0);
    gaps.push_back(gap);
  }
  const Fit fit = loglog(eps0s, gaps);
  return {fit.slope >= kGapSlope && fit.r2 >= kGapR2,
          fmt("slope %.3f, r^2 %.5f (gap %.2e .. %.2e)", fit.slope, fit.r2, gaps.front(),
              gaps.back())};
}

Outcome c8_reparam() {
  const double a_max = 10.0;
  const auto curve = sample_curve(
      [](double t) { return FourVector{std::sinh(t), std::cosh(t) - 1.0, 0.0, 0.0}; }, 0.0, 2.0,
      4001);
  const double ref = proper_time_maxaccel(curve, a_max).value;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> alpha(-0.9, 0.9), beta(0.5, 3.0);
  double lo = ref, hi = ref;
  for (int k = 0; k < 20; ++k) {
    const double al = alpha(rng), be = beta(rng);  // t + al sin(be t)/be is monotone for |al| < 1
    const double v =
        proper_time_maxaccel(reparameterize(curve, [=](double t) { return t + al * std::sin(be * t) / be; }),
                             a_max)
            .value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double spread = (hi - lo) / ref;
  return {spread <= kReparamSpread, fmt("relative spread %.2e over 20 maps", spread)};
}

Outcome c9_hyperbolic() {
  const auto f = FieldSpec::constant({1, 0, 0});
  auto run = [&](double dt) {
    const auto s = spec(ForceModel::lorentz, 0.0, dt);
    return integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, 0), 0, 5);
  };
  const auto t = run(1e-3);
  double worst = 0.0;
  for (const auto& r : t.rows) {
    const double c = std::cosh(r.tau);
    worst = std::max({worst, std::abs(r.x[0] - std::sinh(r.tau)) / c,
                      std::abs(r.x[1] - (c - 1.0)) / c});
  }
  std::vector<double> dts{1e-2, 5e-3, 2.5e-3, 1.25e-3}, errs;
  for (double dt : dts) {
    const auto tr = run(dt);
    const auto& last = tr.rows.back();
    errs.push_back(std::max(std::abs(last.x[0] - std::sinh(5.0)),
                            std::abs(last.x[1] - (std::cosh(5.0) - 1.0))));
  }
  const double slope = loglog(dts, errs).slope;
  return {worst <= kHyperbolic && std::abs(slope - kOrder) <= kOrderTol,
          fmt("max relative error %.2e, order %.3f", worst, slope)};
}

Outcome c10_kinematic() {
  const auto& t = weak_run();
  const auto& R = t.rows;
  const double A2 = kWeakA * kWeakA;
  double r1 = 0, r2 = 0, r3 = 0;
  for (std::size_t i = 1; i + 1 < R.size(); ++i) {
    const double h = R[i + 1].tau - R[i - 1].tau;
    auto eps = [&](std::size_t k) { return mdot(R[k].a, R[k].a) / A2; };
    const double e = eps(i);
    const double ed = (eps(i + 1) - eps(i - 1)) / h;
    const double edd = (eps(i + 1) - 2 * e + eps(i - 1)) / (0.25 * h * h);
    FourVector jerk;
    for (int k = 0; k < 4; ++k) jerk[k] = (R[i + 1].a[k] - R[i - 1].a[k]) / h;
    const double cf = 1.0 - e;
    const double uu = mdot(R[i].u, R[i].u);
    const double au = mdot(R[i].a, R[i].u);
    r1 = std::max(r1, std::abs(cf * uu + 1.0));
    r2 = std::max(r2, std::abs(cf * au - 0.5 * ed * uu));
    r3 = std::max(r3, std::abs(cf * (mdot(jerk, R[i].u) + mdot(R[i].a, R[i].a)) -
                               (0.5 * edd * uu + ed * au + ed)));
  }
  const double worst = std::max({r1, r2, r3});
  return {worst <= kKinematic, fmt("r1 %.2e, r2 %.2e, r3 %.2e", r1, r2, r3)};
}

Outcome c11_mass() {
  auto s = spec(ForceModel::implicit_maxaccel, 1.0, 1e-3);
  const auto f = FieldSpec::pulse(0.2, 0.5, 0.0);
  const auto t = integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, -5), -5, 5);
  const auto rep = audit(t, s, f);
  const auto& mass = rep.check("mass_ledger");

  const auto v = FieldSpec::vacuum();
  const auto tv = integrate(s, v, initial_state(s, v, {}, {0.4, 0, 0}, 0), 0, 2);
  bool exact = tv.status == RunStatus::ok;
  for (const auto& r : tv.rows) exact = exact && r.epsilon == 0.0 && r.m_b == s.m;

  const bool ok = t.status == RunStatus::ok && mass.samples > 0 &&
                  mass.max_residual <= kMassRel && exact;
  return {ok, fmt("max relative mass error %.2e over %.0f rows; vacuum m_b == m: ", mass.max_residual,
                  double(mass.samples)) +
                  (exact ? "yes" : "no")};
}

Outcome c12_fine_tuning() {
  const auto s = spec(ForceModel::uniform_covariant, 10.0, 1e-3);
  const Vec3 E{1, 0, 0};
  const auto tuned = FieldSpec::constant(E);
  const auto t0 = integrate(s, tuned, initial_state(s, tuned, {}, {0, 0, 0}, 0), 0, 1);
  double quiet = 0.0;
  for (const auto& r : t0.rows) quiet = std::max(quiet, std::abs(r.epsilon_dot));
  const bool tuned_ok = t0.status == RunStatus::ok && quiet < s.solver.eps_dot_min;

  auto perturbed = FieldSpec::constant(E);
  perturbed.add(PlaneWave{kPerturbation * E[0], {0, 1, 0}, {1, 0, 0}, 0});
  const auto t = integrate(s, perturbed, initial_state(s, perturbed, {}, {0, 0, 0}, 0), 0, 1);
  double exit_tau = NAN;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::uniform_stratum_exit &&
        e.tau <= 1.0) {
      exit_tau = e.tau;
      break;
    }
  }
  const bool ok = tuned_ok && !std::isnan(exit_tau);
  return {ok, fmt("tuned max |eps_dot| %.1e; perturbed exit at tau %.4f", quiet, exit_tau)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"pulse limit", c1_pulse},
      {"no run-away after switch-off", c2_no_runaway},
      {"ALD run-away rate", c3_ald_rate},
      {"F_L^2 identity", c4_fl2},
      {"Larmor contraction", c5_larmor},
      {"operator inverse", c6_inverse},
      {"explicit vs implicit gap scaling", c7_gap_scaling},
      {"reparameterization invariance", c8_reparam},
      {"hyperbolic motion", c9_hyperbolic},
      {"kinematic residuals", c10_kinematic},
      {"mass ledger", c11_mass},
      {"fine-tuning instability", c12_fine_tuning},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu: %s %s (%s) [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
