#include "radreact/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

#include "json.hpp"
#include "radreact/errors.hpp"
#include "radreact/maxaccel.hpp"

namespace radreact {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) {
    throw Error(ErrorCode::invalid_argument, "fit_line needs two or more paired points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::invalid_argument, "fit_line: x is constant");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  f.points = n;
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "fit_loglog needs positive values");
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

LineFit fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = std::min(t.size(), y.size());
  std::vector<double> tt, ly;
  for (std::size_t i = n / 3; i < 2 * n / 3; ++i) {
    const double v = std::abs(y[i]);
    if (v > 0.0 && std::isfinite(v)) {
      tt.push_back(t[i]);
      ly.push_back(std::log(v));
    }
  }
  return fit_line(tt, ly);
}

const std::vector<std::string>& audit_check_names() {
  static const std::vector<std::string> names{
      "normalization_r1", "kinematic_r2",       "kinematic_r3", "fl2_identity",
      "larmor_contraction", "acceleration_bound", "mass_ledger"};
  return names;
}

bool AuditReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult& AuditReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::invalid_argument, "no audit check named '" + name + "'");
}

std::string AuditReport::to_json() const {
  nlohmann::ordered_json j;
  auto& arr = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"applicable", c.applicable},
                   {"max_residual", c.max_residual},
                   {"mean_residual", c.mean_residual},
                   {"tolerance", c.tolerance},
                   {"samples", c.samples},
                   {"pass", c.pass}});
  }
  auto& fj = j["fits"] = nlohmann::ordered_json::object();
  for (const auto& [name, f] : fits) {
    fj[name] = {{"exponent", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
                {"points", f.points}};
  }
  j["runaway_detected"] = runaway_detected;
  j["preacceleration_detected"] = preacceleration_detected;
  j["preacceleration_max"] = preacceleration_max;
  j["epsilon0"] = epsilon0;
  j["all_pass"] = all_pass();
  return j.dump(2) + "\n";
}

std::string AuditReport::summary_table() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %-5s %-12s %-12s %-12s %s\n", "check", "appl",
                "max", "mean", "tolerance", "result");
  out += line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-20s %-5s %-12.4e %-12.4e %-12.4e %s\n", c.name.c_str(),
                  c.applicable ? "yes" : "no", c.max_residual, c.mean_residual, c.tolerance,
                  c.pass ? "pass" : "FAIL");
    out += line;
  }
  std::snprintf(line, sizeof line, "runaway_detected=%s preacceleration_detected=%s\n",
                runaway_detected ? "true" : "false",
                preacceleration_detected ? "true" : "false");
  out += line;
  for (const auto& [name, f] : fits) {
    std::snprintf(line, sizeof line, "fit %s: exponent=%.6g r2=%.6g points=%zu\n",
                  name.c_str(), f.slope, f.r2, f.points);
    out += line;
  }
  return out;
}

namespace {

// Accumulates |residual| samples into a check.
struct Accum {
  CheckResult c;
  double sum = 0.0;

  Accum(std::string name, double tol) {
    c.name = std::move(name);
    c.tolerance = tol;
  }

  void add(double r) {
    const double v = std::isfinite(r) ? std::abs(r) : std::numeric_limits<double>::infinity();
    c.max_residual = std::max(c.max_residual, v);
    sum += v;
    ++c.samples;
  }

  CheckResult finish(bool inclusive = true) {
    if (c.samples > 0) c.mean_residual = sum / static_cast<double>(c.samples);
    c.pass = !c.applicable ||
             (inclusive ? c.max_residual <= c.tolerance : c.max_residual < c.tolerance);
    return c;
  }

  CheckResult skip() {
    c.applicable = false;
    return finish();
  }
};

}  // namespace

AuditReport audit(const TrajectoryRecord& traj, const ForceModelSpec& model,
                  const FieldSpec& field, const AuditThresholds& th) {
  AuditReport rep;
  const auto& rows = traj.rows;
  const std::size_t n = rows.size();
  const bool has_a = model.a_max > 0.0;
  const bool g_model = uses_g_normalization(model.model);
  const double inf = std::numeric_limits<double>::infinity();

  for (const auto& r : rows) {
    if (std::isfinite(r.epsilon)) rep.epsilon0 = std::max(rep.epsilon0, r.epsilon);
  }

  Accum norm("normalization_r1", th.normalization);
  for (const auto& r : rows) norm.add(r.g_norm_residual);
  rep.checks.push_back(norm.finish());

  // r2 and r3 need jerks and two eps derivatives; 5-point stencils.
  Accum r2("kinematic_r2", th.kinematic), r3("kinematic_r3", th.kinematic);
  if (n >= 5) {
    const auto tau = traj.column("tau");
    std::vector<FourVector> acc(n);
    for (std::size_t i = 0; i < n; ++i) acc[i] = rows[i].a;
    std::vector<FourVector> jerk;
    if (model.model == ForceModel::ald) {
      for (const auto& r : rows) {
        WorldlineState s;
        s.x = r.x;
        s.u = r.u;
        s.a = r.a;
        jerk.push_back(ald_jerk(s, faraday_at(field, r.x, r.tau), model.e, model.m));
      }
    } else {
      jerk = differentiate(tau, acc, 1, 5);
    }
    std::vector<double> ed(n, 0.0), edd(n, 0.0);
    MaxAccelParams p{inf};
    if (g_model) {
      p.a_max = model.a_max;
      ed = traj.column("epsilon_dot");
      edd = differentiate(tau, traj.column("epsilon"), 2, 5);
    }
    for (std::size_t i = 0; i < n; ++i) {
      WorldlineState s;
      s.x = rows[i].x;
      s.u = rows[i].u;
      s.a = rows[i].a;
      const auto k = kinematic_residuals(s, jerk[i], ed[i], edd[i], p);
      r2.add(k.r2);
      r3.add(k.r3);
    }
    rep.checks.push_back(r2.finish());
    rep.checks.push_back(r3.finish());
  } else {
    rep.checks.push_back(r2.skip());
    rep.checks.push_back(r3.skip());
  }

  Accum fl2("fl2_identity", th.fl2_relative);
  if (model.model == ForceModel::implicit_maxaccel && model.raising == FieldRaising::eta) {
    for (const auto& r : rows) {
      fl2.add(fl2_identity_residual(r.fL2, r.a_sq, model.e, model.m, model.a_max));
    }
    rep.checks.push_back(fl2.finish());
  } else {
    rep.checks.push_back(fl2.skip());
  }

  double a2_max = 0.0;
  for (const auto& r : rows) a2_max = std::max(a2_max, std::abs(r.a_sq));
  const double larmor_tol =
      th.larmor_factor * rep.epsilon0 * rep.epsilon0 * model.m * model.tau0() * a2_max;
  Accum lar("larmor_contraction", larmor_tol);
  if (model.model == ForceModel::implicit_maxaccel ||
      model.model == ForceModel::explicit_approx) {
    for (const auto& r : rows) lar.add(r.larmor_residual);
    rep.checks.push_back(lar.finish());
  } else {
    rep.checks.push_back(lar.skip());
  }

  Accum bound("acceleration_bound", 1.0);
  if (has_a) {
    for (const auto& r : rows) bound.add(r.epsilon);
    rep.checks.push_back(bound.finish(false));
  } else {
    rep.checks.push_back(bound.skip());
  }

  Accum mass("mass_ledger", th.mass_relative);
  if (has_a) {
    for (const auto& r : rows) {
      if (std::abs(r.epsilon_dot) >= model.solver.eps_dot_min) {
        MassLedgerEntry e;
        e.m_b = r.m_b;
        e.epsilon_dot = r.epsilon_dot;
        mass.add((reconstructed_mass(e, model.e, r.a_sq) - model.m) / model.m);
      } else if (r.epsilon == 0.0) {
        mass.add(r.m_b == model.m ? 0.0 : (r.m_b - model.m) / model.m);
      }
    }
    rep.checks.push_back(mass.finish());
  } else {
    rep.checks.push_back(mass.skip());
  }

  if (n >= 2) {
    bool zero_field = true;
    for (const auto& r : rows) zero_field = zero_field && faraday_at(field, r.x, r.tau).is_zero();
    const double a0 = rows.front().a_sq, a1 = rows.back().a_sq;
    rep.runaway_detected =
        zero_field && a0 > 0.0 && a1 / a0 > model.solver.runaway_factor;
    if (model.model == ForceModel::ald && zero_field && n >= 6) {
      std::vector<double> t, mag;
      for (const auto& r : rows) {
        t.push_back(r.tau);
        mag.push_back(std::sqrt(std::max(0.0, r.a_sq)));
      }
      try {
        rep.fits["runaway_rate"] = fit_exponential_rate(t, mag);
      } catch (const Error&) {
        // zero acceleration: no rate to report
      }
    }
  }

  const auto pulses = field.pulses();
  if (!pulses.empty() && n > 0) {
    double t_pre = inf;
    for (const auto& p : pulses) t_pre = std::min(t_pre, p.center - 5.0 * p.width);
    for (const auto& r : rows) {
      if (!(r.tau < t_pre)) continue;
      for (int i = 1; i < 4; ++i) {
        rep.preacceleration_max =
            std::max(rep.preacceleration_max, std::abs(r.u[i] - rows.front().u[i]));
      }
    }
    rep.preacceleration_detected =
        rep.preacceleration_max > th.preaccel_factor * model.solver.tol;
  }
  return rep;
}

PulseProbeResult preacceleration_probe(const ForceModelSpec& model,
                                       const std::vector<double>& widths, double kappa,
                                       const PulseProbeOptions& options) {
  model.validate();
  const double a_nr = 3.0 * model.m / (2.0 * model.e * model.e);
  if (!std::isfinite(kappa) || std::abs(kappa) / a_nr > options.max_nonrel_ratio) {
    throw Error(ErrorCode::nonrelativistic_limit, "kappa / a = " + std::to_string(std::abs(kappa) / a_nr) +
                                       " exceeds the non-relativistic bound " +
                                       std::to_string(options.max_nonrel_ratio));
  }
  for (double w : widths) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::config, "pulse widths must be positive");
    }
  }
  const double target = kappa / a_nr;
  const double c = options.pulse_center;

  auto run = [&](double w) {
    ForceModelSpec s = model;
    s.solver.dt = std::min(s.solver.dt, w / 20.0);
    const auto field = FieldSpec::pulse(kappa, w, c);
    const double half = std::max(1.0, 10.0 * w);
    PulseProbeRow row;
    row.width = w;
    row.target = target;
    const auto init = initial_state(s, field, {}, {0.0, 0.0, 0.0}, c - half);
    const auto traj = integrate(s, field, init, c - half, c + half);
    row.status = traj.status;
    for (const auto& r : traj.rows) {
      if (r.tau < c - 5.0 * w) row.pre_max = std::max(row.pre_max, std::abs(r.u[1]));
    }
    row.post = traj.rows.back().u[1];
    row.error = std::abs(row.post - target);
    return row;
  };

  std::vector<std::future<PulseProbeRow>> jobs;
  for (double w : widths) jobs.push_back(std::async(std::launch::async, run, w));
  PulseProbeResult res;
  for (auto& j : jobs) res.rows.push_back(j.get());

  std::vector<double> lw, le;
  for (const auto& r : res.rows) {
    if (r.status == RunStatus::ok && r.error > 0.0) {
      lw.push_back(r.width);
      le.push_back(r.error);
    }
  }
  if (lw.size() >= 2) {
    try {
      res.width_fit = fit_loglog(lw, le);
    } catch (const Error&) {
      // repeated widths
    }
  }
  return res;
}

TrajectoryGap trajectory_gap(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  TrajectoryGap g;
  if (a.rows.empty() || b.rows.empty()) return g;
  const auto& br = b.rows;
  std::size_t j = 0;
  for (const auto& r : a.rows) {
    if (r.tau < br.front().tau || r.tau > br.back().tau) continue;
    while (j + 1 < br.size() && br[j + 1].tau <= r.tau) ++j;
    FourVector x = br[j].x, u = br[j].u;
    if (br[j].tau != r.tau && j + 1 < br.size()) {
      const double s = (r.tau - br[j].tau) / (br[j + 1].tau - br[j].tau);
      x = (1.0 - s) * br[j].x + s * br[j + 1].x;
      u = (1.0 - s) * br[j].u + s * br[j + 1].u;
    }
    g.position = std::max(g.position, max_abs(r.x - x));
    g.velocity = std::max(g.velocity, max_abs(r.u - u));
  }
  return g;
}

FieldSpec scale_field(const FieldSpec& field, double s) {
  FieldSpec out = field;
  for (auto& c : out.components) {
    std::visit(
        [s](auto& shape) {
          using T = std::decay_t<decltype(shape)>;
          if constexpr (std::is_same_v<T, ConstantField>) {
            for (int i = 0; i < 3; ++i) {
              shape.E[i] *= s;
              shape.B[i] *= s;
            }
          } else if constexpr (std::is_same_v<T, GaussianPulse>) {
            shape.kappa *= s;
          } else if constexpr (std::is_same_v<T, PlaneWave>) {
            shape.amplitude *= s;
          }
        },
        c.shape);
  }
  return out;
}

ScalingStudy epsilon0_scaling_study(const std::vector<double>& field_scales,
                                    const Scenario& base) {
  auto run = [&base](double scale) {
    ScalingRow row;
    row.scale = scale;
    const FieldSpec field = scale_field(base.field, scale);
    ForceModelSpec si = base.model, se = base.model;
    si.model = ForceModel::implicit_maxaccel;
    se.model = ForceModel::explicit_approx;
    try {
      const auto ti = integrate(si, field,
                                initial_state(si, field, base.x0, base.u0_spatial, base.tau_start),
                                base.tau_start, base.tau_end);
      const auto te = integrate(se, field,
                                initial_state(se, field, base.x0, base.u0_spatial, base.tau_start),
                                base.tau_start, base.tau_end);
      for (const auto& r : ti.rows) row.epsilon0 = std::max(row.epsilon0, r.epsilon);
      row.gap = trajectory_gap(ti, te);
      for (const auto* t : {&ti, &te}) {
        if (t->status != RunStatus::ok) {
          row.excluded = true;
          row.reason = std::string(to_string(t->status)) + ": " + t->status_detail;
        }
      }
    } catch (const Error& e) {
      row.excluded = true;
      row.reason = e.what();
    }
    return row;
  };

  std::vector<std::future<ScalingRow>> jobs;
  for (double s : field_scales) jobs.push_back(std::async(std::launch::async, run, s));
  ScalingStudy study;
  for (auto& j : jobs) study.rows.push_back(j.get());

  std::vector<double> e0, gap;
  for (const auto& r : study.rows) {
    const double g = std::max(r.gap.position, r.gap.velocity);
    if (!r.excluded && g > 0.0 && r.epsilon0 > 0.0) {
      e0.push_back(r.epsilon0);
      gap.push_back(g);
    }
  }
  if (e0.size() >= 2) {
    try {
      study.fit = fit_loglog(e0, gap);
    } catch (const Error&) {
      // identical eps0 values
    }
  }
  return study;
}

}  // namespace radreact
