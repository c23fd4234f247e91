#include "radreact/maxaccel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "radreact/errors.hpp"
#include "text_util.hpp"

namespace radreact {

void MaxAccelParams::validate() const {
  if (!(a_max > 0.0) || !std::isfinite(a_max)) {
    throw Error(ErrorCode::config, "a_max must be finite and positive");
  }
}

double epsilon(const FourVector& a, const MaxAccelParams& params) {
  return eta_norm2(a) / (params.a_max * params.a_max);
}

double epsilon(const WorldlineState& state, const MaxAccelParams& params) {
  return epsilon(state.a, params);
}

double conformal_factor(const WorldlineState& state, const MaxAccelParams& params) {
  const double eps = epsilon(state, params);
  if (!(eps < 1.0)) {
    throw Error(ErrorCode::domain_breach,
                "eps = " + detail::fmt17(eps) + " outside the domain of g");
  }
  return 1.0 - eps;
}

double g_dot(const WorldlineState& state, const MaxAccelParams& params, const FourVector& a,
             const FourVector& b) {
  return conformal_factor(state, params) * eta_dot(a, b);
}

double KinematicResiduals::max_abs() const {
  return std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
}

KinematicResiduals kinematic_residuals(const WorldlineState& state, const FourVector& jerk,
                                       double eps_dot, double eps_ddot,
                                       const MaxAccelParams& params) {
  const double cf = conformal_factor(state, params);
  const double uu = eta_norm2(state.u);
  const double au = eta_dot(state.a, state.u);
  KinematicResiduals r;
  r.r1 = cf * uu + 1.0;
  r.r2 = cf * au - 0.5 * eps_dot * uu;
  r.r3 = cf * (eta_dot(jerk, state.u) + eta_norm2(state.a)) -
         (0.5 * eps_ddot * uu + eps_dot * au + eps_dot);
  return r;
}

std::vector<MassLedgerEntry> mass_ledger(std::span<const double> tau,
                                         std::span<const double> eps,
                                         std::span<const double> eps_dot,
                                         std::span<const double> a2, double e, double m,
                                         double a_max, double eps_dot_min) {
  const std::size_t n = tau.size();
  if (eps.size() != n || eps_dot.size() != n || a2.size() != n) {
    throw Error(ErrorCode::invalid_argument, "mass_ledger: column lengths differ");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double k = 2.0 / 3.0 * e * e;

  std::vector<MassLedgerEntry> out(n);
  std::vector<double> ratio(n, nan);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = out[i];
    row.tau = tau[i];
    row.m = m;
    row.epsilon = eps[i];
    row.epsilon_dot = eps_dot[i];
    row.degenerate = !(std::abs(eps_dot[i]) >= eps_dot_min);
    if (row.degenerate) {
      row.m_b = eps[i] == 0.0 ? m : nan;
    } else {
      row.m_b = m - k * a2[i] / eps_dot[i];
      ratio[i] = eps[i] / eps_dot[i];
    }
  }

  // Three-point derivative on the local (possibly non-uniform) grid.
  for (std::size_t i = 0; i < n; ++i) {
    if (n < 3) {
      out[i].constraint_residual = nan;
      continue;
    }
    const std::size_t s = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
    bool ok = true;
    for (std::size_t j = s; j < s + 3; ++j) ok = ok && !out[j].degenerate;
    if (!ok) {
      out[i].constraint_residual = nan;
      continue;
    }
    const std::array<double, 3> nodes{tau[s], tau[s + 1], tau[s + 2]};
    const auto w = fd_weights(tau[i], nodes, 1);
    double dmb = 0.0, dq = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      dmb += w[1][j] * out[s + j].m_b;
      dq += w[1][j] * ratio[s + j];
    }
    out[i].constraint_residual = dmb + k * a_max * a_max * dq;
  }
  return out;
}

double reconstructed_mass(const MassLedgerEntry& entry, double e, double a2) {
  return entry.m_b + 2.0 / 3.0 * e * e * a2 / entry.epsilon_dot;
}

void write_ledger_csv(const std::vector<MassLedgerEntry>& ledger, std::ostream& out) {
  out << "tau,m_b,epsilon,epsilon_dot,degenerate_flag\n";
  for (const auto& r : ledger) {
    out << detail::fmt17(r.tau) << ',' << detail::fmt17(r.m_b) << ','
        << detail::fmt17(r.epsilon) << ',' << detail::fmt17(r.epsilon_dot) << ','
        << (r.degenerate ? 1 : 0) << '\n';
  }
}

}  // namespace radreact
