#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "radreact/minkowski.hpp"
#include "radreact/worldline.hpp"

namespace radreact {

struct MaxAccelParams {
  double a_max = 0.0;
  /// Largest eps seen along a trajectory; filled in by callers.
  double epsilon0 = 0.0;

  /// Throws ConfigError unless a_max is finite and positive.
  void validate() const;
};

/// eps = eta(a, a) / A_max^2.
double epsilon(const FourVector& a, const MaxAccelParams& params);
double epsilon(const WorldlineState& state, const MaxAccelParams& params);

/// 1 - eps; throws DomainBreach when eps >= 1.
double conformal_factor(const WorldlineState& state, const MaxAccelParams& params);

/// g(a, b) = (1 - eps) eta(a, b), eps taken from `state`. Throws DomainBreach.
double g_dot(const WorldlineState& state, const MaxAccelParams& params, const FourVector& a,
             const FourVector& b);

struct KinematicResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;

  double max_abs() const;
};

/// r1 = g(u,u) + 1
/// r2 = g(a,u) - eps_dot/2 eta(u,u)
/// r3 = g(j,u) + g(a,a) - [eps_ddot eta(u,u)/2 + eps_dot eta(a,u) + eps_dot]
/// The bracket of r3 expands d/dtau(eps_dot eta(u,u)/2) explicitly, so the
/// second derivative of eps has to be supplied.
KinematicResiduals kinematic_residuals(const WorldlineState& state, const FourVector& jerk,
                                       double eps_dot, double eps_ddot,
                                       const MaxAccelParams& params);

struct MassLedgerEntry {
  double tau = 0.0;
  double m_b = 0.0;
  double m = 0.0;
  double epsilon = 0.0;
  double epsilon_dot = 0.0;
  bool degenerate = false;
  /// d/dtau m_b + (2/3) e^2 A_max^2 d/dtau (eps / eps_dot), by finite
  /// differences; NaN next to degenerate entries.
  double constraint_residual = 0.0;
};

/// m_b = m - (2/3) e^2 a2 / eps_dot wherever |eps_dot| >= eps_dot_min.
/// Other entries are flagged degenerate and carry m_b = m when eps == 0,
/// NaN otherwise.
std::vector<MassLedgerEntry> mass_ledger(std::span<const double> tau,
                                         std::span<const double> eps,
                                         std::span<const double> eps_dot,
                                         std::span<const double> a2, double e, double m,
                                         double a_max, double eps_dot_min = 1e-8);

/// m_b + (2/3) e^2 a2 / eps_dot.
double reconstructed_mass(const MassLedgerEntry& entry, double e, double a2);

/// CSV columns: tau, m_b, epsilon, epsilon_dot, degenerate_flag.
void write_ledger_csv(const std::vector<MassLedgerEntry>& ledger, std::ostream& out);

}  // namespace radreact
