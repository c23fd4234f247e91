#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "radreact/fields.hpp"
#include "radreact/minkowski.hpp"
#include "radreact/worldline.hpp"

namespace radreact {

enum class ForceModel {
  lorentz,
  ald,
  landau_lifshitz,
  implicit_maxaccel,
  explicit_approx,
  uniform_covariant,
};

const char* to_string(ForceModel model) noexcept;
/// Throws ConfigError for unknown names.
ForceModel parse_force_model(std::string_view name);

/// True for models whose velocity is normalized with g = (1 - eps) eta.
bool uses_g_normalization(ForceModel model) noexcept;
bool requires_a_max(ForceModel model) noexcept;

/// Index raising for F^mu_nu in the implicit model.
enum class FieldRaising { eta, g };
const char* to_string(FieldRaising r) noexcept;
FieldRaising parse_field_raising(std::string_view name);

enum class StepMethod { rk4_fixed, rk45_adaptive };
const char* to_string(StepMethod m) noexcept;
StepMethod parse_step_method(std::string_view name);

struct SolverOptions {
  StepMethod method = StepMethod::rk4_fixed;
  double dt = 1e-3;
  /// Adaptive step tolerance and relative tolerance of the implicit root.
  double tol = 1e-12;
  int max_iter = 50;
  double eps_dot_min = 1e-8;
  double runaway_factor = 1e12;
  /// Upper bound on accepted steps, guards against stalled adaptive runs.
  long max_steps = 10'000'000;

  void validate() const;
};

struct ForceModelSpec {
  ForceModel model = ForceModel::lorentz;
  double e = 0.0;
  double m = 0.0;
  /// Zero means "not configured"; required by the maximal-acceleration models.
  double a_max = 0.0;
  FieldRaising raising = FieldRaising::eta;
  SolverOptions solver;

  /// Throws ConfigError on m <= 0, missing A_max or bad solver options.
  void validate() const;
  double tau0() const;
};

/// tau_0 = 2 e^2 / (3 m).
double characteristic_time(double e, double m);

/// Jerk solved from m a = e F u + (2/3) e^2 (j - eta(a,a) u):
/// j = (m a - e F u) / (m tau_0) + eta(a, a) u. Needs e != 0.
FourVector ald_jerk(const WorldlineState& state, const EMFieldTensor& F, double e, double m);

/// m a - e F u - (2/3) e^2 (j - eta(a,a) u); state.jerk must be set.
FourVector ald_residual(const WorldlineState& state, const EMFieldTensor& F, double e,
                        double m);

/// Reduction of order: the ALD correction evaluated on the Lorentz
/// acceleration, with dF/dtau from finite differences of the catalogue.
FourVector landau_lifshitz_accel(const WorldlineState& state, const FieldSpec& field, double e,
                                 double m, double tau);
FourVector landau_lifshitz_accel(const WorldlineState& state, const EMFieldTensor& F,
                                 const EMFieldTensor& dF, double e, double m);

/// R = m a - e F u + (2/3) e^2 eta(a, a) u with F raised by eta.
FourVector implicit_residual(const FourVector& a_trial, const WorldlineState& state,
                             const EMFieldTensor& F, double e, double m);
/// Same, honouring spec.raising (g-raising multiplies F u by 1/(1 - eps(a))).
FourVector implicit_residual(const FourVector& a_trial, const WorldlineState& state,
                             const EMFieldTensor& F, const ForceModelSpec& spec);

struct ImplicitSolution {
  FourVector a;
  int iterations = 0;
  /// Max-norm of the residual divided by the largest term in it.
  double relative_residual = 0.0;
  bool used_newton = false;
  bool used_continuation = false;
};

/// Root of the implicit equation on the branch connected to the Lorentz
/// acceleration. Fixed-point iteration with the inverse of
/// M(a) = m I + (2/3) e^2 u eta(a, .), then Newton refinement, then
/// continuation in the radiation coefficient when both stall.
/// Throws NoConvergence, MaximalAccelBreach (eta(a,a) >= A_max^2), NonFinite.
ImplicitSolution solve_implicit_accel(const WorldlineState& state, const EMFieldTensor& F,
                                      const ForceModelSpec& spec,
                                      std::optional<FourVector> seed = std::nullopt);

/// M^mu_rho = m delta + (2 e^3 / (3 m)) u^mu F_{rho lambda} u^lambda.
Matrix4 operator_M(const WorldlineState& state, const EMFieldTensor& F, double e, double m);
/// O^mu_kappa = delta / m - (2 e^3 / (3 m^3)) u^mu F_{kappa rho} u^rho,
/// the exact inverse of operator_M.
Matrix4 operator_O(const WorldlineState& state, const EMFieldTensor& F, double e, double m);

/// O (e F u) = e F u / m - (tau_0 / m^2) F_L^2 u.
FourVector explicit_approx_accel(const WorldlineState& state, const EMFieldTensor& F, double e,
                                 double m);

struct ConnectionCoefficients {
  Tensor3 K;
  Tensor3 L;
};

/// K^mu_{nu sigma} = -(e / (2 m eta(u,u))) (F^mu_nu u_sigma + F^mu_sigma u_nu)
/// L^mu_{nu sigma} = (2 e^4 / (3 m^3)) F_{rho sigma} F^rho_nu u^mu
/// so that -(K + L)(u, u) equals explicit_approx_accel. Throws DomainBreach
/// when eps(state) >= 1.
ConnectionCoefficients connection_coeffs(const WorldlineState& state, const EMFieldTensor& F,
                                         double e, double m, double a_max);

/// P = -(2/3) e^2 eta(a, a) u.
FourVector larmor_power(const WorldlineState& state, double e);

/// m g(a, u) + (2/3) e^2 eta(a, a).
double larmor_contraction_residual(const WorldlineState& state, double e, double m,
                                   double a_max);

/// eta(e F u, e F u).
double lorentz_force_square(const EMFieldTensor& F, double e, const FourVector& u);

/// F_L^2 - [(2/3 e^2)^2 a2^2 / (1 - eps) + m^2 a2], divided by max(F_L^2, m^2 a2).
double fl2_identity_residual(double fl2, double a2, double e, double m, double a_max);

/// (e / m) F u. Throws RegimeViolation if |eps_dot| >= eps_dot_min.
FourVector uniform_covariant_rhs(const WorldlineState& state, const EMFieldTensor& F, double e,
                                 double m, double eps_dot, double eps_dot_min);

/// d eps / dtau along the Lorentz flow: 2 eta(a, j) / A_max^2 with
/// a = (e/m) F u and j = (e/m)(dF u + F a).
double uniform_eps_dot(const WorldlineState& state, const EMFieldTensor& F,
                       const EMFieldTensor& dF, double e, double m, double a_max);

}  // namespace radreact
