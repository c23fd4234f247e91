#pragma once

#include <array>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "radreact/minkowski.hpp"
#include "radreact/worldline.hpp"

namespace radreact {

using Vec3 = std::array<double, 3>;

/// Faraday tensor F_{mu nu} (both indices down) at one event, stored as its
/// six independent components: F_{i0} = E_i and F_{ij} = eps_{ijk} B_k.
/// Antisymmetry is therefore exact by construction.
struct EMFieldTensor {
  Vec3 E{0.0, 0.0, 0.0};
  Vec3 B{0.0, 0.0, 0.0};

  /// F_{mu nu}.
  double lower(std::size_t mu, std::size_t nu) const;
  /// F^mu_nu = eta^{mu rho} F_{rho nu}.
  Matrix4 mixed() const;
  /// Builds the tensor from a 4x4 array of F_{mu nu}; only the strictly
  /// lower triangle is read (the array is assumed antisymmetric).
  static EMFieldTensor from_lower(const std::array<std::array<double, 4>, 4>& f);

  bool is_zero() const noexcept;

  EMFieldTensor& operator+=(const EMFieldTensor& o);
  friend EMFieldTensor operator+(EMFieldTensor a, const EMFieldTensor& b) { return a += b; }
  friend EMFieldTensor operator*(double s, EMFieldTensor a);
};

/// (F u)^mu = F^mu_nu u^nu.
FourVector field_apply(const EMFieldTensor& F, const FourVector& u);
/// F_{mu nu} u^nu (index down); the covector form used by operator M and O.
FourCovector field_apply_lower(const EMFieldTensor& F, const FourVector& u);

/// e F^mu_nu u^nu with eta raising; eta(u, result) vanishes identically.
FourVector lorentz_force(const EMFieldTensor& F, double e, const FourVector& u);

/// Active parameter window [on, off) for a field component.
struct ParamWindow {
  double on = -std::numeric_limits<double>::infinity();
  double off = std::numeric_limits<double>::infinity();
  bool contains(double tau) const noexcept { return tau >= on && tau < off; }
};

struct VacuumField {};

struct ConstantField {
  Vec3 E{0.0, 0.0, 0.0};
  Vec3 B{0.0, 0.0, 0.0};
};

/// Electric pulse along `direction` with profile
/// kappa / (w sqrt(2 pi)) exp(-(tau - center)^2 / (2 w^2)) in the evolution
/// parameter tau; its integral is kappa for every width.
struct GaussianPulse {
  double kappa = 0.0;
  double width = 1.0;
  double center = 0.0;
  Vec3 direction{1.0, 0.0, 0.0};
};

/// Linearly polarized vacuum plane wave
/// E = amplitude * pol * cos(k.x - |k| x0 + phase), B = k_hat x E.
struct PlaneWave {
  double amplitude = 0.0;
  Vec3 wave_vector{0.0, 0.0, 1.0};
  Vec3 polarization{1.0, 0.0, 0.0};
  double phase = 0.0;
};

using FieldShape = std::variant<VacuumField, ConstantField, GaussianPulse, PlaneWave>;

struct FieldComponent {
  FieldShape shape;
  ParamWindow window;
};

/// External field as a superposition of catalogue components.
struct FieldSpec {
  std::vector<FieldComponent> components;

  static FieldSpec vacuum() { return {}; }
  static FieldSpec constant(Vec3 E, Vec3 B = {0.0, 0.0, 0.0});
  static FieldSpec pulse(double kappa, double width, double center = 0.0);

  FieldSpec& add(FieldShape shape, ParamWindow window = {});

  /// Throws ConfigError for non-positive widths, zero wave vectors or
  /// polarizations parallel to the wave vector.
  void validate() const;

  /// Smallest intrinsic time scale (pulse width, 1/omega); infinity if none.
  double time_scale() const;

  /// All Gaussian pulse components (used by the pre-acceleration probe).
  std::vector<GaussianPulse> pulses() const;
};

EMFieldTensor faraday_at(const FieldSpec& spec, const FourVector& x, double tau);

/// dF/dtau along the worldline through (x, u) at tau, by central differences
/// of the catalogue field with step h.
EMFieldTensor faraday_rate(const FieldSpec& spec, const FourVector& x, const FourVector& u,
                           double tau, double h);

/// Suggested step for faraday_rate given the field's time scale.
double field_fd_step(const FieldSpec& spec);

/// Coefficients of B, C, D in the jet basis (u, a, jerk). Index 0 multiplies
/// u, index 1 the acceleration, index 2 the jerk.
struct JetCorrectionCoefficients {
  std::array<double, 3> beta{0.0, 0.0, 0.0};
  std::array<double, 3> gamma{0.0, 0.0, 0.0};
  std::array<double, 3> delta{0.0, 0.0, 0.0};

  /// Only beta_2 = (4/3) e^2 a^2 / eps_dot is nonzero. Throws
  /// DegenerateRegime when |eps_dot| < eps_dot_min.
  static JetCorrectionCoefficients second_order(double e, double a2, double eps_dot,
                                                double eps_dot_min = 1e-8);
};

/// Upsilon_{mu nu} = B_mu u_nu - B_nu u_mu + C_mu a_nu - C_nu a_mu
///                 + D_mu j_nu - D_nu j_mu,
/// indices lowered with g = conformal * eta.
EMFieldTensor upsilon_worldline(const JetCorrectionCoefficients& coeffs,
                                const WorldlineState& state, const FourVector& jerk,
                                double conformal = 1.0);

/// g^{mu rho} T_{rho nu} u^nu for an antisymmetric T, g = conformal * eta.
FourVector upsilon_contract(const EMFieldTensor& T, const FourVector& u, double conformal = 1.0);

}  // namespace radreact
