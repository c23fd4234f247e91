#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radreact/minkowski.hpp"

namespace radreact {

/// Jets of a curve at one parameter value: position, velocity, acceleration
/// and (third-order models only) jerk. Derivatives are with respect to `tau`.
struct WorldlineState {
  double tau = 0.0;
  FourVector x;
  FourVector u;
  FourVector a;
  std::optional<FourVector> jerk;
};

/// A curve known only at discrete, strictly increasing parameter values.
struct SampledCurve {
  std::vector<double> t;
  std::vector<FourVector> x;
  std::string parameterization = "t";

  std::size_t size() const noexcept { return t.size(); }

  /// Throws InvalidArgument on size mismatch and NotMonotone when the
  /// parameter is not strictly increasing.
  void validate() const;
};

/// Builds a curve by evaluating `position` at n equally spaced parameters.
SampledCurve sample_curve(const std::function<FourVector(double)>& position, double t0,
                          double t1, std::size_t n, std::string label = "t");

/// Finite-difference weights (Fornberg) for derivatives 0..max_deriv at z
/// over arbitrary distinct nodes; weights[k][j] multiplies f(nodes[j]).
std::vector<std::vector<double>> fd_weights(double z, std::span<const double> nodes,
                                            int max_deriv);

/// d^deriv y / dt^deriv at every sample using a sliding stencil of
/// `stencil` points (centred in the interior, shifted at the ends).
std::vector<double> differentiate(std::span<const double> t, std::span<const double> y,
                                  int deriv, int stencil);
std::vector<FourVector> differentiate(std::span<const double> t,
                                      std::span<const FourVector> y, int deriv,
                                      int stencil);

/// Jets up to `order` (1..3) at every sample, using 2*order+1 point stencils.
/// Throws InsufficientSamples when the curve is shorter than the stencil.
std::vector<WorldlineState> finite_diff_jets(const SampledCurve& curve, int order);

struct ProperTime {
  double value = 0.0;
  /// |composite Simpson - four-point Gauss rule|, a proxy for quadrature error.
  double error_estimate = 0.0;
};

/// Integral of sqrt(-eta(x', x')) dt. Throws NotTimelike.
ProperTime proper_time_eta(const SampledCurve& curve);

/// Integral of sqrt(-g(x', x')) dt with g = (1 - eps) eta, where eps uses the
/// acceleration with respect to eta-arc length (parameter independent).
/// Throws NotTimelike, DomainBreach (eps >= 1 at some sample).
ProperTime proper_time_maxaccel(const SampledCurve& curve, double a_max);

/// Running value of proper_time_maxaccel from the first sample, one entry
/// per sample (entry 0 is zero).
std::vector<double> proper_time_maxaccel_cumulative(const SampledCurve& curve, double a_max);

/// eps at each sample of the curve, after converting the parameter
/// derivatives to eta-arc-length derivatives.
std::vector<double> curve_epsilon(const SampledCurve& curve, double a_max);

/// Relabels the parameter t -> map(t); positions untouched. Throws NotMonotone.
SampledCurve reparameterize(const SampledCurve& curve,
                            const std::function<double(double)>& map);

/// ds/dtau = 1 / (1 - eps_dot), the literal clock relation.
double ds_dtau_from_eps_dot(double eps_dot);
/// dtau/ds = sqrt(1 - eps), from the conformal relation g = (1 - eps) eta.
double dtau_ds_geometric(double eps);

/// CSV with header "t,x0,x1,x2,x3", 17 significant digits.
void write_curve_csv(const SampledCurve& curve, std::ostream& out);
SampledCurve read_curve_csv(std::istream& in);

}  // namespace radreact
