#include "radreact/minkowski.hpp"

#include <algorithm>
#include <string>

#include "radreact/errors.hpp"

namespace radreact {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::normalization: return "NormalizationError";
    case ErrorCode::non_finite: return "NonFinite";
    case ErrorCode::insufficient_samples: return "InsufficientSamples";
    case ErrorCode::not_timelike: return "NotTimelike";
    case ErrorCode::domain_breach: return "DomainBreach";
    case ErrorCode::not_monotone: return "NotMonotone";
    case ErrorCode::degenerate_regime: return "DegenerateRegime";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::maximal_accel_breach: return "MaximalAccelBreach";
    case ErrorCode::regime_violation: return "RegimeViolation";
    case ErrorCode::runaway_abort: return "RunawayAbort";
    case ErrorCode::nonrelativistic_limit: return "NonRelativisticLimit";
    case ErrorCode::config: return "ConfigError";
    case ErrorCode::io: return "IoError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

double max_abs(const FourVector& a) noexcept {
  double r = 0.0;
  for (double v : a.c) r = std::max(r, std::abs(v));
  return r;
}

FourVector projector_apply(const FourVector& u, const FourVector& v, double tol) {
  const double n = eta_norm2(u);
  if (!(std::abs(n + 1.0) <= tol)) {
    throw Error(ErrorCode::normalization,
                "projector_apply: eta(u,u) = " + std::to_string(n) + ", expected -1");
  }
  return v + eta_dot(u, v) * u;
}

void require_finite(const FourVector& a, const char* what) {
  if (!a.is_finite()) {
    throw Error(ErrorCode::non_finite, std::string(what) + " has a non-finite component");
  }
}

Matrix4 Matrix4::identity(double diag) {
  Matrix4 r;
  for (std::size_t i = 0; i < 4; ++i) r(i, i) = diag;
  return r;
}

FourVector Matrix4::apply(const FourVector& v) const {
  FourVector r;
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 4; ++j) s += (*this)(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Matrix4 Matrix4::operator*(const Matrix4& o) const {
  Matrix4 r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  return r;
}

double Matrix4::max_abs_diff(const Matrix4& o) const {
  double r = 0.0;
  for (std::size_t i = 0; i < 16; ++i) r = std::max(r, std::abs(m[i] - o.m[i]));
  return r;
}

FourVector Tensor3::contract(const FourVector& v, const FourVector& w) const {
  FourVector r;
  for (std::size_t mu = 0; mu < 4; ++mu) {
    double s = 0.0;
    for (std::size_t nu = 0; nu < 4; ++nu)
      for (std::size_t sg = 0; sg < 4; ++sg) s += (*this)(mu, nu, sg) * v[nu] * w[sg];
    r[mu] = s;
  }
  return r;
}

}  // namespace radreact
