#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace radreact {

/// Contravariant four-vector, index 0 is the time component, c = 1.
/// The metric signature is fixed to (-,+,+,+).
struct FourVector {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

  constexpr FourVector() = default;
  constexpr FourVector(double t, double x, double y, double z) : c{t, x, y, z} {}

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  bool is_finite() const noexcept {
    return std::isfinite(c[0]) && std::isfinite(c[1]) && std::isfinite(c[2]) &&
           std::isfinite(c[3]);
  }

  constexpr FourVector& operator+=(const FourVector& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr FourVector& operator-=(const FourVector& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr FourVector& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend constexpr bool operator==(const FourVector&, const FourVector&) = default;
};

constexpr FourVector operator+(FourVector a, const FourVector& b) { return a += b; }
constexpr FourVector operator-(FourVector a, const FourVector& b) { return a -= b; }
constexpr FourVector operator-(FourVector a) { return a *= -1.0; }
constexpr FourVector operator*(double s, FourVector a) { return a *= s; }
constexpr FourVector operator*(FourVector a, double s) { return a *= s; }
constexpr FourVector operator/(FourVector a, double s) { return a *= (1.0 / s); }

/// Covariant (index-down) counterpart; kept as a distinct type so that a
/// lowered vector cannot be fed where a contravariant one is expected.
struct FourCovector {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

  constexpr double operator[](std::size_t i) const { return c[i]; }
  friend constexpr bool operator==(const FourCovector&, const FourCovector&) = default;
};

inline constexpr std::array<double, 4> kMetricDiag{-1.0, 1.0, 1.0, 1.0};

/// eta(a, b) = -a0 b0 + a1 b1 + a2 b2 + a3 b3
constexpr double eta_dot(const FourVector& a, const FourVector& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

constexpr double eta_norm2(const FourVector& a) { return eta_dot(a, a); }

constexpr FourCovector lower(const FourVector& a) {
  return FourCovector{{-a[0], a[1], a[2], a[3]}};
}

constexpr FourVector raise(const FourCovector& w) { return {-w[0], w[1], w[2], w[3]}; }

constexpr double contract(const FourCovector& w, const FourVector& v) {
  return w[0] * v[0] + w[1] * v[1] + w[2] * v[2] + w[3] * v[3];
}

/// Max-norm of the raw components; used for scale estimates only.
double max_abs(const FourVector& a) noexcept;

/// P(v) = v + eta(u, v) u, the projection orthogonal to a unit timelike u.
/// Throws ErrorCode::normalization unless |eta(u,u) + 1| <= tol.
FourVector projector_apply(const FourVector& u, const FourVector& v, double tol = 1e-10);

/// Throws ErrorCode::non_finite when any component is NaN or Inf.
void require_finite(const FourVector& a, const char* what);

/// Dense 4x4 matrix with a mixed index pair M^mu_nu stored row-major.
struct Matrix4 {
  std::array<double, 16> m{};

  static Matrix4 identity(double diag = 1.0);

  double& operator()(std::size_t r, std::size_t col) { return m[r * 4 + col]; }
  double operator()(std::size_t r, std::size_t col) const { return m[r * 4 + col]; }

  FourVector apply(const FourVector& v) const;
  Matrix4 operator*(const Matrix4& o) const;
  double max_abs_diff(const Matrix4& o) const;
};

/// Rank-3 array T^mu_{nu sigma}.
struct Tensor3 {
  std::array<double, 64> t{};

  double& operator()(std::size_t mu, std::size_t nu, std::size_t sigma) {
    return t[(mu * 4 + nu) * 4 + sigma];
  }
  double operator()(std::size_t mu, std::size_t nu, std::size_t sigma) const {
    return t[(mu * 4 + nu) * 4 + sigma];
  }

  /// Returns T^mu_{nu sigma} v^nu w^sigma.
  FourVector contract(const FourVector& v, const FourVector& w) const;
};

}  // namespace radreact
