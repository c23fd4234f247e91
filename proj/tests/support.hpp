#pragma once

#include <cmath>
#include <random>

#include "radreact/fields.hpp"
#include "radreact/minkowski.hpp"

namespace rrtest {

using radreact::FourVector;

/// Fixed-seed generators for property sweeps.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed = 20240611) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

  FourVector vec(double scale = 1.0) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale),
            uniform(-scale, scale)};
  }

  radreact::Vec3 vec3(double scale = 1.0) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
  }

  /// Future-pointing, eta(u,u) = -1.
  FourVector unit_timelike(double max_spatial = 2.0) {
    const radreact::Vec3 v = vec3(max_spatial);
    return {std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]), v[0], v[1], v[2]};
  }

  radreact::EMFieldTensor field(double scale = 1.0) { return {vec3(scale), vec3(scale)}; }
};

/// Independent implementation of F^mu_nu v^nu by explicit matrix build.
inline FourVector reference_Fu(const radreact::Vec3& E, const radreact::Vec3& B,
                               const FourVector& v) {
  const double F[4][4] = {{0.0, -E[0], -E[1], -E[2]},
                          {E[0], 0.0, B[2], -B[1]},
                          {E[1], -B[2], 0.0, B[0]},
                          {E[2], B[1], -B[0], 0.0}};
  const double eta[4] = {-1.0, 1.0, 1.0, 1.0};
  FourVector out;
  for (int mu = 0; mu < 4; ++mu) {
    double s = 0.0;
    for (int nu = 0; nu < 4; ++nu) s += eta[mu] * F[mu][nu] * v[nu];
    out[mu] = s;
  }
  return out;
}

inline double max_diff(const FourVector& a, const FourVector& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace rrtest
