#include "radreact/worldline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "radreact/errors.hpp"
#include "text_util.hpp"

namespace radreact {

void SampledCurve::validate() const {
  if (t.size() != x.size()) {
    throw Error(ErrorCode::invalid_argument, "SampledCurve: parameter/position size mismatch");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw Error(ErrorCode::not_monotone,
                  "SampledCurve: parameter not strictly increasing at sample " +
                      std::to_string(i));
    }
  }
}

SampledCurve sample_curve(const std::function<FourVector(double)>& position, double t0,
                          double t1, std::size_t n, std::string label) {
  if (n < 2) throw Error(ErrorCode::insufficient_samples, "sample_curve: need n >= 2");
  SampledCurve c;
  c.parameterization = std::move(label);
  c.t.reserve(n);
  c.x.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    c.t.push_back(t);
    c.x.push_back(position(t));
  }
  return c;
}

std::vector<std::vector<double>> fd_weights(double z, std::span<const double> nodes,
                                            int max_deriv) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(max_deriv + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_deriv);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

std::size_t stencil_start(std::size_t i, std::size_t n, std::size_t width) {
  const std::size_t half = width / 2;
  if (i < half) return 0;
  return std::min(i - half, n - width);
}

template <class T>
std::vector<T> differentiate_impl(std::span<const double> t, std::span<const T> y, int deriv,
                                  int stencil) {
  const std::size_t n = t.size();
  const auto width = static_cast<std::size_t>(stencil);
  if (n != y.size()) throw Error(ErrorCode::invalid_argument, "differentiate: size mismatch");
  if (stencil <= deriv || n < width) {
    throw Error(ErrorCode::insufficient_samples,
                "differentiate: " + std::to_string(n) + " samples, stencil " +
                    std::to_string(stencil) + " for derivative " + std::to_string(deriv));
  }
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = stencil_start(i, n, width);
    const auto w = fd_weights(t[i], t.subspan(s, width), deriv);
    T acc{};
    for (std::size_t j = 0; j < width; ++j) acc += w[deriv][j] * y[s + j];
    out[i] = acc;
  }
  return out;
}

struct Jets2 {
  std::vector<FourVector> d1;
  std::vector<FourVector> d2;
};

Jets2 curve_jets(const SampledCurve& curve) {
  curve.validate();
  if (curve.size() < 5) {
    throw Error(ErrorCode::insufficient_samples,
                "proper time needs at least 5 samples, got " + std::to_string(curve.size()));
  }
  return {differentiate(curve.t, std::span<const FourVector>(curve.x), 1, 5),
          differentiate(curve.t, std::span<const FourVector>(curve.x), 2, 5)};
}

// Composite Simpson on an irregular grid; a trailing odd interval is closed
// with the quadratic through the last three samples.
double simpson(std::span<const double> t, std::span<const double> f) {
  const std::size_t n = t.size();
  double sum = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = t[i + 1] - t[i];
    const double h1 = t[i + 2] - t[i + 1];
    sum += (h0 + h1) / 6.0 *
           ((2.0 - h1 / h0) * f[i] + (h0 + h1) * (h0 + h1) / (h0 * h1) * f[i + 1] +
            (2.0 - h0 / h1) * f[i + 2]);
  }
  if (i + 1 < n) {
    if (n < 3) return sum + 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
    const double h0 = t[n - 2] - t[n - 3];
    const double h1 = t[n - 1] - t[n - 2];
    const double alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
    const double beta = (h1 * h1 + 3.0 * h1 * h0) / (6.0 * h0);
    const double gamma = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    sum += alpha * f[n - 1] + beta * f[n - 2] - gamma * f[n - 3];
  }
  return sum;
}

// Per-interval integral of the cubic through four neighbouring samples,
// evaluated with two-point Gauss-Legendre (exact for cubics).
std::vector<double> cumulative_cubic(std::span<const double> t, std::span<const double> f) {
  const std::size_t n = t.size();
  std::vector<double> out(n, 0.0);
  const double g = 0.5 / std::sqrt(3.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = t[i + 1] - t[i];
    double piece;
    if (n < 4) {
      piece = 0.5 * h * (f[i] + f[i + 1]);
    } else {
      const std::size_t s = std::min(i > 0 ? i - 1 : 0, n - 4);
      const auto nodes = t.subspan(s, 4);
      const double mid = 0.5 * (t[i] + t[i + 1]);
      double q = 0.0;
      for (double z : {mid - g * h, mid + g * h}) {
        const auto w = fd_weights(z, nodes, 0);
        for (std::size_t j = 0; j < 4; ++j) q += w[0][j] * f[s + j];
      }
      piece = 0.5 * h * q;
    }
    out[i + 1] = out[i] + piece;
  }
  return out;
}

std::vector<double> eta_speed(const SampledCurve& curve, const std::vector<FourVector>& d1) {
  std::vector<double> speed(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double n2 = eta_norm2(d1[i]);
    if (!(n2 < 0.0)) {
      throw Error(ErrorCode::not_timelike, "curve is not timelike at t = " +
                                               detail::fmt17(curve.t[i]));
    }
    speed[i] = std::sqrt(-n2);
  }
  return speed;
}

std::vector<double> maxaccel_integrand(const SampledCurve& curve, double a_max) {
  if (!(a_max > 0.0)) throw Error(ErrorCode::invalid_argument, "a_max must be positive");
  const auto jets = curve_jets(curve);
  const auto speed = eta_speed(curve, jets.d1);
  const auto eps = curve_epsilon(curve, a_max);
  std::vector<double> f(curve.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(eps[i] < 1.0)) {
      throw Error(ErrorCode::domain_breach,
                  "eps = " + detail::fmt17(eps[i]) + " >= 1 at t = " + detail::fmt17(curve.t[i]));
    }
    f[i] = speed[i] * std::sqrt(1.0 - eps[i]);
  }
  return f;
}

ProperTime integrate_samples(const SampledCurve& curve, const std::vector<double>& f) {
  const double s = simpson(curve.t, f);
  const double c = cumulative_cubic(curve.t, f).back();
  return {s, std::abs(s - c)};
}

}  // namespace

std::vector<double> differentiate(std::span<const double> t, std::span<const double> y,
                                  int deriv, int stencil) {
  return differentiate_impl<double>(t, y, deriv, stencil);
}

std::vector<FourVector> differentiate(std::span<const double> t,
                                      std::span<const FourVector> y, int deriv, int stencil) {
  return differentiate_impl<FourVector>(t, y, deriv, stencil);
}

std::vector<WorldlineState> finite_diff_jets(const SampledCurve& curve, int order) {
  if (order < 1 || order > 3) {
    throw Error(ErrorCode::invalid_argument, "finite_diff_jets: order must be 1, 2 or 3");
  }
  curve.validate();
  const int stencil = 2 * order + 1;
  if (curve.size() < static_cast<std::size_t>(stencil)) {
    throw Error(ErrorCode::insufficient_samples,
                "finite_diff_jets: order " + std::to_string(order) + " needs " +
                    std::to_string(stencil) + " samples, got " + std::to_string(curve.size()));
  }
  const std::span<const FourVector> xs(curve.x);
  const auto d1 = differentiate(curve.t, xs, 1, stencil);
  std::vector<FourVector> d2, d3;
  if (order >= 2) d2 = differentiate(curve.t, xs, 2, stencil);
  if (order >= 3) d3 = differentiate(curve.t, xs, 3, stencil);

  std::vector<WorldlineState> out(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    auto& s = out[i];
    s.tau = curve.t[i];
    s.x = curve.x[i];
    s.u = d1[i];
    if (order >= 2) s.a = d2[i];
    if (order >= 3) s.jerk = d3[i];
  }
  return out;
}

std::vector<double> curve_epsilon(const SampledCurve& curve, double a_max) {
  const auto jets = curve_jets(curve);
  const auto speed = eta_speed(curve, jets.d1);
  std::vector<double> eps(curve.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    // Acceleration with respect to eta-arc length s, ds/dt = speed:
    // d2x/ds2 = (x'' + eta(x', x'') x' / speed^2) / speed^2.
    const FourVector& v = jets.d1[i];
    const FourVector& w = jets.d2[i];
    const double lam2 = speed[i] * speed[i];
    const FourVector acc = (w + (eta_dot(v, w) / lam2) * v) / lam2;
    eps[i] = eta_norm2(acc) / (a_max * a_max);
  }
  return eps;
}

ProperTime proper_time_eta(const SampledCurve& curve) {
  const auto jets = curve_jets(curve);
  return integrate_samples(curve, eta_speed(curve, jets.d1));
}

ProperTime proper_time_maxaccel(const SampledCurve& curve, double a_max) {
  return integrate_samples(curve, maxaccel_integrand(curve, a_max));
}

std::vector<double> proper_time_maxaccel_cumulative(const SampledCurve& curve, double a_max) {
  return cumulative_cubic(curve.t, maxaccel_integrand(curve, a_max));
}

SampledCurve reparameterize(const SampledCurve& curve,
                            const std::function<double(double)>& map) {
  curve.validate();
  SampledCurve out;
  out.parameterization = "phi(" + curve.parameterization + ")";
  out.x = curve.x;
  out.t.reserve(curve.size());
  for (double t : curve.t) out.t.push_back(map(t));
  for (std::size_t i = 1; i < out.t.size(); ++i) {
    if (!(out.t[i] > out.t[i - 1])) {
      throw Error(ErrorCode::not_monotone, "reparameterize: map not strictly increasing near t = " +
                                               detail::fmt17(curve.t[i]));
    }
  }
  return out;
}

double ds_dtau_from_eps_dot(double eps_dot) { return 1.0 / (1.0 - eps_dot); }

double dtau_ds_geometric(double eps) {
  if (!(eps < 1.0)) throw Error(ErrorCode::domain_breach, "dtau_ds_geometric: eps >= 1");
  return std::sqrt(1.0 - eps);
}

void write_curve_csv(const SampledCurve& curve, std::ostream& out) {
  curve.validate();
  out << "t,x0,x1,x2,x3\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << detail::fmt17(curve.t[i]);
    for (double v : curve.x[i].c) out << ',' << detail::fmt17(v);
    out << '\n';
  }
}

SampledCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim_cr(line) != "t,x0,x1,x2,x3") {
    throw Error(ErrorCode::io, "curve CSV: missing header 't,x0,x1,x2,x3'");
  }
  SampledCurve c;
  while (std::getline(in, line)) {
    const auto row = detail::trim_cr(line);
    if (row.empty()) continue;
    const auto cols = detail::split(row, ',');
    if (cols.size() != 5) throw Error(ErrorCode::io, "curve CSV: expected 5 columns");
    c.t.push_back(detail::parse_double(cols[0]));
    c.x.push_back({detail::parse_double(cols[1]), detail::parse_double(cols[2]),
                   detail::parse_double(cols[3]), detail::parse_double(cols[4])});
  }
  c.validate();
  return c;
}

}  // namespace radreact
