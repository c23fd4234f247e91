#include "radreact/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "radreact/errors.hpp"

namespace radreact {

namespace {

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }
Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 scale3(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

Vec3 unit_polarization(const PlaneWave& w) {
  const double kn = norm3(w.wave_vector);
  const Vec3 khat = scale3(1.0 / kn, w.wave_vector);
  const double along = dot3(w.polarization, khat);
  Vec3 p{w.polarization[0] - along * khat[0], w.polarization[1] - along * khat[1],
         w.polarization[2] - along * khat[2]};
  return scale3(1.0 / norm3(p), p);
}

struct Evaluate {
  const FourVector& x;
  double tau;

  EMFieldTensor operator()(const VacuumField&) const { return {}; }

  EMFieldTensor operator()(const ConstantField& c) const { return {c.E, c.B}; }

  EMFieldTensor operator()(const GaussianPulse& p) const {
    const double s = (tau - p.center) / p.width;
    const double amp =
        p.kappa / (p.width * std::sqrt(2.0 * std::numbers::pi)) * std::exp(-0.5 * s * s);
    const double dn = norm3(p.direction);
    return {scale3(amp / dn, p.direction), {0.0, 0.0, 0.0}};
  }

  EMFieldTensor operator()(const PlaneWave& w) const {
    const double kn = norm3(w.wave_vector);
    const Vec3 pol = unit_polarization(w);
    const double phase = w.wave_vector[0] * x[1] + w.wave_vector[1] * x[2] +
                         w.wave_vector[2] * x[3] - kn * x[0] + w.phase;
    const Vec3 E = scale3(w.amplitude * std::cos(phase), pol);
    const Vec3 B = cross3(scale3(1.0 / kn, w.wave_vector), E);
    return {E, B};
  }
};

}  // namespace

double EMFieldTensor::lower(std::size_t mu, std::size_t nu) const {
  if (mu == nu) return 0.0;
  if (nu == 0) return E[mu - 1];
  if (mu == 0) return -E[nu - 1];
  // F_{ij} = eps_{ijk} B_k
  const std::size_t i = mu - 1, j = nu - 1;
  const std::size_t k = 3 - i - j;
  const double sign = ((j + 3 - i) % 3 == 1) ? 1.0 : -1.0;
  return sign * B[k];
}

Matrix4 EMFieldTensor::mixed() const {
  Matrix4 out;
  for (std::size_t mu = 0; mu < 4; ++mu) {
    for (std::size_t nu = 0; nu < 4; ++nu) {
      out(mu, nu) = kMetricDiag[mu] * lower(mu, nu);
    }
  }
  return out;
}

EMFieldTensor EMFieldTensor::from_lower(const std::array<std::array<double, 4>, 4>& f) {
  EMFieldTensor t;
  t.E = {f[1][0], f[2][0], f[3][0]};
  t.B = {-f[3][2], f[3][1], -f[2][1]};
  return t;
}

bool EMFieldTensor::is_zero() const noexcept {
  return std::all_of(E.begin(), E.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(B.begin(), B.end(), [](double v) { return v == 0.0; });
}

EMFieldTensor& EMFieldTensor::operator+=(const EMFieldTensor& o) {
  for (std::size_t i = 0; i < 3; ++i) {
    E[i] += o.E[i];
    B[i] += o.B[i];
  }
  return *this;
}

EMFieldTensor operator*(double s, EMFieldTensor a) {
  for (std::size_t i = 0; i < 3; ++i) {
    a.E[i] *= s;
    a.B[i] *= s;
  }
  return a;
}

FourVector field_apply(const EMFieldTensor& F, const FourVector& u) {
  const Vec3 v{u[1], u[2], u[3]};
  const Vec3 vxb = cross3(v, F.B);
  return {dot3(F.E, v), F.E[0] * u[0] + vxb[0], F.E[1] * u[0] + vxb[1],
          F.E[2] * u[0] + vxb[2]};
}

FourCovector field_apply_lower(const EMFieldTensor& F, const FourVector& u) {
  return lower(field_apply(F, u));
}

FourVector lorentz_force(const EMFieldTensor& F, double e, const FourVector& u) {
  return e * field_apply(F, u);
}

FieldSpec FieldSpec::constant(Vec3 E, Vec3 B) {
  FieldSpec s;
  s.add(ConstantField{E, B});
  return s;
}

FieldSpec FieldSpec::pulse(double kappa, double width, double center) {
  FieldSpec s;
  s.add(GaussianPulse{kappa, width, center, {1.0, 0.0, 0.0}});
  return s;
}

FieldSpec& FieldSpec::add(FieldShape shape, ParamWindow window) {
  components.push_back({std::move(shape), window});
  return *this;
}

void FieldSpec::validate() const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const std::string where = "field component " + std::to_string(i) + ": ";
    if (!(c.window.on < c.window.off)) {
      throw Error(ErrorCode::config, where + "window must satisfy on < off");
    }
    if (const auto* p = std::get_if<GaussianPulse>(&c.shape)) {
      if (!(p->width > 0.0) || !std::isfinite(p->width)) {
        throw Error(ErrorCode::config, where + "pulse width must be positive");
      }
      if (!std::isfinite(p->kappa) || !std::isfinite(p->center)) {
        throw Error(ErrorCode::config, where + "pulse parameters must be finite");
      }
      if (!(norm3(p->direction) > 0.0)) {
        throw Error(ErrorCode::config, where + "pulse direction must be nonzero");
      }
    } else if (const auto* w = std::get_if<PlaneWave>(&c.shape)) {
      const double kn = norm3(w->wave_vector);
      if (!(kn > 0.0) || !std::isfinite(kn)) {
        throw Error(ErrorCode::config, where + "wave vector must be nonzero");
      }
      const double pn = norm3(w->polarization);
      const double along = std::abs(dot3(w->polarization, w->wave_vector)) / kn;
      if (!(pn > 0.0) || pn - along <= 1e-12 * pn) {
        throw Error(ErrorCode::config,
                    where + "polarization must have a component transverse to the wave vector");
      }
      if (!std::isfinite(w->amplitude) || !std::isfinite(w->phase)) {
        throw Error(ErrorCode::config, where + "plane wave parameters must be finite");
      }
    } else if (const auto* k = std::get_if<ConstantField>(&c.shape)) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (!std::isfinite(k->E[j]) || !std::isfinite(k->B[j])) {
          throw Error(ErrorCode::config, where + "constant field must be finite");
        }
      }
    }
  }
}

double FieldSpec::time_scale() const {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& c : components) {
    if (const auto* p = std::get_if<GaussianPulse>(&c.shape)) t = std::min(t, p->width);
    if (const auto* w = std::get_if<PlaneWave>(&c.shape)) {
      t = std::min(t, 1.0 / norm3(w->wave_vector));
    }
  }
  return t;
}

std::vector<GaussianPulse> FieldSpec::pulses() const {
  std::vector<GaussianPulse> out;
  for (const auto& c : components) {
    if (const auto* p = std::get_if<GaussianPulse>(&c.shape)) out.push_back(*p);
  }
  return out;
}

EMFieldTensor faraday_at(const FieldSpec& spec, const FourVector& x, double tau) {
  EMFieldTensor total;
  const Evaluate eval{x, tau};
  for (const auto& c : spec.components) {
    if (!c.window.contains(tau)) continue;
    total += std::visit(eval, c.shape);
  }
  return total;
}

EMFieldTensor faraday_rate(const FieldSpec& spec, const FourVector& x, const FourVector& u,
                           double tau, double h) {
  const EMFieldTensor fp = faraday_at(spec, x + h * u, tau + h);
  const EMFieldTensor fm = faraday_at(spec, x - h * u, tau - h);
  return (0.5 / h) * (fp + (-1.0) * fm);
}

double field_fd_step(const FieldSpec& spec) {
  return 1e-3 * std::min(1.0, spec.time_scale());
}

JetCorrectionCoefficients JetCorrectionCoefficients::second_order(double e, double a2,
                                                                  double eps_dot,
                                                                  double eps_dot_min) {
  if (!(std::abs(eps_dot) >= eps_dot_min)) {
    throw Error(ErrorCode::degenerate_regime,
                "beta_2 needs |eps_dot| >= " + std::to_string(eps_dot_min));
  }
  JetCorrectionCoefficients c;
  c.beta[1] = 4.0 / 3.0 * e * e * a2 / eps_dot;
  return c;
}

EMFieldTensor upsilon_worldline(const JetCorrectionCoefficients& coeffs,
                                const WorldlineState& state, const FourVector& jerk,
                                double conformal) {
  const std::array<FourVector, 3> basis{state.u, state.a, jerk};
  FourVector b, c, d;
  for (std::size_t k = 0; k < 3; ++k) {
    b += coeffs.beta[k] * basis[k];
    c += coeffs.gamma[k] * basis[k];
    d += coeffs.delta[k] * basis[k];
  }
  const auto low = [conformal](const FourVector& v) {
    const FourCovector w = lower(v);
    return FourVector{conformal * w[0], conformal * w[1], conformal * w[2], conformal * w[3]};
  };
  const FourVector bl = low(b), cl = low(c), dl = low(d);
  const FourVector ul = low(state.u), al = low(state.a), jl = low(jerk);

  std::array<std::array<double, 4>, 4> f{};
  for (std::size_t mu = 0; mu < 4; ++mu) {
    for (std::size_t nu = 0; nu < 4; ++nu) {
      f[mu][nu] = bl[mu] * ul[nu] - bl[nu] * ul[mu] + cl[mu] * al[nu] - cl[nu] * al[mu] +
                  dl[mu] * jl[nu] - dl[nu] * jl[mu];
    }
  }
  return EMFieldTensor::from_lower(f);
}

FourVector upsilon_contract(const EMFieldTensor& T, const FourVector& u, double conformal) {
  return (1.0 / conformal) * field_apply(T, u);
}

}  // namespace radreact
