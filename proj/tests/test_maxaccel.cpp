#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "radreact/errors.hpp"
#include "radreact/maxaccel.hpp"
#include "support.hpp"

using namespace radreact;

TEST_SUITE("maxaccel") {
  TEST_CASE("epsilon examples") {
    const MaxAccelParams p{10.0};
    CHECK(epsilon(FourVector{}, p) == 0.0);
    CHECK(epsilon(FourVector{0, 1, 0, 0}, p) == doctest::Approx(0.01).epsilon(1e-15));
    const MaxAccelParams p100{100.0};
    for (double tau : {-2.0, 0.0, 0.7, 3.0}) {
      const FourVector a{std::sinh(tau), std::cosh(tau), 0, 0};
      CHECK(epsilon(a, p100) == doctest::Approx(1e-4).epsilon(1e-10));
    }
  }

  TEST_CASE("epsilon scales quadratically") {
    rrtest::Gen gen(3);
    const MaxAccelParams p{7.0};
    for (int k = 0; k < 100; ++k) {
      const FourVector a = gen.vec();
      CHECK(epsilon(2.0 * a, p) == 4.0 * epsilon(a, p));
      CHECK(epsilon(3.0 * a, p) == doctest::Approx(9.0 * epsilon(a, p)).epsilon(1e-14));
    }
  }

  TEST_CASE("g_dot") {
    WorldlineState s;
    const MaxAccelParams p{1.0};
    rrtest::Gen gen(4);
    for (int k = 0; k < 20; ++k) {
      const FourVector a = gen.vec(), b = gen.vec();
      CHECK(g_dot(s, p, a, b) == eta_dot(a, b));
    }
    s.a = {0, std::sqrt(0.5), 0, 0};
    CHECK(g_dot(s, p, {1, 0, 0, 0}, {1, 0, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-15));

    s.a = {0, 0.1, 0, 0};
    for (int k = 0; k < 20; ++k) {
      const FourVector a = gen.vec(), b = gen.vec();
      CHECK(std::abs(g_dot(s, p, a, b) - 0.99 * eta_dot(a, b)) <= 1e-14);
    }

    s.a = {0, 1.0, 0, 0};
    CHECK_THROWS_AS(g_dot(s, p, {1, 0, 0, 0}, {1, 0, 0, 0}), Error);
  }

  TEST_CASE("kinematic residuals") {
    WorldlineState geo;
    geo.u = {1, 0, 0, 0};
    const auto r = kinematic_residuals(geo, {}, 0.0, 0.0, MaxAccelParams{1.0});
    CHECK(r.r1 == 0.0);
    CHECK(r.r2 == 0.0);
    CHECK(r.r3 == 0.0);

    WorldlineState hyp;
    const double t = 0.8;
    hyp.u = {std::cosh(t), std::sinh(t), 0, 0};
    hyp.a = {std::sinh(t), std::cosh(t), 0, 0};
    const auto rh = kinematic_residuals(hyp, hyp.u, 0.0, 0.0, MaxAccelParams{1e12});
    CHECK(std::abs(rh.r2) <= 1e-10);
    CHECK(std::abs(rh.r1) <= 1e-10);
  }

  TEST_CASE("ledger on a geodesic") {
    const std::vector<double> tau{0, 1, 2, 3}, zero(4, 0.0);
    const auto led = mass_ledger(tau, zero, zero, zero, 1.0, 2.5, 10.0);
    for (const auto& e : led) {
      CHECK(e.m_b == 2.5);
      CHECK(e.degenerate);
    }
  }

  TEST_CASE("ledger on synthetic data") {
    const double c0 = 0.25;
    std::vector<double> tau, eps, eps_dot, a2;
    for (int i = 0; i <= 10; ++i) {
      tau.push_back(0.1 * i);
      a2.push_back(0.1 * i);
      eps.push_back(0.1 * i / 4.0);
      eps_dot.push_back(c0);
    }
    const auto led = mass_ledger(tau, eps, eps_dot, a2, 1.0, 1.0, 2.0);
    for (std::size_t i = 0; i < led.size(); ++i) {
      CHECK(led[i].m_b == doctest::Approx(1.0 - 2.0 / 3.0 * tau[i] / c0).epsilon(1e-14));
      CHECK(std::abs(reconstructed_mass(led[i], 1.0, a2[i]) - 1.0) <= 1e-12);
      CHECK_FALSE(led[i].degenerate);
    }
  }

  TEST_CASE("ledger derivative constraint vanishes on a consistent history") {
    const double A = 3.0, e = 0.7, m = 2.0;
    std::vector<double> tau, eps, eps_dot, a2;
    for (int i = 0; i <= 20; ++i) {
      const double t = 1.0 + 0.05 * i;
      tau.push_back(t);
      eps.push_back(t * t);
      eps_dot.push_back(2.0 * t);
      a2.push_back(A * A * t * t);
    }
    const auto led = mass_ledger(tau, eps, eps_dot, a2, e, m, A);
    for (const auto& r : led) CHECK(std::abs(r.constraint_residual) <= 1e-10);
  }

  TEST_CASE("ledger flags the zero crossing of eps_dot") {
    std::vector<double> tau, eps, eps_dot, a2;
    for (int i = -3; i <= 3; ++i) {
      tau.push_back(i);
      eps_dot.push_back(0.1 * i);
      eps.push_back(0.01);
      a2.push_back(1.0);
    }
    const auto led = mass_ledger(tau, eps, eps_dot, a2, 1.0, 1.0, 10.0);
    CHECK(led[3].degenerate);
    CHECK(std::isnan(led[3].m_b));
    CHECK(std::isfinite(led[2].m_b));
    CHECK(std::isfinite(led[4].m_b));
    CHECK(std::isnan(led[2].constraint_residual));

    std::ostringstream os;
    write_ledger_csv(led, os);
    CHECK(os.str().rfind("tau,m_b,epsilon,epsilon_dot,degenerate_flag\n", 0) == 0);
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(MaxAccelParams{0.0}.validate(), Error);
    CHECK_THROWS_AS(MaxAccelParams{-1.0}.validate(), Error);
    CHECK_THROWS_AS(MaxAccelParams{std::numeric_limits<double>::infinity()}.validate(), Error);
    CHECK_NOTHROW(MaxAccelParams{1.0}.validate());
  }
}
