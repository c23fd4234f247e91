#include <cmath>

#include "doctest.h"
#include "radreact/errors.hpp"
#include "radreact/minkowski.hpp"
#include "support.hpp"

using namespace radreact;

TEST_SUITE("minkowski") {
  TEST_CASE("eta_dot examples") {
    CHECK(eta_dot({1, 0, 0, 0}, {1, 0, 0, 0}) == -1.0);
    CHECK(eta_dot({1, 1, 0, 0}, {1, 1, 0, 0}) == 0.0);
    CHECK(eta_dot({2, 1, 0, 0}, {0, 3, 1, 0}) == 3.0);
  }

  TEST_CASE("signature on basis vectors") {
    CHECK(eta_norm2({1, 0, 0, 0}) == -1.0);
    CHECK(eta_norm2({0, 1, 0, 0}) == 1.0);
    CHECK(eta_norm2({0, 0, 1, 0}) == 1.0);
    CHECK(eta_norm2({0, 0, 0, 1}) == 1.0);
  }

  TEST_CASE("lower and raise") {
    const FourCovector w = lower({1, 2, 3, 4});
    CHECK(w == FourCovector{{-1, 2, 3, 4}});
    CHECK(lower({0, 0, 0, 0}) == FourCovector{{0, 0, 0, 0}});
    CHECK(raise(lower({5, -1, 0, 2})) == FourVector{5, -1, 0, 2});
    CHECK(contract(lower({2, 1, 0, 0}), {0, 3, 1, 0}) == 3.0);
  }

  TEST_CASE("projector examples") {
    CHECK(projector_apply({1, 0, 0, 0}, {3, 1, 0, 0}) == FourVector{0, 1, 0, 0});
    CHECK(projector_apply({1, 0, 0, 0}, {0, 0, 2, 0}) == FourVector{0, 0, 2, 0});

    const FourVector u{std::sqrt(2.0), 1, 0, 0};
    const FourVector v{1, 0, 0, 0};
    const FourVector p = projector_apply(u, v);
    // eta(u, v) = -sqrt2, so P(v) = v - sqrt2 u = (1 - 2, -sqrt2, 0, 0).
    CHECK(p[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::abs(eta_dot(u, p)) <= 1e-10);
  }

  TEST_CASE("projector rejects unnormalized velocity") {
    CHECK_THROWS_AS(projector_apply({2, 0, 0, 0}, {1, 0, 0, 0}), Error);
    try {
      projector_apply({2, 0, 0, 0}, {1, 0, 0, 0});
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::normalization);
    }
  }

  TEST_CASE("bilinearity, symmetry and projector properties") {
    rrtest::Gen gen(11);
    for (int k = 0; k < 500; ++k) {
      const FourVector a = gen.vec(3.0), b = gen.vec(3.0), c = gen.vec(3.0);
      const double alpha = gen.uniform(-5.0, 5.0);
      const double lhs = eta_dot(alpha * a + b, c);
      const double rhs = alpha * eta_dot(a, c) + eta_dot(b, c);
      const double scale = std::abs(alpha) * 27.0 + 27.0;
      CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
      CHECK(eta_dot(a, b) == eta_dot(b, a));

      const FourVector u = gen.unit_timelike();
      CHECK(max_abs(projector_apply(u, u)) <= 1e-10);
      const FourVector p = projector_apply(u, a);
      CHECK(std::abs(eta_dot(u, p)) <= 1e-10 * (1.0 + max_abs(a)) * 10.0);
      CHECK(rrtest::max_diff(projector_apply(u, p), p) <= 1e-10 * (1.0 + max_abs(a)) * 10.0);
    }
  }

  TEST_CASE("matrix and rank-3 helpers") {
    Matrix4 m = Matrix4::identity(2.0);
    m(0, 1) = 3.0;
    const FourVector v = m.apply({1, 1, 1, 1});
    CHECK(v == FourVector{5, 2, 2, 2});
    CHECK((m * Matrix4::identity()).max_abs_diff(m) == 0.0);

    Tensor3 t;
    t(1, 0, 2) = 2.0;
    CHECK(t.contract({3, 0, 0, 0}, {0, 0, 5, 0}) == FourVector{0, 30, 0, 0});
  }

  TEST_CASE("non-finite input is rejected") {
    CHECK_THROWS_AS(require_finite({NAN, 0, 0, 0}, "x"), Error);
    CHECK_NOTHROW(require_finite({1, 0, 0, 0}, "x"));
  }
}
