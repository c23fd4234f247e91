#include <cmath>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "radreact/diagnostics.hpp"
#include "radreact/errors.hpp"

using namespace radreact;

namespace {

ForceModelSpec make_spec(ForceModel model, double a_max, double dt) {
  ForceModelSpec s;
  s.model = model;
  s.e = 1;
  s.m = 1;
  s.a_max = a_max;
  s.solver.dt = dt;
  return s;
}

TrajectoryRecord line_record(const std::vector<double>& tau, double vx) {
  TrajectoryRecord t;
  for (double s : tau) {
    TrajectoryRow r;
    r.tau = s;
    r.x = {s, vx * s, 0, 0};
    r.u = {1, vx, 0, 0};
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("line fits") {
    const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.points == 4);

    const auto p = fit_loglog({1, 2, 4, 8}, {3, 24, 192, 1536});
    CHECK(p.slope == doctest::Approx(3.0));

    std::vector<double> t, y;
    for (int i = 0; i < 30; ++i) {
      t.push_back(0.1 * i);
      y.push_back(-2e-3 * std::exp(0.7 * 0.1 * i));
    }
    CHECK(fit_exponential_rate(t, y).slope == doctest::Approx(0.7));

    CHECK_THROWS_AS(fit_line({1}, {1}), Error);
    CHECK_THROWS_AS(fit_line({1, 1}, {1, 2}), Error);
    CHECK_THROWS_AS(fit_loglog({1, 2}, {0, 1}), Error);
  }

  TEST_CASE("geodesic audit is clean") {
    const auto s = make_spec(ForceModel::implicit_maxaccel, 1, 1e-2);
    const auto f = FieldSpec::vacuum();
    const auto r = integrate(s, f, initial_state(s, f, {}, {0.3, 0, 0}, 0), 0, 5);
    const auto rep = audit(r, s, f);
    REQUIRE(rep.checks.size() == 7);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
      CHECK(rep.checks[i].name == audit_check_names()[i]);
      seen.insert(rep.checks[i].name);
      CHECK(rep.checks[i].applicable);
      CHECK(rep.checks[i].pass);
      CHECK(rep.checks[i].max_residual == 0.0);
    }
    CHECK(seen.size() == 7);
    CHECK_FALSE(rep.runaway_detected);
    CHECK_FALSE(rep.preacceleration_detected);
    CHECK(rep.all_pass());
  }

  TEST_CASE("field-free ALD audit reports run-away") {
    auto s = make_spec(ForceModel::ald, 0, 1e-3);
    const auto f = FieldSpec::vacuum();
    const auto r =
        integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, 0, FourVector{0, 1e-6, 0, 0}), 0, 30);
    const auto rep = audit(r, s, f);
    CHECK(rep.runaway_detected);
    REQUIRE(rep.fits.count("runaway_rate") == 1);
    const double tau0 = 2.0 / 3.0;
    CHECK(rep.fits.at("runaway_rate").slope == doctest::Approx(1.0 / tau0).epsilon(0.02));
    CHECK_FALSE(rep.check("mass_ledger").applicable);
    CHECK(rep.check("normalization_r1").pass);

    // Same run cut before the threshold: no flag.
    auto cut = r;
    cut.rows.resize(r.rows.size() / 2);
    CHECK_FALSE(audit(cut, s, f).runaway_detected);
  }

  TEST_CASE("classification of pre-pulse motion") {
    auto s = make_spec(ForceModel::lorentz, 0, 1e-2);
    s.solver.tol = 1e-12;
    const auto f = FieldSpec::pulse(0.1, 0.1, 2.0);
    auto t = line_record({0, 0.5, 1.0, 1.6, 2.0}, 0.0);
    CHECK_FALSE(audit(t, s, f).preacceleration_detected);
    t.rows[2].u[1] = 2e-11;
    const auto rep = audit(t, s, f);
    CHECK(rep.preacceleration_detected);
    CHECK(rep.preacceleration_max == 2e-11);
    // Rows inside the 5w window do not count.
    t.rows[2].u[1] = 0.0;
    t.rows[3].u[1] = 1.0;
    CHECK_FALSE(audit(t, s, f).preacceleration_detected);
  }

  TEST_CASE("report serialization") {
    const auto s = make_spec(ForceModel::implicit_maxaccel, 1e-2, 1e-2);
    const auto f = FieldSpec::constant({1e-4, 0, 0});
    const auto r = integrate(s, f, initial_state(s, f, {}, {0, 0, 0}, 0), 0, 2);
    const auto rep = audit(r, s, f);
    const auto j = nlohmann::json::parse(rep.to_json());
    REQUIRE(j["checks"].size() == 7);
    CHECK(j["checks"][3]["name"] == "fl2_identity");
    CHECK(j["all_pass"] == rep.all_pass());
    CHECK(j["epsilon0"].get<double>() == rep.epsilon0);
    const auto table = rep.summary_table();
    for (const auto& name : audit_check_names()) CHECK(table.find(name) != std::string::npos);
    CHECK(rep.to_json() == audit(r, s, f).to_json());
  }

  TEST_CASE("pulse probe guards and the empty pulse") {
    auto s = make_spec(ForceModel::implicit_maxaccel, 10, 1e-2);
    const auto zero = preacceleration_probe(s, {0.1, 0.01}, 0.0);
    REQUIRE(zero.rows.size() == 2);
    for (const auto& r : zero.rows) {
      CHECK(r.pre_max == 0.0);
      CHECK(r.post == 0.0);
      CHECK(r.status == RunStatus::ok);
    }
    CHECK_FALSE(zero.width_fit.has_value());
    // kappa / a = 1/3 is above the default 0.3 bound.
    CHECK_THROWS_AS(preacceleration_probe(s, {0.1}, 0.5), Error);
    CHECK_THROWS_AS(preacceleration_probe(s, {0.0}, 0.1), Error);
    const auto small = preacceleration_probe(s, {0.1}, 0.1);
    CHECK(small.rows[0].target == doctest::Approx(0.1 / 1.5));
  }

  TEST_CASE("trajectory gaps") {
    const auto a = line_record({0, 1, 2, 3}, 0.5);
    CHECK(trajectory_gap(a, a).position == 0.0);
    const auto b = line_record({0, 0.7, 1.9, 3}, 0.25);
    const auto g = trajectory_gap(a, b);
    // Linear in tau, so interpolation is exact: gap 0.25 tau at tau = 3.
    CHECK(g.position == doctest::Approx(0.75));
    CHECK(g.velocity == doctest::Approx(0.25));
    const auto shorter = line_record({0, 1}, 0.25);
    CHECK(trajectory_gap(a, shorter).position == doctest::Approx(0.25));
  }

  TEST_CASE("field scaling") {
    FieldSpec f = FieldSpec::constant({1, 2, 3}, {0, 0, 1});
    f.add(GaussianPulse{0.5, 0.1, 0, {1, 0, 0}}, {});
    f.add(PlaneWave{2, {0, 0, 1}, {1, 0, 0}, 0}, {});
    const auto g = scale_field(f, 0.5);
    const auto F1 = faraday_at(f, {0.1, 0.2, 0.3, 0.4}, 0.05);
    const auto F2 = faraday_at(g, {0.1, 0.2, 0.3, 0.4}, 0.05);
    for (int i = 0; i < 3; ++i) {
      CHECK(F2.E[i] == doctest::Approx(0.5 * F1.E[i]));
      CHECK(F2.B[i] == doctest::Approx(0.5 * F1.B[i]));
    }
  }

  TEST_CASE("eps0 scaling study") {
    Scenario base;
    base.model = make_spec(ForceModel::implicit_maxaccel, 10, 1e-2);
    base.tau_end = 10;

    base.field = FieldSpec::vacuum();
    const auto flat = epsilon0_scaling_study({1, 0.5}, base);
    for (const auto& r : flat.rows) {
      CHECK(r.gap.position == 0.0);
      CHECK(r.gap.velocity == 0.0);
    }
    CHECK_FALSE(flat.fit.has_value());

    base.field = FieldSpec::constant({1, 0, 0});
    const auto st = epsilon0_scaling_study({1, 0.5, 0.25, 0.125}, base);
    REQUIRE(st.fit.has_value());
    CHECK(st.fit->points == 4);
    CHECK(st.fit->slope >= 1.0);
    CHECK(st.fit->r2 >= 0.99);

    const auto wild = epsilon0_scaling_study({1, 1000}, base);
    CHECK_FALSE(wild.rows[0].excluded);
    CHECK(wild.rows[1].excluded);
    CHECK_FALSE(wild.rows[1].reason.empty());
  }
}
