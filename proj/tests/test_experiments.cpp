#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "radreact/errors.hpp"
#include "radreact/experiments.hpp"

using namespace radreact;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "model": {"name": "implicit_maxaccel", "e": 1, "m": 1, "a_max": 10},
    "solver": {"method": "rk4_fixed", "dt": 0.01},
    "field": [{"kind": "constant", "E": [0.01, 0, 0], "B": [0, 0, 0.02]}],
    "init": {"u": [0.1, 0, 0]},
    "tau_span": [0, 2],
    "seed": 3
  })");
}

std::string config_error_of(const json& j) {
  try {
    parse_run_config(j.dump());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("config parses and round-trips the field") {
    const auto c = parse_run_config(base_config().dump());
    CHECK(c.model.model == ForceModel::implicit_maxaccel);
    CHECK(c.model.a_max == 10.0);
    CHECK(c.seed == 3);
    CHECK(c.tau_end == 2.0);
    const auto back = field_from_json(field_to_json(c.field));
    CHECK(field_to_json(back) == field_to_json(c.field));
  }

  TEST_CASE("config errors name the key") {
    auto j = base_config();
    j["model"]["m"] = -1;
    CHECK(starts_with(config_error_of(j), "model.m"));

    j = base_config();
    j["model"].erase("a_max");
    CHECK(starts_with(config_error_of(j), "model.a_max"));

    j = base_config();
    j["solver"]["dt"] = 0;
    CHECK(starts_with(config_error_of(j), "solver.dt"));

    j = base_config();
    j["solver"]["stepsize"] = 0.1;
    CHECK(config_error_of(j).find("stepsize") != std::string::npos);

    j = base_config();
    j["tau_span"] = {2, 1};
    CHECK(starts_with(config_error_of(j), "tau_span"));

    j = base_config();
    j["init"]["a"] = {0, 1, 0, 0};
    CHECK(starts_with(config_error_of(j), "init.a"));

    j = base_config();
    j.erase("init");
    CHECK(config_error_of(j).find("init") != std::string::npos);

    CHECK(starts_with(config_error_of(json("not an object")), "config"));
    CHECK_THROWS_AS(parse_run_config("{oops"), Error);
  }

  TEST_CASE("eta models need no a_max") {
    auto j = base_config();
    j["model"] = {{"name", "landau_lifshitz"}, {"e", 1}, {"m", 1}};
    CHECK_NOTHROW(parse_run_config(j.dump()));
  }

  TEST_CASE("csv round trip keeps every bit") {
    auto c = parse_run_config(base_config().dump());
    auto out = run_simulation(c);
    REQUIRE(out.trajectory.status == RunStatus::ok);
    // NaN must survive.
    out.trajectory.rows[1].epsilon = std::nan("");
    std::stringstream ss;
    write_trajectory_csv(out.trajectory, ss);
    const auto back = read_trajectory_csv(ss);
    CHECK(same_record(out.trajectory, back));
    CHECK(back.metadata.at("code_version") == kCodeVersion);
    CHECK(back.metadata.at("seed") == "3");
  }

  TEST_CASE("csv reader rejects garbage") {
    std::stringstream ss("# model=lorentz\ntau,x0\n1,abc\n");
    CHECK_THROWS_AS(read_trajectory_csv(ss), Error);
  }

  TEST_CASE("runs are byte-identical") {
    const auto c = parse_run_config(base_config().dump());
    std::stringstream a, b;
    write_trajectory_csv(run_simulation(c).trajectory, a);
    write_trajectory_csv(run_simulation(c).trajectory, b);
    CHECK(a.str() == b.str());
    CHECK(run_simulation(c).report.to_json() == run_simulation(c).report.to_json());
  }

  TEST_CASE("exit codes") {
    CHECK(exit_code(RunStatus::ok) == 0);
    CHECK(exit_code(RunStatus::no_convergence) == 3);
    CHECK(exit_code(RunStatus::maxaccel_breach) == 4);
    CHECK(exit_code(RunStatus::runaway_abort) == 5);
    CHECK(exit_code(RunStatus::regime_violation) == 7);
  }

  TEST_CASE("compare: reaction gap bounded by tau0 a^2 span") {
    auto j = base_config();
    j["model"]["name"] = "lorentz";
    j["solver"]["dt"] = 1e-3;
    const auto c = parse_run_config(j.dump());
    const auto res = run_compare(c, {ForceModel::lorentz, ForceModel::implicit_maxaccel});
    REQUIRE(res.all_ok());
    REQUIRE(res.gaps.size() == 1);
    double a2 = 0.0;
    for (const auto& r : res.runs[0].trajectory->rows) a2 = std::max(a2, std::abs(r.a_sq));
    const double tau0 = 2.0 / 3.0;
    const double bound = tau0 * a2 * (c.tau_end - c.tau_start);
    CHECK(res.gaps[0].gap.velocity > 0.0);
    CHECK(res.gaps[0].gap.velocity <= 1.5 * bound);
    CHECK(res.epsilon0 > 0.0);
    const auto g = json::parse(res.gap_json());
    CHECK(g["gaps"].size() == 1);
  }

  TEST_CASE("compare: one model, no gaps; failed start is recorded") {
    auto c = parse_run_config(base_config().dump());
    auto res = run_compare(c, {ForceModel::lorentz});
    CHECK(res.gaps.empty());
    CHECK(res.all_ok());
    c.model.a_max = 0.0;
    res = run_compare(c, {ForceModel::lorentz, ForceModel::implicit_maxaccel});
    CHECK_FALSE(res.all_ok());
    CHECK_FALSE(res.runs[1].trajectory.has_value());
    CHECK_FALSE(res.runs[1].error.empty());
  }

  TEST_CASE("canonical scenarios") {
    CHECK(canonical_names().size() == 5);
    CHECK(run_canonical("hyperbolic").pass());
    CHECK(run_canonical("reparam", 11).pass());
    CHECK_THROWS_AS(run_canonical("nope"), Error);
  }
}
