// Command-line front end. Talks to the library only through radreact.h.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "radreact/radreact.h"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::vector<std::string> models;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> tol;
};

int report_error(int code, const char* what) {
  std::fprintf(stderr, "error (%s): %s%s%s\n", rr_status_name(code), what,
               *rr_last_error() ? ": " : "", rr_last_error());
  return code;
}

// Loads the config and applies flag overrides; nothing touches the disk.
int load(const Overrides& o, bool single_model, rr_config** cfg) {
  int rc = rr_config_load(o.config.c_str(), cfg);
  if (rc != RR_OK) return report_error(rc, "cannot load config");
  if (single_model && !o.models.empty()) rc = rr_config_set_model(*cfg, o.models.front().c_str());
  if (rc == RR_OK && o.dt) rc = rr_config_set_dt(*cfg, *o.dt);
  if (rc == RR_OK && o.tol) rc = rr_config_set_tol(*cfg, *o.tol);
  if (rc == RR_OK && o.seed) rc = rr_config_set_seed(*cfg, *o.seed);
  if (rc == RR_OK && !o.out.empty()) rc = rr_config_set_output_dir(*cfg, o.out.c_str());
  if (rc != RR_OK) {
    rr_config_free(*cfg);
    *cfg = nullptr;
    return report_error(rc, "invalid override");
  }
  return RR_OK;
}

bool make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) std::fprintf(stderr, "error (io_error): cannot create %s: %s\n", dir.c_str(),
                       ec.message().c_str());
  return !ec;
}

int cmd_simulate(const Overrides& o) {
  rr_config* cfg = nullptr;
  if (int rc = load(o, true, &cfg); rc != RR_OK) return rc;
  rr_trajectory* traj = nullptr;
  rr_report* rep = nullptr;
  int rc = rr_simulate(cfg, &traj, &rep);
  if (!traj) {
    rr_config_free(cfg);
    return report_error(rc, "simulation did not start");
  }
  const fs::path dir = rr_config_output(cfg, "dir");
  int io = make_dir(dir.string()) ? RR_OK : RR_ERR_IO;
  if (io == RR_OK) {
    io = rr_trajectory_write_csv(traj, (dir / rr_config_output(cfg, "trajectory")).string().c_str());
  }
  if (io == RR_OK) {
    io = rr_report_write_json(rep, (dir / rr_config_output(cfg, "audit")).string().c_str());
  }
  std::fputs(rr_report_table(rep), stdout);
  if (rc != RR_OK) report_error(rc, "run stopped early; partial trajectory written");
  if (io != RR_OK) rc = report_error(io, "cannot write outputs");
  rr_trajectory_free(traj);
  rr_report_free(rep);
  rr_config_free(cfg);
  return rc;
}

int cmd_compare(const Overrides& o) {
  rr_config* cfg = nullptr;
  if (int rc = load(o, false, &cfg); rc != RR_OK) return rc;
  std::vector<const char*> names;
  for (const auto& m : o.models) names.push_back(m.c_str());
  const int rc = rr_compare(cfg, names.data(), names.size(), rr_config_output(cfg, "dir"));
  if (rc != RR_OK) report_error(rc, "comparison incomplete");
  else std::printf("wrote %zu trajectories and %s to %s\n", names.size(),
                   rr_config_output(cfg, "gaps"), rr_config_output(cfg, "dir"));
  rr_config_free(cfg);
  return rc;
}

int cmd_canonical(const std::string& name, std::uint64_t seed) {
  char* text = nullptr;
  const int rc = rr_canonical(name.c_str(), seed, &text);
  if (text) {
    std::fputs(text, stdout);
    rr_string_free(text);
  }
  if (rc != RR_OK && rc != RR_ERR_ACCEPTANCE) return report_error(rc, "scenario failed to run");
  return rc;
}

int cmd_audit(const Overrides& o, const std::string& trajectory) {
  rr_config* cfg = nullptr;
  if (int rc = load(o, true, &cfg); rc != RR_OK) return rc;
  rr_trajectory* traj = nullptr;
  int rc = rr_trajectory_read_csv(trajectory.c_str(), &traj);
  if (rc != RR_OK) {
    rr_config_free(cfg);
    return report_error(rc, "cannot read trajectory");
  }
  rr_report* rep = nullptr;
  rc = rr_audit(cfg, traj, &rep);
  if (rc == RR_OK) {
    std::fputs(rr_report_table(rep), stdout);
    if (!o.out.empty()) {
      const fs::path dir = rr_config_output(cfg, "dir");
      rc = make_dir(dir.string()) ? RR_OK : RR_ERR_IO;
      if (rc == RR_OK) {
        rc = rr_report_write_json(rep, (dir / rr_config_output(cfg, "audit")).string().c_str());
      }
    }
    if (rc == RR_OK && !rr_report_all_pass(rep)) rc = RR_ERR_ACCEPTANCE;
  } else {
    report_error(rc, "audit failed");
  }
  rr_report_free(rep);
  rr_trajectory_free(traj);
  rr_config_free(cfg);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radiation-reaction trajectory runner"};
  app.require_subcommand(1);
  Overrides o;
  auto common = [&](CLI::App* sub, bool many_models) {
    sub->add_option("--config", o.config, "run configuration (JSON)")->required();
    auto* m = sub->add_option("--model", o.models, "force model");
    if (!many_models) m->expected(1);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--dt", o.dt, "step size");
    sub->add_option("--tol", o.tol, "tolerance");
  };

  auto* sim = app.add_subcommand("simulate", "integrate one configuration");
  common(sim, false);
  auto* cmp = app.add_subcommand("compare", "run several models on one configuration");
  common(cmp, true);
  cmp->get_option("--model")->required();

  std::string scenario;
  std::uint64_t seed = 1;
  auto* can = app.add_subcommand("canonical", "run a built-in acceptance scenario");
  can->add_option("name", scenario, "pulse | runaway | hyperbolic | reparam | identity_suite")
      ->required();
  can->add_option("--seed", seed, "random seed");

  std::string trajectory;
  auto* aud = app.add_subcommand("audit", "audit a stored trajectory");
  common(aud, false);
  aud->add_option("--trajectory", trajectory, "trajectory CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : RR_ERR_CONFIG;
  }

  if (*sim) return cmd_simulate(o);
  if (*cmp) return cmd_compare(o);
  if (*can) return cmd_canonical(scenario, seed);
  return cmd_audit(o, trajectory);
}
