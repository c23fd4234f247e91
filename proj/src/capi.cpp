#include "radreact/radreact.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "radreact/errors.hpp"
#include "radreact/experiments.hpp"

using namespace radreact;

struct rr_config {
  RunConfig cfg;
};

struct rr_trajectory {
  TrajectoryRecord rec;
};

struct rr_report {
  AuditReport rep;
  std::string table;
};

namespace {

thread_local std::string g_last_error;

int code_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::config:
    case ErrorCode::nonrelativistic_limit:
      return RR_ERR_CONFIG;
    case ErrorCode::no_convergence:
    case ErrorCode::not_timelike:
    case ErrorCode::normalization:
    case ErrorCode::non_finite:
      return RR_ERR_CONVERGENCE;
    case ErrorCode::maximal_accel_breach:
    case ErrorCode::domain_breach:
      return RR_ERR_MAXACCEL;
    case ErrorCode::runaway_abort:
      return RR_ERR_RUNAWAY;
    case ErrorCode::regime_violation:
    case ErrorCode::degenerate_regime:
      return RR_ERR_REGIME;
    case ErrorCode::io:
      return RR_ERR_IO;
    case ErrorCode::invalid_argument:
    case ErrorCode::insufficient_samples:
    case ErrorCode::not_monotone:
      return RR_ERR_INVALID_ARG;
  }
  return RR_ERR_INTERNAL;
}

int fail(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs f, translating exceptions into status codes.
template <class F>
int guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const Error& e) {
    return fail(code_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RR_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path + "'");
}

// Applies `edit` to a copy and keeps it only when it validates.
template <class F>
int edit_config(rr_config* c, F&& edit) {
  if (!c) return fail(RR_ERR_INVALID_ARG, "null config");
  return guard([&] {
    RunConfig next = c->cfg;
    edit(next);
    next.validate();
    c->cfg = std::move(next);
    return RR_OK;
  });
}

}  // namespace

extern "C" {

const char* rr_version(void) { return kCodeVersion; }

const char* rr_status_name(int status) {
  switch (status) {
    case RR_OK: return "ok";
    case RR_ERR_CONFIG: return "config_error";
    case RR_ERR_CONVERGENCE: return "no_convergence";
    case RR_ERR_MAXACCEL: return "maxaccel_breach";
    case RR_ERR_RUNAWAY: return "runaway_abort";
    case RR_ERR_ACCEPTANCE: return "acceptance_failure";
    case RR_ERR_REGIME: return "regime_violation";
    case RR_ERR_IO: return "io_error";
    case RR_ERR_INVALID_ARG: return "invalid_argument";
    case RR_ERR_INTERNAL: return "internal_error";
    default: return "unknown";
  }
}

const char* rr_last_error(void) { return g_last_error.c_str(); }

void rr_string_free(char* s) { std::free(s); }

int rr_config_parse(const char* json_text, rr_config** out) {
  if (!json_text || !out) return fail(RR_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guard([&] {
    *out = new rr_config{parse_run_config(json_text)};
    return RR_OK;
  });
}

int rr_config_load(const char* path, rr_config** out) {
  if (!path || !out) return fail(RR_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guard([&] {
    *out = new rr_config{load_run_config(path)};
    return RR_OK;
  });
}

void rr_config_free(rr_config* cfg) { delete cfg; }

int rr_config_set_model(rr_config* cfg, const char* model_name) {
  if (!model_name) return fail(RR_ERR_INVALID_ARG, "null model name");
  return edit_config(cfg, [&](RunConfig& c) {
    c.model.model = parse_force_model(model_name);
    if (c.model.model != ForceModel::ald) c.a0.reset();
  });
}

int rr_config_set_dt(rr_config* cfg, double dt) {
  return edit_config(cfg, [&](RunConfig& c) { c.model.solver.dt = dt; });
}

int rr_config_set_tol(rr_config* cfg, double tol) {
  return edit_config(cfg, [&](RunConfig& c) { c.model.solver.tol = tol; });
}

int rr_config_set_seed(rr_config* cfg, uint64_t seed) {
  return edit_config(cfg, [&](RunConfig& c) { c.seed = seed; });
}

int rr_config_set_output_dir(rr_config* cfg, const char* dir) {
  if (!dir || !*dir) return fail(RR_ERR_INVALID_ARG, "empty output directory");
  return edit_config(cfg, [&](RunConfig& c) { c.output.dir = dir; });
}

const char* rr_config_output(const rr_config* cfg, const char* which) {
  if (!cfg || !which) return nullptr;
  const auto& o = cfg->cfg.output;
  const std::string_view w(which);
  if (w == "dir") return o.dir.c_str();
  if (w == "trajectory") return o.trajectory.c_str();
  if (w == "audit") return o.audit.c_str();
  if (w == "gaps") return o.gaps.c_str();
  return nullptr;
}

int rr_simulate(const rr_config* cfg, rr_trajectory** traj, rr_report** report) {
  if (!cfg || !traj || !report) return fail(RR_ERR_INVALID_ARG, "null argument");
  *traj = nullptr;
  *report = nullptr;
  return guard([&] {
    auto outcome = run_simulation(cfg->cfg);
    const int code = exit_code(outcome.trajectory.status);
    auto* r = new rr_report{std::move(outcome.report), {}};
    r->table = r->rep.summary_table();
    *traj = new rr_trajectory{std::move(outcome.trajectory)};
    *report = r;
    if (code != RR_OK) {
      g_last_error = std::string(to_string((*traj)->rec.status)) + ": " +
                     (*traj)->rec.status_detail;
    }
    return code;
  });
}

size_t rr_trajectory_rows(const rr_trajectory* t) { return t ? t->rec.rows.size() : 0; }

int rr_trajectory_column(const rr_trajectory* t, const char* name, double* out, size_t n) {
  if (!t || !name || (!out && n > 0)) return fail(RR_ERR_INVALID_ARG, "null argument");
  return guard([&] {
    const auto col = t->rec.column(name);
    if (n < col.size()) throw Error(ErrorCode::invalid_argument, "output buffer too small");
    std::copy(col.begin(), col.end(), out);
    return RR_OK;
  });
}

int rr_trajectory_status(const rr_trajectory* t) {
  return t ? exit_code(t->rec.status) : RR_ERR_INVALID_ARG;
}

size_t rr_trajectory_event_count(const rr_trajectory* t) { return t ? t->rec.events.size() : 0; }

int rr_trajectory_event(const rr_trajectory* t, size_t i, const char** kind, double* tau,
                        const char** detail) {
  if (!t || i >= t->rec.events.size()) return fail(RR_ERR_INVALID_ARG, "no such event");
  const auto& e = t->rec.events[i];
  if (kind) *kind = to_string(e.kind);
  if (tau) *tau = e.tau;
  if (detail) *detail = e.detail.c_str();
  return RR_OK;
}

int rr_trajectory_write_csv(const rr_trajectory* t, const char* path) {
  if (!t || !path) return fail(RR_ERR_INVALID_ARG, "null argument");
  return guard([&] {
    std::ostringstream ss;
    write_trajectory_csv(t->rec, ss);
    write_text(path, ss.str());
    return RR_OK;
  });
}

int rr_trajectory_read_csv(const char* path, rr_trajectory** out) {
  if (!path || !out) return fail(RR_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guard([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, std::string("cannot open '") + path + "'");
    *out = new rr_trajectory{read_trajectory_csv(in)};
    return RR_OK;
  });
}

void rr_trajectory_free(rr_trajectory* t) { delete t; }

int rr_audit(const rr_config* cfg, const rr_trajectory* t, rr_report** out) {
  if (!cfg || !t || !out) return fail(RR_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guard([&] {
    const auto& c = cfg->cfg;
    auto* r = new rr_report{audit(t->rec, c.model, c.field, c.thresholds), {}};
    r->table = r->rep.summary_table();
    *out = r;
    return RR_OK;
  });
}

int rr_report_all_pass(const rr_report* r) { return r && r->rep.all_pass() ? 1 : 0; }

int rr_report_runaway_detected(const rr_report* r) {
  return r && r->rep.runaway_detected ? 1 : 0;
}

int rr_report_preacceleration_detected(const rr_report* r) {
  return r && r->rep.preacceleration_detected ? 1 : 0;
}

const char* rr_report_table(const rr_report* r) { return r ? r->table.c_str() : ""; }

int rr_report_write_json(const rr_report* r, const char* path) {
  if (!r || !path) return fail(RR_ERR_INVALID_ARG, "null argument");
  return guard([&] {
    write_text(path, r->rep.to_json());
    return RR_OK;
  });
}

void rr_report_free(rr_report* r) { delete r; }

int rr_compare(const rr_config* cfg, const char* const* models, size_t n_models,
               const char* out_dir) {
  if (!cfg || (!models && n_models > 0) || !out_dir) {
    return fail(RR_ERR_INVALID_ARG, "null argument");
  }
  return guard([&] {
    std::vector<ForceModel> list;
    for (size_t i = 0; i < n_models; ++i) {
      if (!models[i]) throw Error(ErrorCode::invalid_argument, "null model name");
      list.push_back(parse_force_model(models[i]));
    }
    const auto res = run_compare(cfg->cfg, list);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    int code = RR_OK;
    for (const auto& run : res.runs) {
      if (run.trajectory) {
        std::ostringstream ss;
        write_trajectory_csv(*run.trajectory, ss);
        write_text((dir / (std::string(to_string(run.model)) + ".csv")).string(), ss.str());
        const int c = exit_code(run.trajectory->status);
        if (code == RR_OK && c != RR_OK) {
          code = c;
          g_last_error = std::string(to_string(run.model)) + ": " + run.trajectory->status_detail;
        }
      } else if (code == RR_OK) {
        code = RR_ERR_CONFIG;
        g_last_error = std::string(to_string(run.model)) + ": " + run.error;
      }
    }
    write_text((dir / cfg->cfg.output.gaps).string(), res.gap_json());
    return code;
  });
}

int rr_canonical(const char* name, uint64_t seed, char** report) {
  if (report) *report = nullptr;
  if (!name) return fail(RR_ERR_INVALID_ARG, "null scenario name");
  return guard([&] {
    const auto res = run_canonical(name, seed);
    std::string text;
    for (const auto& c : res.checks) {
      text += res.name + "." + c.name + ": " + (c.pass ? "pass" : "FAIL") + " (" + c.detail +
              ")\n";
    }
    text += res.name + ": " + (res.pass() ? "PASS" : "FAIL") + "\n";
    if (report) *report = dup_string(text);
    if (!res.pass()) {
      g_last_error = res.name + " failed";
      return static_cast<int>(RR_ERR_ACCEPTANCE);
    }
    return static_cast<int>(RR_OK);
  });
}

}  // extern "C"
