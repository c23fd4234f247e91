#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radreact/diagnostics.hpp"
#include "radreact/dynamics.hpp"
#include "radreact/fields.hpp"
#include "radreact/integrator.hpp"

namespace radreact {

inline constexpr const char* kCodeVersion = "0.1.0";

struct OutputPaths {
  std::string dir = ".";
  std::string trajectory = "trajectory.csv";
  std::string audit = "audit.json";
  std::string gaps = "gaps.json";
};

/// Everything one run needs. Parsed from JSON; see README for the schema.
struct RunConfig {
  ForceModelSpec model;
  FieldSpec field;
  FourVector x0;
  Vec3 u0_spatial{0.0, 0.0, 0.0};
  /// Initial acceleration, ald only.
  std::optional<FourVector> a0;
  double tau_start = 0.0;
  double tau_end = 0.0;
  OutputPaths output;
  std::uint64_t seed = 0;
  AuditThresholds thresholds;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Unknown keys, missing required keys and wrong types are ConfigErrors;
/// the message starts with the key path, e.g. "model.m: ...".
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string& path);

std::string field_to_json(const FieldSpec& field);
FieldSpec field_from_json(std::string_view json_text);

/// Metadata as "# key=value" lines, then "# status=", "# status_detail=" and
/// one "# event=kind|tau|detail" line per event, then the header and rows
/// at 17 significant digits.
void write_trajectory_csv(const TrajectoryRecord& traj, std::ostream& out);
TrajectoryRecord read_trajectory_csv(std::istream& in);

/// Bitwise comparison of rows (NaN equal to NaN), events, status and
/// metadata. The renormalization log is not part of the file.
bool same_record(const TrajectoryRecord& a, const TrajectoryRecord& b);

struct RunOutcome {
  TrajectoryRecord trajectory;
  AuditReport report;
};

/// Integrate and audit. Metadata gains the field, seed and code version.
RunOutcome run_simulation(const RunConfig& config);

/// 0 ok, 3 no convergence, 4 maximal-acceleration breach, 5 run-away abort,
/// 7 regime violation.
int exit_code(RunStatus status) noexcept;

struct ModelRun {
  ForceModel model;
  std::optional<TrajectoryRecord> trajectory;
  /// Set when the model could not start (precondition or config failure).
  std::string error;
};

struct PairGap {
  ForceModel a;
  ForceModel b;
  TrajectoryGap gap;
};

struct CompareResult {
  std::vector<ModelRun> runs;
  std::vector<PairGap> gaps;
  double epsilon0 = 0.0;

  /// True when every model started and finished with status ok.
  bool all_ok() const;
  std::string gap_json() const;
};

/// Runs the config's scenario once per model (same e, m, A_max, solver) and
/// reports pairwise sup-norm gaps between the runs that produced rows.
CompareResult run_compare(const RunConfig& config, const std::vector<ForceModel>& models);

struct CanonicalCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CanonicalResult {
  std::string name;
  std::vector<CanonicalCheck> checks;
  bool pass() const;
};

/// pulse, runaway, hyperbolic, reparam, identity_suite.
const std::vector<std::string>& canonical_names();
CanonicalResult run_canonical(std::string_view name, std::uint64_t seed = 1);

}  // namespace radreact
