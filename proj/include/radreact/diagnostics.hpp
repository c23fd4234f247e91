#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radreact/dynamics.hpp"
#include "radreact/fields.hpp"
#include "radreact/integrator.hpp"

namespace radreact {

/// Least-squares line y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Throws InvalidArgument for fewer than two points or constant x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Fit of log y on log x; every value must be positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);
/// Growth rate r of |y| ~ exp(r t) from the middle third of the samples.
LineFit fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& y);

struct AuditThresholds {
  double normalization = 1e-6;
  double kinematic = 1e-7;
  double fl2_relative = 1e-6;
  /// Larmor residual bound is larmor_factor * eps0^2 * m * tau0 * a^2.
  double larmor_factor = 10.0;
  double mass_relative = 1e-10;
  /// Pre-acceleration flag fires above this multiple of solver.tol.
  double preaccel_factor = 10.0;
};

struct CheckResult {
  std::string name;
  bool applicable = true;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  bool pass = true;
};

struct AuditReport {
  /// normalization_r1, kinematic_r2, kinematic_r3, fl2_identity,
  /// larmor_contraction, acceleration_bound, mass_ledger; always in this order.
  std::vector<CheckResult> checks;
  std::map<std::string, LineFit> fits;
  bool runaway_detected = false;
  bool preacceleration_detected = false;
  double epsilon0 = 0.0;
  double preacceleration_max = 0.0;

  bool all_pass() const;
  const CheckResult& check(const std::string& name) const;
  std::string to_json() const;
  /// Aligned plain-text table, one line per check.
  std::string summary_table() const;
};

const std::vector<std::string>& audit_check_names();

/// Deterministic post-hoc audit. Checks that do not apply to the model are
/// reported with applicable = false and pass = true.
AuditReport audit(const TrajectoryRecord& traj, const ForceModelSpec& model,
                  const FieldSpec& field, const AuditThresholds& thresholds = {});

struct PulseProbeRow {
  double width = 0.0;
  double pre_max = 0.0;
  double post = 0.0;
  double target = 0.0;
  double error = 0.0;
  RunStatus status = RunStatus::ok;
};

struct PulseProbeResult {
  std::vector<PulseProbeRow> rows;
  /// log(error) against log(width); empty when fewer than two usable rows.
  std::optional<LineFit> width_fit;
};

struct PulseProbeOptions {
  /// Abort when kappa / (3m / 2e^2) exceeds this ratio.
  double max_nonrel_ratio = 0.3;
  double pulse_center = 0.0;
};

/// Runs `model` through a Gaussian pulse of area kappa at each width and
/// compares the post-pulse u1 with kappa / (3m / 2e^2). Pre-pulse means
/// tau < center - 5w. The pulse widths run concurrently.
PulseProbeResult preacceleration_probe(const ForceModelSpec& model,
                                       const std::vector<double>& widths, double kappa,
                                       const PulseProbeOptions& options = {});

/// Supremum gaps between two trajectories, the second interpolated linearly
/// onto the first one's tau grid over their common span.
struct TrajectoryGap {
  double position = 0.0;
  double velocity = 0.0;
};

TrajectoryGap trajectory_gap(const TrajectoryRecord& a, const TrajectoryRecord& b);

struct Scenario {
  ForceModelSpec model;
  FieldSpec field;
  FourVector x0;
  Vec3 u0_spatial{0.0, 0.0, 0.0};
  double tau_start = 0.0;
  double tau_end = 1.0;
};

/// Every amplitude in the field multiplied by s.
FieldSpec scale_field(const FieldSpec& field, double s);

struct ScalingRow {
  double scale = 0.0;
  double epsilon0 = 0.0;
  TrajectoryGap gap;
  bool excluded = false;
  std::string reason;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  /// log(max gap) against log(eps0) over the included rows with gap > 0.
  std::optional<LineFit> fit;
};

/// Runs implicit_maxaccel and explicit_approx on the scaled fields of `base`
/// (its model's e, m, A_max and solver are used) and fits the gap against
/// eps0. Scales whose runs breach the domain are excluded with a reason.
ScalingStudy epsilon0_scaling_study(const std::vector<double>& field_scales,
                                    const Scenario& base);

}  // namespace radreact
