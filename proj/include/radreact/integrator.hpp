#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radreact/dynamics.hpp"
#include "radreact/fields.hpp"
#include "radreact/worldline.hpp"

namespace radreact {

enum class EventKind {
  uniform_stratum_entry,
  uniform_stratum_exit,
  continuation_point,
  maxaccel_breach,
  runaway_abort,
  no_convergence,
};

const char* to_string(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view name);

struct Event {
  EventKind kind;
  double tau = 0.0;
  std::string detail;

  friend bool operator==(const Event&, const Event&) = default;
};

/// How a run ended. Anything but `ok` leaves a partial trajectory.
enum class RunStatus { ok, maxaccel_breach, no_convergence, runaway_abort, regime_violation };

const char* to_string(RunStatus s) noexcept;
RunStatus parse_run_status(std::string_view name);

/// One accepted step. `a_sq` is eta(a, a).
struct TrajectoryRow {
  double tau = 0.0;
  FourVector x;
  FourVector u;
  FourVector a;
  double epsilon = 0.0;
  double epsilon_dot = 0.0;
  double a_sq = 0.0;
  double fL2 = 0.0;
  double m_b = 0.0;
  double larmor_residual = 0.0;
  double g_norm_residual = 0.0;
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  std::vector<Event> events;
  RunStatus status = RunStatus::ok;
  std::string status_detail;
  std::map<std::string, std::string> metadata;
  /// Relative change of u0 from the mass-shell projection after each step
  /// (0 for the first row).
  std::vector<double> renorm_scale;

  /// Column by CSV name; throws InvalidArgument for unknown names.
  std::vector<double> column(std::string_view name) const;
  static const std::vector<std::string>& column_names();
};

/// Completes u0 from the spatial velocity so that the model's normalization
/// holds exactly (eta for lorentz/ald/landau_lifshitz, g otherwise), and fills
/// in the acceleration. For ald, `a0` is used when given and must be
/// eta-orthogonal to u; otherwise the Lorentz acceleration is used.
WorldlineState initial_state(const ForceModelSpec& spec, const FieldSpec& field,
                             const FourVector& x, const Vec3& u_spatial, double tau,
                             std::optional<FourVector> a0 = std::nullopt);

/// Acceleration of a second-order model at (tau, x, u); for ald this is an
/// error. `seed` is used by the implicit solver only.
FourVector model_acceleration(const ForceModelSpec& spec, const FieldSpec& field, double tau,
                              const FourVector& x, const FourVector& u,
                              std::optional<FourVector> seed = std::nullopt);

/// One classical RK4 step of length h, without renormalization. The result
/// carries the model acceleration at the new point. Solver failures are
/// rethrown with the stage index in the message.
WorldlineState rk4_step(const ForceModelSpec& spec, const FieldSpec& field,
                        const WorldlineState& state, double h);

/// rk4_step restricted to implicit_maxaccel.
WorldlineState step_implicit(const WorldlineState& state, const ForceModelSpec& spec,
                             const FieldSpec& field, double dt);

/// Integrates over [tau_start, tau_end] with spec.solver. Precondition
/// failures (normalization, timelike, domain) throw; failures during the
/// run are reported through `status` and a matching event, with every
/// accepted row kept.
TrajectoryRecord integrate(const ForceModelSpec& spec, const FieldSpec& field,
                           const WorldlineState& init, double tau_start, double tau_end);

/// Uniform strata (runs of >= 3 rows with |eps_dot| < eps_dot_min) and
/// continuation points (eps_dot sign changes outside strata, located by
/// linear interpolation), merged with the run events already in `traj`
/// and sorted by tau.
std::vector<Event> detect_events(const TrajectoryRecord& traj, const SolverOptions& opts);

}  // namespace radreact
