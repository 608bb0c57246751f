#pragma once

// Adaptive Dormand-Prince 8(5,3) integration with 7th-order dense output,
// zero-crossing detection on the dense output, and monodromy matrices of
// periodic second-order scalar equations.

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "fowler/trajectory.hpp"

namespace fowler {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.5;
  long max_steps = 2'000'000;
  /// Solutions leaving |v_i| < blowup_limit are truncated and flagged by the
  /// callers that install a blow-up guard.
  double blowup_limit = 10.0;

  /// Throws DomainError when the invariants 0 < rel_tol <= 1e-3,
  /// 0 < abs_tol <= rel_tol, max_step > 0 do not hold.
  void validate() const;

  IntegratorConfig with_tolerances(double rel, double abs) const {
    IntegratorConfig c = *this;
    c.rel_tol = rel;
    c.abs_tol = abs;
    return c;
  }
};

/// dy/dt = f(t, y), written into `dydt` (already sized like y).
using VectorField = std::function<void(double t, const State& y, State& dydt)>;

/// Returns true when integration should stop after the current accepted step.
using StopCondition = std::function<bool(double t, const State& y)>;

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_time)
      : std::runtime_error(what), last_time_(last_time) {}
  double last_time() const noexcept { return last_time_; }

 private:
  double last_time_;
};

/// Integrates from span.begin to span.end (either direction). Backward spans
/// (end < begin) produce a trajectory whose span is [end, begin].
Trajectory integrate(const VectorField& rhs, const State& y0, Interval span,
                     const IntegratorConfig& cfg, const StopCondition& stop = {});

enum class EventDirection { rising, falling, any };

using EventFunction = std::function<double(double t, const State& y)>;

/// Sign changes of `event` along `traj`, refined by bisection on the dense
/// output to 1e-12 in t. Each step is subdivided `subdivisions` times before
/// bracketing so that close pairs of roots inside one step are not missed.
std::vector<double> find_events(const Trajectory& traj, const EventFunction& event,
                                EventDirection direction, int subdivisions = 8);

struct Monodromy {
  /// Fundamental matrix over one period acting on (psi, psi').
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Identity();
  double period = 0.0;
  /// Product of the per-segment determinants (see `monodromy`).
  double det = 1.0;
  std::array<std::complex<double>, 2> multipliers{};

  double trace() const { return matrix.trace(); }
};

/// Eigenvalues of a 2x2 matrix given its trace and determinant, computed
/// without cancellation in the small root.
std::array<std::complex<double>, 2> multipliers_from(double trace, double det);

/// Monodromy of psi'' + q(t) psi = 0 over [0, period]. The period is split into
/// segments across which solutions grow by at most about e; the matrix is the
/// ordered product of segment propagators and `det` the product of their
/// well-conditioned determinants.
Monodromy monodromy(const std::function<double(double)>& q, double period,
                    const IntegratorConfig& cfg);

}  // namespace fowler
