#pragma once

// Numerical diagnostics for the classification of solutions of the coupled
// limit system: every bounded positive solution is a Fowler profile times a
// fixed direction in the closed positive quadrant.

#include <optional>
#include <vector>

#include "fowler/core.hpp"
#include "fowler/fowler_profile.hpp"
#include "fowler/integrator.hpp"

namespace fowler {

/// Ray tolerance for `direction_of`.
inline constexpr double kRayTolerance = 1e-6;
/// A component whose supremum is at most this is declared identically zero.
inline constexpr double kZeroComponentFloor = 1e-12;

/// The limit system on the state (v1, v2, w1, w2).
VectorField limit_system(const Dimension& dim);

State pack(const CylState& s);
CylState unpack(double t, const State& y);

/// Integrates the limit system from `ic`, stopping early (flagged as
/// truncated) when a component leaves the closed positive quadrant or exceeds
/// cfg.blowup_limit.
Trajectory integrate_limit(const Dimension& dim, const CylState& ic, double t_end,
                           const IntegratorConfig& cfg);

struct WronskianTrace {
  std::vector<double> times;
  std::vector<double> values;  // w1 v2 - v1 w2
  double mean = 0.0;
  double spread = 0.0;
};

WronskianTrace wronskian_trace(const Trajectory& traj);

struct DirectionResult {
  /// Present when V/|V| stays within kRayTolerance of a fixed direction in S^1_+.
  std::optional<Direction> direction;
  /// Largest angle between V(t)/|V(t)| and the mean direction.
  double max_deviation = 0.0;
  Vec2 mean_direction = Vec2::Zero();
};

/// Throws DomainError if |V| vanishes at a node.
DirectionResult direction_of(const Trajectory& traj, double tolerance = kRayTolerance);

/// V(t) = v_eps(t + shift) Lambda, W(t) = v_eps'(t + shift) Lambda on `span`.
Trajectory synthesize(const FowlerProfile& profile, const Direction& lambda, double shift, Interval span);

/// Max over `samples` evenly spaced times of |dV/dt - W| + |dW/dt - rhs(V)|,
/// with time derivatives taken from the dense interpolant.
double limit_residual(const Dimension& dim, const Trajectory& traj, int samples = 400);

enum class ComponentSign { positive, zero, mixed };

struct ClassificationReport {
  double wronskian_mean = 0.0;
  double wronskian_spread = 0.0;
  std::optional<Direction> direction;
  double max_angular_deviation = 0.0;
  std::optional<double> eta;
  /// Empirical constants with c1 |x|^{(2-n)/2} <= |U| <= c2 |x|^{(2-n)/2},
  /// i.e. the infimum and supremum of |V| along the trajectory.
  double c1 = 0.0;
  double c2 = 0.0;
  std::array<ComponentSign, 2> components{};
  bool truncated = false;
};

ClassificationReport classify(const Trajectory& traj);

}  // namespace fowler
