#pragma once

// The radially reduced inhomogeneous system
//   v_i'' = delta^2 v_i + sum_j B_ij(t) v_j - n(n-2)/4 |V|^{4/(n-2)} v_i,
//   B_ij(t) = e^{-2t} A_ij(e^{-t}),
// for flat metrics and affine radial potentials, with the diagnostics used to
// decide removability and to fit the asymptotic Fowler-type model.

#include <optional>
#include <string>
#include <vector>

#include "fowler/core.hpp"
#include "fowler/fowler_profile.hpp"
#include "fowler/integrator.hpp"

namespace fowler {

/// a(r) = c + d r
struct AffineRadial {
  double c = 0.0;
  double d = 0.0;
  double operator()(double r) const { return c + d * r; }
};

struct PotentialSpec {
  std::array<std::array<AffineRadial, 2>, 2> entries{};

  static PotentialSpec zero() { return {}; }
  static PotentialSpec scaled_identity(double a);

  Mat2 at(double r) const;
  bool is_zero() const;
  bool symmetric() const;
};

struct ValidationIssue {
  std::string code;  // SYMMETRY, H1_VIOLATION, H2_VIOLATION, DIMENSION_RANGE
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid() const { return issues.empty(); }
};

/// Symmetry, cooperativity of -A (A_12 <= 0 on [0, 1]) and, for n = 5,
/// A(0) = f(0) Id.
ValidationReport validate_potential(const Dimension& dim, const PotentialSpec& spec);

PhaseVelocity perturbed_rhs(const Dimension& dim, double t, const CylState& state, const PotentialSpec& spec);

VectorField perturbed_system(const Dimension& dim, const PotentialSpec& spec);

struct PerturbedRun {
  Dimension dim{3};
  PotentialSpec potential;
  Trajectory trajectory;
  bool truncated = false;

  // Diagnostics sampled at the trajectory nodes.
  std::vector<double> times;
  std::vector<double> w_avg;  // r^{(n-2)/2} times the spherical average of u1 + u2, i.e. v1 + v2
  std::vector<double> psi;    // hamiltonian(V, W)
  std::vector<double> norm;   // |V|
  double sup_norm = 0.0;
  double inf_norm = 0.0;
  /// inf |V| over the last third of the run.
  double tail_inf_norm = 0.0;
};

/// Integrates from `ic` (at ic.t, normally 0 i.e. r = 1) to t_end. The
/// potential is validated first; runs leaving the closed positive quadrant or
/// exceeding cfg.blowup_limit are truncated and flagged.
PerturbedRun run_perturbed(const Dimension& dim, const CylState& ic, const PotentialSpec& spec,
                           double t_end, const IntegratorConfig& cfg);

struct WindowError {
  double tau = 0.0;
  double error = 0.0;
};

struct AsymptoticFit {
  double eps_star = 0.0;
  /// Phase with V(t) ~ v_eps(t + T) Lambda.
  double T_star = 0.0;
  Direction lambda_star = Direction::from_vector(Vec2(1.0, 0.0));
  /// Fitted exponent of error(tau) ~ e^{-alpha tau}; absent for an exact model.
  std::optional<double> alpha;
  bool exact_model = false;
  std::vector<WindowError> windows;
  std::size_t burn_in = 0;
  /// Length of the strictly decreasing run of window errors after burn-in.
  std::size_t decreasing_windows = 0;
  double model_period = 0.0;
};

/// A run whose window errors all stay at or below this matches its model exactly.
inline constexpr double kFitNoiseFloor = 1e-8;
/// Window errors below kFitToleranceFactor * rel_tol * max(1, sup |V|) are
/// integration noise and end the decreasing run.
inline constexpr double kFitToleranceFactor = 10.0;

/// Fits the Fowler-type model from the tail (last third) of the run: eps from
/// the tail-averaged energy, Lambda from the averaged V/|V|, T from the phases
/// of the minima of |V|. Windows [tau, tau + window_length] tile the run from
/// its start up to the tail; the first third of them are burn-in. Alpha is the
/// negated least-squares slope of log error(tau) over the strictly decreasing
/// windows above the noise floor that follow burn-in. `cfg` must carry the
/// tolerances the run was made with.
AsymptoticFit asymptotic_fit(const PerturbedRun& run, int window_count, double window_length,
                             const IntegratorConfig& cfg = {});

enum class Removability { removable, nonremovable, undecided };

Removability removability_classify(const PerturbedRun& run);

const char* to_string(Removability r);

}  // namespace fowler
