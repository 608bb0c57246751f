#pragma once

#include "fowler/core.hpp"
#include "fowler/integrator.hpp"
#include "fowler/trajectory.hpp"

namespace fowler {

/// ((n-2)/n)^{(n-2)/4}: the constant solution of the single equation and the
/// supremum of admissible necksizes.
double cylinder_necksize(const Dimension& dim);

/// -(n-2)/2 ((n-2)/n)^{n/2}: scalar energy of the cylinder, the lower end of
/// the energy interval of periodic solutions.
double cylinder_energy(const Dimension& dim);

/// v'' = delta^2 v - n(n-2)/4 v^{(n+2)/(n-2)} as a first-order system on (v, w).
VectorField scalar_fowler_rhs(const Dimension& dim);

/// Periodic positive solution v_eps of the single equation, phased so that
/// v(0) = eps is a minimum.
class FowlerProfile {
 public:
  FowlerProfile(Dimension dim, double eps, double period, double energy, double max_value,
                Trajectory one_period);

  const Dimension& dimension() const { return dim_; }
  double eps() const { return eps_; }
  double period() const { return period_; }
  /// Scalar-normalized energy H(eps, 0).
  double energy() const { return energy_; }
  double max_value() const { return max_value_; }

  /// Dense output on [0, period] of the state (v, w).
  const Trajectory& samples() const { return samples_; }

  /// (v, w) at any t, using periodicity outside [0, period].
  Vec2 state(double t) const;
  double value(double t) const { return state(t).x(); }
  double slope(double t) const { return state(t).y(); }

  /// Copies of the one-period dense output covering `span`.
  Trajectory periodic_samples(Interval span) const;

 private:
  Dimension dim_;
  double eps_;
  double period_;
  double energy_;
  double max_value_;
  Trajectory samples_;
};

/// Shoots from (eps, 0), measures the period as the first rising zero of v'
/// after t = 0 and checks the profile invariants (minimum, v < 1, periodicity
/// over one extra period).
FowlerProfile profile_from_necksize(const Dimension& dim, double eps, const IntegratorConfig& cfg);

/// Smaller root of H(eps, 0) = H0 in (0, cylinder_necksize) by bisection.
double necksize_from_energy(const Dimension& dim, double energy);

/// Closed-form separatrix v = cosh(t)^{-(n-2)/2}, the cylindrical image of the
/// standard bubble, sampled as (v, w) on [-half_width, half_width].
Trajectory spherical_profile(const Dimension& dim, double half_width = 20.0, double step = 0.005);

}  // namespace fowler
