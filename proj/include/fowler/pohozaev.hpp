#pragma once

#include <utility>
#include <vector>

#include "fowler/core.hpp"
#include "fowler/perturbed.hpp"

namespace fowler {

enum class SignClass { negative, zero, positive };

const char* to_string(SignClass s);

/// Relative width of the zero band: |P| <= kPohozaevZeroBand * sigma_{n-1}.
inline constexpr double kPohozaevZeroBand = 1e-6;

struct PohozaevReport {
  std::vector<std::pair<double, double>> values;  // (t, P)
  double limit_estimate = 0.0;
  double cauchy_spread = 0.0;
  SignClass sign = SignClass::zero;
};

/// sigma_{n-1} H(V, W): the Pohozaev integral of a radial field over the sphere
/// |x| = e^{-t}.
double p_cyl(const Dimension& dim, const CylState& state);

/// Pohozaev surface integral at radius r for a radial field.
double p_ball_radial(const Dimension& dim, const RadialSample& sample);

struct DriftCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

/// P(r) - P(s) against the volume integral of (x.grad u_i + (n-2)/2 u_i) A_ij u_j
/// over the annulus s < |x| < r, evaluated in cylindrical time.
DriftCheck p_drift(const PerturbedRun& run, double r, double s);

/// Pohozaev series along the run. The limit is the mean over the last third,
/// the spread is max - min there. Throws when the run is too short to have a
/// tail or when the tail spread exceeds the spread of the preceding third.
PohozaevReport p_invariant(const PerturbedRun& run);

SignClass classify_sign(const Dimension& dim, double p);

}  // namespace fowler
