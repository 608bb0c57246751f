#pragma once

// Jacobi fields of a Fowler-type solution V = v_eps Lambda: projections of the
// linearized operator onto spherical harmonics, split along {Lambda, Lambda_bar}
// into the scalar Hill equations psi'' + q(t) psi = 0.

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "fowler/core.hpp"
#include "fowler/fowler_profile.hpp"
#include "fowler/integrator.hpp"

namespace fowler {

struct ModeIndex {
  int j = 0;
  double lambda = 0.0;  // j(j + n - 2)
  long multiplicity = 1;
};

ModeIndex mode_index(const Dimension& dim, int j);

/// Eigenvalues of the sphere Laplacian on S^{n-1} for degrees 0..jmax.
std::vector<ModeIndex> eigenvalue_table(const Dimension& dim, int jmax);

/// Every degree repeated by its multiplicity, in increasing order.
std::vector<double> eigenvalues_with_multiplicity(const Dimension& dim, int jmax);

enum class BasisComponent { tangential, normal };
enum class GrowthClass { periodic, linear, exp_growing, exp_decaying };
enum class FieldKind { phi1, phi2, phi3, phi4, mode_solution };

const char* to_string(BasisComponent c);
const char* to_string(GrowthClass g);
const char* to_string(FieldKind k);

using Coefficient = std::function<double(double)>;

struct ModeOperators {
  Coefficient q_tan;  // n(n+2)/4 v^{4/(n-2)} - delta^2 - lambda
  Coefficient q_nor;  // n(n-2)/4 v^{4/(n-2)} - delta^2 - lambda
};

ModeOperators mode_operators(const FowlerProfile& profile, const ModeIndex& mode);

/// Zero-order part Z of the coupled linearization phi'' + Z(phi) = 0 at V0 for
/// the mode with eigenvalue lambda:
///   Z = -(delta^2 + lambda) phi + n(n-2)/4 (4/(n-2) |V0|^{4/(n-2)-2} <V0, phi> V0 + |V0|^{4/(n-2)} phi).
Vec2 coupled_zero_order(const Dimension& dim, const Vec2& v0, double lambda, const Vec2& phi);

struct JacobiField {
  FieldKind kind = FieldKind::mode_solution;
  ModeIndex mode;
  BasisComponent component = BasisComponent::tangential;
  /// The field is psi(t) times this vector (Lambda or Lambda_bar).
  Vec2 basis = Vec2(1.0, 0.0);
  /// (psi, psi') at any t >= 0.
  std::function<Vec2(double)> evaluate;
  /// Hermite samples of (psi, psi') on [0, span_periods * T].
  Trajectory samples;
  GrowthClass growth = GrowthClass::periodic;
  /// sup |psi'' + q psi| over one period, psi'' by differencing psi'.
  double residual = 0.0;

  double value(double t) const { return evaluate(t).x(); }
  double slope(double t) const { return evaluate(t).y(); }
};

struct ExplicitFieldOptions {
  /// Spacing of the differencing stencil used for residuals.
  double stencil_step = 1e-2;
  int residual_samples = 200;
  int span_periods = 10;
  int samples_per_period = 200;
  /// Tolerances for the neighbouring profiles and the reduction-of-order quadrature.
  IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(1e-13, 1e-15);
};

/// phi1 = v' Lambda, phi2 = d_eps v Lambda (centered difference at eps +- family_step,
/// every profile with its minimum at t = 0), phi3 = v Lambda_bar, phi4 = v int_0^t v^{-2} Lambda_bar.
/// Throws DomainError("DIFFERENCING") when halving family_step changes phi2
/// by more than the expected second-order amount.
std::array<JacobiField, 4> explicit_fields(const FowlerProfile& profile, double family_step,
                                           const Direction& lambda = Direction::from_vector(Vec2(1.0, 0.0)),
                                           const ExplicitFieldOptions& options = {});

/// Centered difference (v, w) of the profile family at t.
Vec2 family_difference(const FowlerProfile& minus, const FowlerProfile& plus, double step, double t);

/// sup over samples in [t0, t1] of |psi'' + q psi| with psi'' from a
/// fourth-order difference of psi'.
double field_residual(const std::function<Vec2(double)>& field, const Coefficient& q, double t0, double t1,
                      int samples, double stencil_step);

/// Determinant of the 4x4 block matrix of normalized initial data
/// (psi(0), psi'(0)) of the tangential pair and the normal pair.
double initial_data_determinant(const std::array<JacobiField, 4>& fields);

struct MonodromyReport {
  ModeIndex mode;
  BasisComponent component = BasisComponent::tangential;
  Monodromy monodromy;
  std::pair<GrowthClass, GrowthClass> classes{GrowthClass::periodic, GrowthClass::periodic};
};

/// Unit modulus band for multipliers.
inline constexpr double kUnitModulusBand = 1e-4;
/// Band around trace +-2 inside which defectiveness decides the class.
inline constexpr double kTraceBand = 1e-6;
inline constexpr double kDefectBand = 1e-6;

std::pair<GrowthClass, GrowthClass> classify_monodromy(const Monodromy& m);

std::pair<MonodromyReport, MonodromyReport> floquet_classify(const FowlerProfile& profile, const ModeIndex& mode,
                                                             const IntegratorConfig& cfg = {});

}  // namespace fowler
