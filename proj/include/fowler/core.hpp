#pragma once

// Shared domain types for the two-component critical system in cylindrical
// coordinates: the ball <-> cylinder change of variables, the autonomous
// right-hand side, and the conserved quantities built on top of it.

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fowler {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Error raised when an operation is called outside its domain. `code()` is a
/// stable identifier surfaced by the command-line front end.
class DomainError : public std::invalid_argument {
 public:
  DomainError(std::string code, const std::string& what)
      : std::invalid_argument(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Spatial dimension n together with the derived constants every module needs.
class Dimension {
 public:
  explicit Dimension(int n);

  int n() const noexcept { return n_; }
  /// (n-2)/2
  double delta() const noexcept { return delta_; }
  double delta_sq() const noexcept { return delta_ * delta_; }
  /// Coefficient n(n-2)/4 of the critical nonlinearity.
  double coupling() const noexcept { return coupling_; }
  /// Surface area of the unit (n-1)-sphere, 2 pi^{n/2} / Gamma(n/2).
  double sigma_sphere() const noexcept { return sigma_; }
  /// 2n/(n-2), the critical Sobolev exponent.
  double critical_exponent() const noexcept { return 2.0 * n_ / (n_ - 2.0); }

  /// Throws unless 3 <= n <= 5, the range required by the perturbed system.
  void require_low_dimension() const;

  friend bool operator==(const Dimension& a, const Dimension& b) { return a.n_ == b.n_; }

 private:
  int n_;
  double delta_;
  double coupling_;
  double sigma_;
};

/// Phase-space point of the cylindrical system: V = (v1, v2), W = dV/dt.
struct CylState {
  double t = 0.0;
  Vec2 v = Vec2::Zero();
  Vec2 w = Vec2::Zero();
};

/// Radial field data at radius r: the values u_i(r) and du_i/dr.
struct RadialSample {
  double r = 1.0;
  Vec2 u = Vec2::Zero();
  Vec2 du_dr = Vec2::Zero();
};

/// Unit vector Lambda in the closed positive quadrant S^1_+ and its
/// orthogonal companion (-Lambda_2, Lambda_1).
class Direction {
 public:
  /// Normalizes `v`; throws if it is zero or leaves the closed positive quadrant.
  static Direction from_vector(const Vec2& v);
  static Direction from_angle(double theta);

  const Vec2& lambda() const noexcept { return lambda_; }
  Vec2 lambda_bar() const noexcept { return {-lambda_.y(), lambda_.x()}; }
  /// Lambda_1 / Lambda_2, undefined on the ray Lambda_2 = 0.
  std::optional<double> eta() const;
  double angle() const;

 private:
  explicit Direction(const Vec2& v) : lambda_(v) {}
  Vec2 lambda_;
};

/// (|V|^2)^{2/(n-2)} = |V|^{4/(n-2)}, defined as 0 at the origin.
double critical_power(const Dimension& dim, double norm_sq);

CylState ball_to_cyl(const Dimension& dim, double r, const Vec2& u, const Vec2& du_dr);
RadialSample cyl_to_ball(const Dimension& dim, const CylState& state);

struct PhaseVelocity {
  Vec2 dv;
  Vec2 dw;
};

/// v_i'' = delta^2 v_i - n(n-2)/4 |V|^{4/(n-2)} v_i written as a first-order system.
PhaseVelocity limit_rhs(const Dimension& dim, const CylState& state);

/// H = 1/2 (|W|^2 - delta^2 |V|^2 + delta^2 |V|^{2n/(n-2)}); conserved by limit_rhs.
double hamiltonian(const Dimension& dim, const CylState& state);

/// Scalar energy w^2 - delta^2 v^2 + delta^2 v^{2n/(n-2)} of the single
/// equation. Twice `hamiltonian` for a state embedded on a coordinate ray.
double scalar_hamiltonian(const Dimension& dim, double v, double w);

/// f_i = -1/2 w_i^2 + delta^2/2 v_i^2 - delta^2/2 v_i^{2n/(n-2)} for component
/// `i` in {0, 1}.
double auxiliary_f(const Dimension& dim, const CylState& state, int i);

}  // namespace fowler
