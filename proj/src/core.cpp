#include "fowler/core.hpp"

#include <cmath>
#include <numbers>

namespace fowler {

Dimension::Dimension(int n) : n_(n) {
  if (n < 3) {
    throw DomainError("DIMENSION_RANGE", "dimension must satisfy n >= 3, got " + std::to_string(n));
  }
  delta_ = 0.5 * (n - 2);
  coupling_ = 0.25 * n * (n - 2);
  sigma_ = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

void Dimension::require_low_dimension() const {
  if (n_ > 5) {
    throw DomainError("DIMENSION_RANGE",
                      "the perturbed system is only supported for 3 <= n <= 5, got " +
                          std::to_string(n_));
  }
}

Direction Direction::from_vector(const Vec2& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("DIRECTION", "direction vector must be finite and nonzero");
  }
  Vec2 unit = v / norm;
  constexpr double kQuadrantSlack = 1e-12;
  if (unit.x() < -kQuadrantSlack || unit.y() < -kQuadrantSlack) {
    throw DomainError("DIRECTION", "direction must lie in the closed positive quadrant");
  }
  // Round-off below the slack is snapped onto the boundary ray.
  unit = unit.cwiseMax(0.0);
  return Direction(unit / unit.norm());
}

Direction Direction::from_angle(double theta) {
  return from_vector(Vec2(std::cos(theta), std::sin(theta)));
}

std::optional<double> Direction::eta() const {
  if (lambda_.y() > 0.0) return lambda_.x() / lambda_.y();
  return std::nullopt;
}

double Direction::angle() const { return std::atan2(lambda_.y(), lambda_.x()); }

double critical_power(const Dimension& dim, double norm_sq) {
  if (norm_sq <= 0.0) return 0.0;
  switch (dim.n()) {
    case 3:
      return norm_sq * norm_sq;
    case 4:
      return norm_sq;
    case 6:
      return std::sqrt(norm_sq);
    default:
      return std::pow(norm_sq, 2.0 / (dim.n() - 2));
  }
}

CylState ball_to_cyl(const Dimension& dim, double r, const Vec2& u, const Vec2& du_dr) {
  if (!(r > 0.0)) {
    throw DomainError("RADIUS", "radius must be positive");
  }
  const double delta = dim.delta();
  const double r_delta = std::pow(r, delta);
  CylState s;
  s.t = -std::log(r);
  s.v = r_delta * u;
  s.w = -delta * r_delta * u - r_delta * r * du_dr;
  return s;
}

RadialSample cyl_to_ball(const Dimension& dim, const CylState& state) {
  const double delta = dim.delta();
  RadialSample out;
  out.r = std::exp(-state.t);
  const double inv_r_delta = std::exp(delta * state.t);
  out.u = inv_r_delta * state.v;
  out.du_dr = -(inv_r_delta / out.r) * (delta * state.v + state.w);
  return out;
}

PhaseVelocity limit_rhs(const Dimension& dim, const CylState& state) {
  const double p = critical_power(dim, state.v.squaredNorm());
  return {state.w, (dim.delta_sq() - dim.coupling() * p) * state.v};
}

double hamiltonian(const Dimension& dim, const CylState& state) {
  const double norm_sq = state.v.squaredNorm();
  const double high = norm_sq * critical_power(dim, norm_sq);  // |V|^{2n/(n-2)}
  return 0.5 * (state.w.squaredNorm() - dim.delta_sq() * norm_sq + dim.delta_sq() * high);
}

double scalar_hamiltonian(const Dimension& dim, double v, double w) {
  const double v_sq = v * v;
  const double high = v_sq * critical_power(dim, v_sq);
  return w * w - dim.delta_sq() * v_sq + dim.delta_sq() * high;
}

double auxiliary_f(const Dimension& dim, const CylState& state, int i) {
  if (i != 0 && i != 1) {
    throw DomainError("COMPONENT", "component index must be 0 or 1");
  }
  const double v = state.v[i];
  const double w = state.w[i];
  const double v_sq = v * v;
  const double high = v_sq * critical_power(dim, v_sq);
  return -0.5 * w * w + 0.5 * dim.delta_sq() * v_sq - 0.5 * dim.delta_sq() * high;
}

}  // namespace fowler
