#include "fowler/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fowler {

VectorField limit_system(const Dimension& dim) {
  return [dim](double t, const State& y, State& dydt) {
    const PhaseVelocity d = limit_rhs(dim, unpack(t, y));
    dydt << d.dv, d.dw;
  };
}

State pack(const CylState& s) {
  State y(4);
  y << s.v, s.w;
  return y;
}

CylState unpack(double t, const State& y) {
  CylState s;
  s.t = t;
  s.v = y.head<2>();
  s.w = y.segment<2>(2);
  return s;
}

Trajectory integrate_limit(const Dimension& dim, const CylState& ic, double t_end,
                           const IntegratorConfig& cfg) {
  const double limit = cfg.blowup_limit;
  const StopCondition guard = [limit](double, const State& y) {
    return y[0] < 0.0 || y[1] < 0.0 || std::abs(y[0]) > limit || std::abs(y[1]) > limit;
  };
  return integrate(limit_system(dim), pack(ic), {ic.t, t_end}, cfg, guard);
}

WronskianTrace wronskian_trace(const Trajectory& traj) {
  WronskianTrace out;
  out.times = traj.times();
  out.values.reserve(traj.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (const State& y : traj.states()) {
    const double c = y[2] * y[1] - y[0] * y[3];
    out.values.push_back(c);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    sum += c;
  }
  if (!out.values.empty()) {
    out.mean = sum / static_cast<double>(out.values.size());
    out.spread = hi - lo;
  }
  return out;
}

DirectionResult direction_of(const Trajectory& traj, double tolerance) {
  DirectionResult out;
  std::vector<Vec2> units;
  units.reserve(traj.size());
  Vec2 sum = Vec2::Zero();
  for (const State& y : traj.states()) {
    const Vec2 v = y.head<2>();
    const double norm = v.norm();
    if (!(norm > 0.0)) throw DomainError("ZERO_STATE", "|V| vanishes along the trajectory");
    units.push_back(v / norm);
    sum += units.back();
  }
  if (units.empty()) throw DomainError("EMPTY", "trajectory has no nodes");
  out.mean_direction = sum.normalized();
  for (const Vec2& u : units) {
    const double cross = out.mean_direction.x() * u.y() - out.mean_direction.y() * u.x();
    const double dot = out.mean_direction.dot(u);
    out.max_deviation = std::max(out.max_deviation, std::abs(std::atan2(cross, dot)));
  }
  if (out.max_deviation <= tolerance) {
    try {
      out.direction = Direction::from_vector(out.mean_direction);
    } catch (const DomainError&) {
      // A ray outside S^1_+ is not an admissible direction.
    }
  }
  return out;
}

Trajectory synthesize(const FowlerProfile& profile, const Direction& lambda, double shift, Interval span) {
  // The profile lives on (v, w); embed it as (v L1, v L2, w L1, w L2).
  Eigen::MatrixXd embed = Eigen::MatrixXd::Zero(4, 2);
  embed(0, 0) = lambda.lambda().x();
  embed(1, 0) = lambda.lambda().y();
  embed(2, 1) = lambda.lambda().x();
  embed(3, 1) = lambda.lambda().y();
  const Trajectory tiled = profile.periodic_samples({span.begin + shift, span.end + shift});
  Trajectory out = tiled.mapped(embed, shift);
  return out;
}

double limit_residual(const Dimension& dim, const Trajectory& traj, int samples) {
  double worst = 0.0;
  const Interval span = traj.span();
  for (int i = 0; i <= samples; ++i) {
    const double t = span.begin + span.length() * i / samples;
    const State y = traj(t);
    const State dy = traj.derivative(t);
    const PhaseVelocity f = limit_rhs(dim, unpack(t, y));
    const double r = (dy.head<2>() - f.dv).norm() + (dy.segment<2>(2) - f.dw).norm();
    worst = std::max(worst, r);
  }
  return worst;
}

ClassificationReport classify(const Trajectory& traj) {
  ClassificationReport report;
  const WronskianTrace wr = wronskian_trace(traj);
  report.wronskian_mean = wr.mean;
  report.wronskian_spread = wr.spread;
  report.truncated = traj.truncated();

  double inf_norm = std::numeric_limits<double>::infinity();
  double sup_norm = 0.0;
  std::array<double, 2> comp_min{inf_norm, inf_norm};
  std::array<double, 2> comp_sup{0.0, 0.0};
  for (const State& y : traj.states()) {
    const double norm = y.head<2>().norm();
    inf_norm = std::min(inf_norm, norm);
    sup_norm = std::max(sup_norm, norm);
    for (int i = 0; i < 2; ++i) {
      comp_min[i] = std::min(comp_min[i], y[i]);
      comp_sup[i] = std::max(comp_sup[i], std::abs(y[i]));
    }
  }
  report.c1 = inf_norm;
  report.c2 = sup_norm;
  for (int i = 0; i < 2; ++i) {
    if (comp_sup[i] <= kZeroComponentFloor) {
      report.components[i] = ComponentSign::zero;
    } else if (comp_min[i] > 0.0) {
      report.components[i] = ComponentSign::positive;
    } else {
      report.components[i] = ComponentSign::mixed;
    }
  }

  if (inf_norm > 0.0) {
    const DirectionResult dir = direction_of(traj);
    report.direction = dir.direction;
    report.max_angular_deviation = dir.max_deviation;
    if (dir.direction) report.eta = dir.direction->eta();
  }
  return report;
}

}  // namespace fowler
