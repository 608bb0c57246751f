#include "fowler/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fowler {

const char* to_string(SignClass s) {
  switch (s) {
    case SignClass::negative:
      return "negative";
    case SignClass::zero:
      return "zero";
    case SignClass::positive:
      return "positive";
  }
  return "zero";
}

double p_cyl(const Dimension& dim, const CylState& state) {
  return dim.sigma_sphere() * hamiltonian(dim, state);
}

double p_ball_radial(const Dimension& dim, const RadialSample& sample) {
  if (!(sample.r > 0.0)) throw DomainError("RADIUS", "Pohozaev integral needs r > 0");
  const double r = sample.r;
  const double delta = dim.delta();
  const Vec2& u = sample.u;
  const Vec2& ur = sample.du_dr;
  // Radial field: grad u = u_r nu, so |grad u|^2 = |d_nu u|^2 = |u_r|^2.
  const double grad_sq = ur.squaredNorm();
  const double density = delta * u.dot(ur) - 0.5 * r * grad_sq + r * grad_sq +
                         0.5 * r * dim.delta_sq() * std::pow(u.squaredNorm(), 0.5 * dim.critical_exponent());
  return dim.sigma_sphere() * std::pow(r, dim.n() - 1) * density;
}

DriftCheck p_drift(const PerturbedRun& run, double r, double s) {
  if (!(0.0 < s && s <= r && r <= 1.0)) {
    throw DomainError("RADIUS", "p_drift needs 0 < s <= r <= 1");
  }
  const double t_r = -std::log(r);
  const double t_s = -std::log(s);
  const Trajectory& traj = run.trajectory;
  const Interval span = traj.span();
  const double slack = 1e-12 * (1.0 + std::abs(t_s));
  if (t_r < span.begin - slack || t_s > span.end + slack) {
    throw DomainError("SPAN", "annulus not covered by the run");
  }
  const auto state_at = [&](double t) {
    const State y = traj(std::clamp(t, span.begin, span.end));
    CylState c;
    c.t = t;
    c.v = y.head<2>();
    c.w = y.segment<2>(2);
    return c;
  };
  DriftCheck out;
  out.lhs = p_ball_radial(run.dim, cyl_to_ball(run.dim, state_at(t_r))) -
            p_ball_radial(run.dim, cyl_to_ball(run.dim, state_at(t_s)));
  if (!run.potential.is_zero() && t_s > t_r) {
    const PotentialSpec& spec = run.potential;
    const auto integrand = [&](double t) {
      const CylState c = state_at(t);
      const double rho = std::exp(-t);
      return rho * rho * c.w.dot(spec.at(rho) * c.v);
    };
    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
    out.rhs = -run.dim.sigma_sphere() * Quadrature::integrate(integrand, t_r, t_s, 20, 1e-13);
  }
  out.residual = std::abs(out.lhs - out.rhs) / std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-14});
  return out;
}

PohozaevReport p_invariant(const PerturbedRun& run) {
  constexpr double kMinSpan = 3.0;
  constexpr std::size_t kMinSamples = 30;
  if (run.times.size() < kMinSamples || run.times.back() - run.times.front() < kMinSpan) {
    throw DomainError("SHORT_RUN", "run too short to estimate the Pohozaev limit");
  }
  const double sigma = run.dim.sigma_sphere();
  PohozaevReport report;
  report.values.reserve(run.times.size());
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    report.values.emplace_back(run.times[k], sigma * run.psi[k]);
  }
  const double t0 = run.times.front();
  const double third = (run.times.back() - t0) / 3.0;
  const double tail_begin = t0 + 2.0 * third;
  const double middle_begin = t0 + third;

  double tail_lo = std::numeric_limits<double>::infinity();
  double tail_hi = -tail_lo;
  double mid_lo = tail_lo;
  double mid_hi = -tail_lo;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [t, p] : report.values) {
    if (t >= tail_begin) {
      tail_lo = std::min(tail_lo, p);
      tail_hi = std::max(tail_hi, p);
      sum += p;
      ++count;
    } else if (t >= middle_begin) {
      mid_lo = std::min(mid_lo, p);
      mid_hi = std::max(mid_hi, p);
    }
  }
  if (count < 3 || mid_hi < mid_lo) {
    throw DomainError("SHORT_RUN", "run too short to estimate the Pohozaev limit");
  }
  report.cauchy_spread = tail_hi - tail_lo;
  const double mid_spread = mid_hi - mid_lo;
  const double noise = 1e-3 * kPohozaevZeroBand * sigma;
  if (report.cauchy_spread > std::max(mid_spread, noise)) {
    throw DomainError("SHORT_RUN", "Pohozaev series is not settling; extend the run");
  }
  report.limit_estimate = sum / static_cast<double>(count);
  report.sign = classify_sign(run.dim, report.limit_estimate);
  return report;
}

SignClass classify_sign(const Dimension& dim, double p) {
  const double band = kPohozaevZeroBand * dim.sigma_sphere();
  if (p < -band) return SignClass::negative;
  if (p > band) return SignClass::positive;
  return SignClass::zero;
}

}  // namespace fowler
