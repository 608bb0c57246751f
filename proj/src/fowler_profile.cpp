#include "fowler/fowler_profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fowler {

namespace {

constexpr double kPeriodicityTol = 1e-7;
constexpr double kMinimumTol = 1e-8;

std::string describe(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

double cylinder_necksize(const Dimension& dim) {
  const double n = dim.n();
  return std::pow((n - 2.0) / n, (n - 2.0) / 4.0);
}

double cylinder_energy(const Dimension& dim) {
  const double n = dim.n();
  return -0.5 * (n - 2.0) * std::pow((n - 2.0) / n, 0.5 * n);
}

VectorField scalar_fowler_rhs(const Dimension& dim) {
  return [dim](double, const State& y, State& dydt) {
    const double v = y[0];
    dydt[0] = y[1];
    dydt[1] = (dim.delta_sq() - dim.coupling() * critical_power(dim, v * v)) * v;
  };
}

FowlerProfile::FowlerProfile(Dimension dim, double eps, double period, double energy,
                             double max_value, Trajectory one_period)
    : dim_(dim),
      eps_(eps),
      period_(period),
      energy_(energy),
      max_value_(max_value),
      samples_(std::move(one_period)) {}

Vec2 FowlerProfile::state(double t) const {
  double local = std::fmod(t, period_);
  if (local < 0.0) local += period_;
  const State y = samples_(std::min(local, period_));
  return {y[0], y[1]};
}

Trajectory FowlerProfile::periodic_samples(Interval span) const {
  return samples_.periodic_extension(period_, span);
}

FowlerProfile profile_from_necksize(const Dimension& dim, double eps, const IntegratorConfig& cfg) {
  const double eps_cyl = cylinder_necksize(dim);
  if (!(eps > 0.0 && eps < eps_cyl)) {
    throw DomainError("NECKSIZE_RANGE", "necksize must lie in (0, " + describe(eps_cyl) +
                                            "), got " + describe(eps));
  }
  const VectorField rhs = scalar_fowler_rhs(dim);
  State y0(2);
  y0 << eps, 0.0;

  const EventFunction slope = [](double, const State& y) { return y[1]; };

  double horizon = 8.0;
  double period = 0.0;
  constexpr double kMaxHorizon = 4096.0;
  while (period == 0.0) {
    const Trajectory probe = integrate(rhs, y0, {0.0, horizon}, cfg);
    const auto minima = find_events(probe, slope, EventDirection::rising);
    if (!minima.empty()) {
      period = minima.front();
      break;
    }
    horizon *= 2.0;
    if (horizon > kMaxHorizon) {
      throw DomainError("PERIOD_DETECTION", "no return to the minimum detected for eps = " + describe(eps));
    }
  }

  Trajectory one_period = integrate(rhs, y0, {0.0, period}, cfg);

  // Invariants: the minimum is eps, v stays below 1, and one more period
  // reproduces the first.
  const State end = one_period(period);
  if (std::abs(end[0] - eps) > kMinimumTol) {
    throw DomainError("PERIOD_DETECTION", "profile does not return to its minimum: |v(T) - eps| = " +
                                              describe(std::abs(end[0] - eps)));
  }
  const auto maxima = find_events(one_period, slope, EventDirection::falling);
  if (maxima.size() != 1) {
    throw DomainError("PERIOD_DETECTION", "expected exactly one maximum per period");
  }
  const double max_value = one_period.component(maxima.front(), 0);
  if (!(max_value < 1.0)) {
    throw DomainError("PROFILE_BOUND", "profile maximum " + describe(max_value) + " is not below 1");
  }
  const Trajectory next = integrate(rhs, end, {period, 2.0 * period}, cfg);
  constexpr int kChecks = 64;
  for (int i = 0; i <= kChecks; ++i) {
    const double t = period * i / kChecks;
    if (std::abs(next.component(t + period, 0) - one_period.component(t, 0)) > kPeriodicityTol) {
      throw DomainError("PERIOD_DETECTION", "profile is not periodic within tolerance for eps = " + describe(eps));
    }
  }

  return FowlerProfile(dim, eps, period, scalar_hamiltonian(dim, eps, 0.0), max_value,
                       std::move(one_period));
}

double necksize_from_energy(const Dimension& dim, double energy) {
  const double low = cylinder_energy(dim);
  if (!(energy > low && energy < 0.0)) {
    throw DomainError("ENERGY_RANGE", "energy must lie in (" + describe(low) + ", 0), got " + describe(energy));
  }
  // H(e, 0) decreases from 0 to the cylinder energy on (0, eps_cyl).
  double a = 0.0;
  double b = cylinder_necksize(dim);
  for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
    const double m = 0.5 * (a + b);
    if (scalar_hamiltonian(dim, m, 0.0) > energy) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

Trajectory spherical_profile(const Dimension& dim, double half_width, double step) {
  if (!(half_width > 0.0) || !(step > 0.0)) {
    throw DomainError("SPAN", "spherical profile needs positive half width and step");
  }
  const auto count = static_cast<std::size_t>(std::ceil(2.0 * half_width / step));
  std::vector<double> times;
  std::vector<State> values;
  std::vector<State> ders;
  times.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(count);
    const double v = std::pow(std::cosh(t), -dim.delta());
    const double w = -dim.delta() * std::tanh(t) * v;
    State y(2);
    y << v, w;
    State dy(2);
    dy << w, (dim.delta_sq() - dim.coupling() * critical_power(dim, v * v)) * v;
    times.push_back(t);
    values.push_back(std::move(y));
    ders.push_back(std::move(dy));
  }
  return Trajectory::from_samples(times, values, ders);
}

}  // namespace fowler
