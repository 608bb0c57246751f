#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fowler/classifier.hpp"
#include "fowler/fowler_profile.hpp"
#include "fowler/integrator.hpp"
#include "oracles.hpp"

using namespace fowler;

namespace {

State vec(std::initializer_list<double> xs) {
  State y(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) y[i++] = x;
  return y;
}

const VectorField kOscillator = [](double, const State& y, State& dy) {
  dy[0] = y[1];
  dy[1] = -y[0];
};

double cosh_error(double rel_tol) {
  const Dimension d(3);
  const IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(rel_tol, rel_tol * 1e-2);
  const Trajectory fwd = integrate(scalar_fowler_rhs(d), vec({1.0, 0.0}), {0.0, 5.0}, cfg);
  const Trajectory bwd = integrate(scalar_fowler_rhs(d), vec({1.0, 0.0}), {0.0, -5.0}, cfg);
  double err = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = -5.0 + 10.0 * i / 1000.0;
    const double v = t >= 0.0 ? fwd(t)[0] : bwd(t)[0];
    err = std::max(err, std::abs(v - oracle::bubble(3, t)));
  }
  return err;
}

}  // namespace

TEST_CASE("config validation") {
  IntegratorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(cfg.with_tolerances(1e-2, 1e-4).validate(), DomainError);
  CHECK_THROWS_AS(cfg.with_tolerances(1e-8, 1e-6).validate(), DomainError);
  CHECK_THROWS_AS(cfg.with_tolerances(0.0, 0.0).validate(), DomainError);
  IntegratorConfig bad = cfg;
  bad.max_step = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(integrate(kOscillator, vec({1, 0}), {1.0, 1.0}, cfg), DomainError);
}

TEST_CASE("scalar Fowler equation reproduces cosh^{-1/2} for n = 3") {
  CHECK(cosh_error(1e-10) <= 1e-6);
}

TEST_CASE("halving the step reduces the closed-form error at least fourfold") {
  // Loose tolerances so that max_step sets the step size.
  const Dimension d(3);
  double previous = 0.0;
  for (double h : {0.5, 0.25, 0.125}) {
    IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(1e-3, 1e-3);
    cfg.max_step = h;
    const Trajectory traj = integrate(scalar_fowler_rhs(d), vec({1.0, 0.0}), {0.0, 5.0}, cfg);
    double err = 0.0;
    for (int i = 0; i <= 500; ++i) {
      const double t = 5.0 * i / 500.0;
      err = std::max(err, std::abs(traj(t)[0] - oracle::bubble(3, t)));
    }
    if (previous > 0.0) CHECK(4.0 * err <= previous);
    previous = err;
  }
}

TEST_CASE("tightening the tolerance a hundredfold reduces the closed-form error") {
  CHECK(4.0 * cosh_error(1e-8) <= cosh_error(1e-6));
  CHECK(4.0 * cosh_error(1e-10) <= cosh_error(1e-8));
}

TEST_CASE("harmonic oscillator closes after one period") {
  const IntegratorConfig cfg;
  const Trajectory traj = integrate(kOscillator, vec({1, 0}), {0.0, 2.0 * std::numbers::pi}, cfg);
  const State end = traj(2.0 * std::numbers::pi);
  CHECK(std::abs(end[0] - 1.0) <= 1e-8);
  CHECK(std::abs(end[1]) <= 1e-8);
  for (int i = 0; i <= 97; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 97.0;
    CHECK(std::abs(traj(t)[0] - std::cos(t)) <= 1e-8);
    CHECK(std::abs(traj.derivative(t)[0] + std::sin(t)) <= 1e-8);
  }
}

TEST_CASE("dense output agrees with a fine fixed-step reference between nodes") {
  const Dimension d(4);
  const IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(1e-11, 1e-13);
  const Trajectory traj = integrate(scalar_fowler_rhs(d), vec({0.2, 0.05}), {0.0, 6.0}, cfg);
  const auto f = [](double, const oracle::Vec<2>& y) { return oracle::Vec<2>{y[1], oracle::scalar_accel(4, y[0])}; };
  for (double t : {0.37, 1.91, 3.14159, 4.4444, 5.999}) {
    const oracle::Vec<2> ref = oracle::rk4<2>(f, {0.2, 0.05}, 0.0, t, 20000);
    CHECK(std::abs(traj(t)[0] - ref[0]) <= 1e-9);
    CHECK(std::abs(traj(t)[1] - ref[1]) <= 1e-9);
  }
}

TEST_CASE("cylinder equilibrium stays constant") {
  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    CylState ic;
    ic.v = oracle::necksize(n) * Direction::from_angle(0.9).lambda();
    const Trajectory traj = integrate(limit_system(d), pack(ic), {0.0, 50.0}, IntegratorConfig{});
    for (const State& y : traj.states()) CHECK((y - pack(ic)).norm() <= 1e-10);
  }
}

TEST_CASE("trajectory span, nodes and out-of-span evaluation") {
  const Trajectory fwd = integrate(kOscillator, vec({1, 0}), {0.0, 3.0}, IntegratorConfig{});
  CHECK(fwd.t_begin() == 0.0);
  CHECK(fwd.t_end() == doctest::Approx(3.0).epsilon(1e-15));
  for (std::size_t k = 1; k < fwd.size(); ++k) CHECK(fwd.times()[k] > fwd.times()[k - 1]);
  CHECK_THROWS_AS(fwd(3.1), OutOfSpan);
  CHECK_THROWS_AS(fwd(-0.1), OutOfSpan);

  const Trajectory bwd = integrate(kOscillator, vec({1, 0}), {0.0, -3.0}, IntegratorConfig{});
  CHECK(bwd.t_begin() == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(bwd.t_end() == 0.0);
  for (std::size_t k = 1; k < bwd.size(); ++k) CHECK(bwd.times()[k] > bwd.times()[k - 1]);
  CHECK(std::abs(bwd(-2.0)[0] - std::cos(2.0)) <= 1e-8);
}

TEST_CASE("step exhaustion and blow-up are reported with the last time") {
  IntegratorConfig few;
  few.max_steps = 5;
  CHECK_THROWS_AS(integrate(kOscillator, vec({1, 0}), {0.0, 100.0}, few), IntegrationError);

  const VectorField riccati = [](double, const State& y, State& dy) { dy[0] = y[0] * y[0]; };
  try {
    (void)integrate(riccati, vec({1.0}), {0.0, 2.0}, IntegratorConfig{});
    FAIL("expected blow-up");
  } catch (const IntegrationError& e) {
    CHECK(e.last_time() <= 1.0 + 1e-6);
    CHECK(e.last_time() > 0.99);
  }
}

TEST_CASE("stop condition truncates and flags") {
  const StopCondition guard = [](double, const State& y) { return y[0] < 0.0; };
  const Trajectory traj = integrate(kOscillator, vec({1, 0}), {0.0, 10.0}, IntegratorConfig{}, guard);
  CHECK(traj.truncated());
  CHECK(traj.t_end() < 3.0);
  CHECK(traj.t_end() > std::numbers::pi / 2);
}

TEST_CASE("events: zeros of cos") {
  IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(1e-12, 1e-14);
  const Trajectory traj = integrate(kOscillator, vec({1, 0}), {0.0, 10.0}, cfg);
  const EventFunction value = [](double, const State& y) { return y[0]; };
  const auto any = find_events(traj, value, EventDirection::any);
  REQUIRE(any.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(any[k] - (k + 0.5) * std::numbers::pi) <= 1e-9);
  const auto falling = find_events(traj, value, EventDirection::falling);
  const auto rising = find_events(traj, value, EventDirection::rising);
  REQUIRE(falling.size() == 2);
  REQUIRE(rising.size() == 1);
  CHECK(std::abs(rising[0] - 1.5 * std::numbers::pi) <= 1e-9);

  const Trajectory flat = integrate([](double, const State&, State& dy) { dy[0] = 0.0; }, vec({1.0}), {0.0, 5.0}, cfg);
  CHECK(find_events(flat, value, EventDirection::any).empty());
}

TEST_CASE("events: maxima of a Fowler profile are one period apart") {
  const Dimension d(3);
  const IntegratorConfig cfg;
  const FowlerProfile profile = profile_from_necksize(d, 0.2, cfg);
  const Trajectory traj = integrate(scalar_fowler_rhs(d), vec({0.2, 0.0}), {0.0, 4.5 * profile.period()}, cfg);
  const auto maxima = find_events(traj, [](double, const State& y) { return y[1]; }, EventDirection::falling);
  REQUIRE(maxima.size() >= 4);
  for (std::size_t k = 1; k < maxima.size(); ++k) {
    CHECK(std::abs(maxima[k] - maxima[k - 1] - profile.period()) <= 1e-6);
  }
}

TEST_CASE("monodromy of constant coefficients") {
  const IntegratorConfig cfg;
  const Monodromy rot = monodromy([](double) { return 1.0; }, 2.0 * std::numbers::pi, cfg);
  CHECK((rot.matrix - Eigen::Matrix2d::Identity()).norm() <= 1e-8);
  CHECK(std::abs(rot.det - 1.0) <= 1e-8);
  for (const auto& mu : rot.multipliers) CHECK(std::abs(mu - 1.0) <= 1e-4);

  for (double period : {0.5, 2.0, 7.0}) {
    const Monodromy hyp = monodromy([](double) { return -1.0; }, period, cfg);
    Eigen::Matrix2d expected;
    expected << std::cosh(period), std::sinh(period), std::sinh(period), std::cosh(period);
    CHECK((hyp.matrix - expected).norm() <= 1e-8 * expected.norm());
    CHECK(std::abs(hyp.det - 1.0) <= 1e-8);
    const double big = std::max(std::abs(hyp.multipliers[0]), std::abs(hyp.multipliers[1]));
    const double small = std::min(std::abs(hyp.multipliers[0]), std::abs(hyp.multipliers[1]));
    CHECK(big == doctest::Approx(std::exp(period)).epsilon(1e-9));
    CHECK(small == doctest::Approx(std::exp(-period)).epsilon(1e-9));
    CHECK(std::abs(big * small - 1.0) <= 1e-8);
  }
  CHECK_THROWS_AS(monodromy([](double) { return 1.0; }, 0.0, cfg), DomainError);
}

TEST_CASE("multipliers from trace and determinant") {
  const auto real = multipliers_from(1e8 + 1e-8, 1.0);
  CHECK(std::abs(real[0].real() * real[1].real() - 1.0) <= 1e-12);
  const auto unit = multipliers_from(2.0 * std::cos(0.3), 1.0);
  CHECK(std::abs(std::abs(unit[0]) - 1.0) <= 1e-14);
  CHECK(std::abs(std::arg(unit[0])) == doctest::Approx(0.3));
}

TEST_CASE("energy drift over ten periods") {
  const IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(1e-10, 1e-12);
  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    for (double frac : {0.05, 0.2, 0.5, 0.9, 0.99}) {
      const double eps = frac * oracle::necksize(n);
      const FowlerProfile profile = profile_from_necksize(d, eps, cfg);
      const Trajectory traj = integrate(scalar_fowler_rhs(d), vec({eps, 0.0}), {0.0, 10.0 * profile.period()}, cfg);
      const double h0 = oracle::scalar_energy(n, eps, 0.0);
      for (const State& y : traj.states()) CHECK(std::abs(oracle::scalar_energy(n, y[0], y[1]) - h0) <= 1e-8);
    }
  }
}
