#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fowler/classifier.hpp"
#include "fowler/core.hpp"
#include "oracles.hpp"

using namespace fowler;

namespace {

CylState make_state(double v1, double v2, double w1, double w2, double t = 0.0) {
  CylState s;
  s.t = t;
  s.v = Vec2(v1, v2);
  s.w = Vec2(w1, w2);
  return s;
}

Eigen::Matrix2d rotation(double a) {
  Eigen::Matrix2d r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

}  // namespace

TEST_CASE("dimension constants") {
  for (int n = 3; n <= 8; ++n) {
    const Dimension d(n);
    CHECK(d.delta() == doctest::Approx((n - 2) / 2.0).epsilon(1e-15));
    CHECK(d.coupling() == doctest::Approx(n * (n - 2) / 4.0).epsilon(1e-15));
    CHECK(d.sigma_sphere() == doctest::Approx(oracle::sphere_area(n)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(Dimension(2), DomainError);
  CHECK_NOTHROW(Dimension(5).require_low_dimension());
  CHECK_THROWS_AS(Dimension(6).require_low_dimension(), DomainError);
}

TEST_CASE("critical power matches |V|^{4/(n-2)}") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int n = 3; n <= 7; ++n) {
    const Dimension d(n);
    CHECK(critical_power(d, 0.0) == 0.0);
    for (int k = 0; k < 50; ++k) {
      const double x = u(rng);
      CHECK(critical_power(d, x * x) == doctest::Approx(std::pow(x, 4.0 / (n - 2))).epsilon(1e-13));
    }
  }
}

TEST_CASE("direction invariants") {
  const Direction d = Direction::from_vector(Vec2(3.0, 4.0));
  CHECK(d.lambda().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(d.lambda().dot(d.lambda_bar())) <= 1e-15);
  REQUIRE(d.eta().has_value());
  CHECK(*d.eta() == doctest::Approx(0.75));
  CHECK_FALSE(Direction::from_vector(Vec2(1.0, 0.0)).eta().has_value());
  CHECK_THROWS_AS(Direction::from_vector(Vec2(0.0, 0.0)), DomainError);
  CHECK_THROWS_AS(Direction::from_vector(Vec2(-0.5, 1.0)), DomainError);
  CHECK(Direction::from_angle(0.3).angle() == doctest::Approx(0.3));
}

TEST_CASE("ball to cylinder maps the n = 3 bubble onto cosh^{-1/2}") {
  const Dimension d(3);
  for (double r : {0.01, 0.2, 0.5, 0.9, 1.0}) {
    const double base = 2.0 / (1.0 + r * r);
    const double u = std::sqrt(base);
    const double du = 0.5 / std::sqrt(base) * (-4.0 * r / ((1.0 + r * r) * (1.0 + r * r)));
    const CylState s = ball_to_cyl(d, r, Vec2(u, 0.0), Vec2(du, 0.0));
    const double t = -std::log(r);
    CHECK(s.t == doctest::Approx(t));
    CHECK(std::abs(s.v.x() - oracle::bubble(3, t)) <= 1e-13);
    CHECK(std::abs(s.w.x() - oracle::bubble_slope(3, t)) <= 1e-13);
  }
}

TEST_CASE("ball to cylinder of the n = 4 bubble with lambda = 1/2") {
  const Dimension d(4);
  const Vec2 lambda = Vec2(0.6, 0.8);
  for (double r : {0.05, 0.3, 0.7, 1.0}) {
    const double u = 1.0 / (1.0 + r * r / 4.0);
    const double du = -(r / 2.0) / ((1.0 + r * r / 4.0) * (1.0 + r * r / 4.0));
    const CylState s = ball_to_cyl(d, r, u * lambda, du * lambda);
    const double t = -std::log(r);
    const Vec2 expected = lambda / (std::exp(t) + 0.25 * std::exp(-t));
    CHECK((s.v - expected).norm() <= 1e-13);
  }
}

TEST_CASE("ball to cylinder edge cases") {
  const Dimension d(4);
  const CylState zero = ball_to_cyl(d, 0.3, Vec2::Zero(), Vec2::Zero());
  CHECK(zero.v.norm() == 0.0);
  CHECK(zero.w.norm() == 0.0);
  CHECK_THROWS_AS(ball_to_cyl(d, 0.0, Vec2(1, 0), Vec2::Zero()), DomainError);
  CHECK_THROWS_AS(ball_to_cyl(d, -1.0, Vec2(1, 0), Vec2::Zero()), DomainError);

  const RadialSample unit = cyl_to_ball(d, make_state(1.0, 0.0, 0.0, 0.0));
  CHECK(unit.r == doctest::Approx(1.0));
  CHECK((unit.u - Vec2(1.0, 0.0)).norm() <= 1e-15);
}

TEST_CASE("ball and cylinder round trip for random states") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  std::uniform_real_distribution<double> sgn(-1.0, 1.0);
  std::uniform_real_distribution<double> time(0.0, 8.0);
  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    for (int k = 0; k < 200; ++k) {
      const CylState s = make_state(pos(rng), pos(rng), sgn(rng), sgn(rng), time(rng));
      const RadialSample b = cyl_to_ball(d, s);
      const CylState back = ball_to_cyl(d, b.r, b.u, b.du_dr);
      CHECK(std::abs(back.t - s.t) <= 1e-12);
      CHECK((back.v - s.v).norm() <= 1e-12);
      CHECK((back.w - s.w).norm() <= 1e-12);
    }
  }
}

TEST_CASE("limit rhs values") {
  const Dimension d3(3);
  const PhaseVelocity f = limit_rhs(d3, make_state(0.3, 0.4, 0.0, 0.0));
  CHECK(f.dw.x() == doctest::Approx(0.0609375).epsilon(1e-14));
  CHECK(f.dw.y() == doctest::Approx(0.25 * 0.4 - 0.75 * std::pow(0.5, 4) * 0.4).epsilon(1e-14));
  CHECK(f.dv.norm() == 0.0);

  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    const Vec2 lambda = Direction::from_angle(0.4).lambda();
    const CylState eq = make_state(oracle::necksize(n) * lambda.x(), oracle::necksize(n) * lambda.y(), 0, 0);
    const PhaseVelocity g = limit_rhs(d, eq);
    CHECK(g.dv.norm() == 0.0);
    CHECK(g.dw.norm() <= 1e-15);
    const PhaseVelocity z = limit_rhs(d, make_state(0, 0, 0, 0));
    CHECK(z.dw.norm() == 0.0);
  }
}

TEST_CASE("limit rhs and hamiltonian are rotation equivariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    for (int k = 0; k < 100; ++k) {
      const CylState s = make_state(u(rng), u(rng), u(rng), u(rng));
      const Eigen::Matrix2d r = rotation(3.0 * u(rng));
      CylState rs = s;
      rs.v = r * s.v;
      rs.w = r * s.w;
      const PhaseVelocity a = limit_rhs(d, rs);
      const PhaseVelocity b = limit_rhs(d, s);
      CHECK((a.dv - r * b.dv).norm() <= 1e-12);
      CHECK((a.dw - r * b.dw).norm() <= 1e-12);
      CHECK(std::abs(hamiltonian(d, rs) - hamiltonian(d, s)) <= 1e-12);
    }
  }
}

TEST_CASE("hamiltonian values") {
  CHECK(hamiltonian(Dimension(4), make_state(0, 0, 0, 0)) == 0.0);
  const Vec2 lambda = Direction::from_angle(0.7).lambda();
  CylState cyl;
  cyl.v = lambda / std::sqrt(2.0);
  CHECK(hamiltonian(Dimension(4), cyl) == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK(std::abs(hamiltonian(Dimension(3), make_state(1, 0, 0, 0))) <= 1e-15);
}

TEST_CASE("scalar hamiltonian values and relation to the vector form") {
  CHECK(scalar_hamiltonian(Dimension(4), 0.0, 0.0) == 0.0);
  CHECK(scalar_hamiltonian(Dimension(4), 1.0 / std::sqrt(2.0), 0.0) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(scalar_hamiltonian(Dimension(4), 1.0 / std::sqrt(2.0), 0.0) ==
        doctest::Approx(oracle::cylinder_energy(4)).epsilon(1e-14));
  CHECK(scalar_hamiltonian(Dimension(5), std::pow(0.6, 0.75), 0.0) ==
        doctest::Approx(-1.5 * std::pow(0.6, 2.5)).epsilon(1e-13));
  CHECK(scalar_hamiltonian(Dimension(5), std::pow(0.6, 0.75), 0.0) == doctest::Approx(-0.418282).epsilon(1e-6));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 3; n <= 6; ++n) {
    const Dimension d(n);
    for (int k = 0; k < 50; ++k) {
      const double v = u(rng);
      const double w = u(rng) - 0.5;
      CHECK(scalar_hamiltonian(d, v, w) == doctest::Approx(oracle::scalar_energy(n, v, w)).epsilon(1e-13));
      CHECK(scalar_hamiltonian(d, v, w) == 2.0 * hamiltonian(d, make_state(v, 0.0, w, 0.0)));
      CHECK(scalar_hamiltonian(d, v, w) == 2.0 * hamiltonian(d, make_state(0.0, v, 0.0, w)));
    }
  }
}

TEST_CASE("auxiliary functions") {
  CHECK(auxiliary_f(Dimension(4), make_state(0, 0, 0, 0), 0) == 0.0);
  CHECK(auxiliary_f(Dimension(4), make_state(1.0 / std::sqrt(2.0), 0, 0, 0), 0) == doctest::Approx(0.125));
  CHECK_THROWS_AS(auxiliary_f(Dimension(4), make_state(0, 0, 0, 0), 2), DomainError);
}

TEST_CASE("auxiliary function derivative along the limit flow") {
  // d f_i / dt = n(n-2)/4 (|V|^{4/(n-2)} - v_i^{4/(n-2)}) v_i w_i, checked by
  // differencing f_i along an integrated trajectory.
  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    const CylState ic = make_state(0.3, 0.2, 0.05, -0.02);
    const IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(1e-12, 1e-14);
    const Trajectory traj = integrate_limit(d, ic, 3.0, cfg);
    const double span = traj.t_end();
    const double h = 1e-4;
    for (int k = 1; k < 20; ++k) {
      const double t = span * k / 20.0;
      const CylState s = unpack(t, traj(t));
      for (int i = 0; i < 2; ++i) {
        const double fd = (auxiliary_f(d, unpack(t + h, traj(t + h)), i) - auxiliary_f(d, unpack(t - h, traj(t - h)), i)) /
                          (2.0 * h);
        const double vi = s.v[i];
        const double expected = n * (n - 2) / 4.0 *
                                (std::pow(s.v.norm(), 4.0 / (n - 2)) - std::pow(vi, 4.0 / (n - 2))) * vi * s.w[i];
        CHECK(std::abs(fd - expected) <= 1e-7);
      }
    }
  }
}

TEST_CASE("auxiliary function decreases while the component decreases on a Fowler-type solution") {
  const Dimension d(4);
  const IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(1e-12, 1e-14);
  const FowlerProfile profile = profile_from_necksize(d, 0.3, cfg);
  const Direction lambda = Direction::from_vector(Vec2(0.6, 0.8));
  const double period = profile.period();
  const Trajectory traj = synthesize(profile, lambda, 0.0, {0.0, 2.0 * period});
  const auto maxima = find_events(
      traj, [](double, const State& y) { return y[2]; }, EventDirection::falling);
  REQUIRE(!maxima.empty());
  for (int i = 0; i < 2; ++i) {
    const double t_max = maxima.front();
    const double f_at_max = auxiliary_f(d, unpack(t_max, traj(t_max)), i);
    const double f_at_min = auxiliary_f(d, unpack(period, traj(period)), i);
    CHECK(f_at_max > f_at_min);
  }
}
