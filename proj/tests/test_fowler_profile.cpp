#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fowler/fowler_profile.hpp"
#include "oracles.hpp"

using namespace fowler;

TEST_CASE("cylinder necksize and energy endpoints") {
  CHECK(std::abs(cylinder_necksize(Dimension(3)) - 0.759836) <= 1e-6);
  CHECK(std::abs(cylinder_necksize(Dimension(4)) - 0.707107) <= 1e-6);
  CHECK(std::abs(cylinder_necksize(Dimension(5)) - 0.681732) <= 1e-6);
  CHECK(cylinder_energy(Dimension(4)) == doctest::Approx(-0.25).epsilon(1e-15));
  for (int n = 3; n <= 8; ++n) {
    const Dimension d(n);
    CHECK(std::abs(cylinder_necksize(d) - oracle::necksize(n)) <= 1e-15);
    CHECK(std::abs(cylinder_energy(d) - oracle::cylinder_energy(n)) <= 1e-14);
    CHECK(std::abs(scalar_hamiltonian(d, cylinder_necksize(d), 0.0) - cylinder_energy(d)) <= 1e-14);
  }
}

TEST_CASE("profile invariants on a grid") {
  const IntegratorConfig cfg;
  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    const double eps_cyl = oracle::necksize(n);
    for (double frac : {0.01, 0.03, 0.1, 0.3, 0.6, 0.9, 0.99}) {
      const double eps = frac * eps_cyl;
      const FowlerProfile p = profile_from_necksize(d, eps, cfg);
      CHECK(p.eps() == eps);
      CHECK(p.max_value() < 1.0);
      CHECK(p.energy() == doctest::Approx(oracle::scalar_energy(n, eps, 0.0)).epsilon(1e-10));
      double lo = 1.0;
      for (int i = 0; i <= 400; ++i) {
        const double t = p.period() * i / 400.0;
        lo = std::min(lo, p.value(t));
        CHECK(p.value(t) > 0.0);
        CHECK(p.value(t) < 1.0);
        CHECK(std::abs(p.value(t + p.period()) - p.value(t)) <= 1e-7);
      }
      CHECK(std::abs(lo - eps) <= 1e-8);
      // phase convention: minimum at t = 0 with v'' > 0
      CHECK(std::abs(p.slope(0.0)) <= 1e-12);
      CHECK(oracle::scalar_accel(n, eps) > 0.0);
    }
  }
}

TEST_CASE("period agrees with an independent quadrature") {
  const IntegratorConfig cfg = IntegratorConfig{}.with_tolerances(1e-12, 1e-14);
  for (int n = 3; n <= 5; ++n) {
    for (double frac : {0.1, 0.4, 0.8}) {
      const double eps = frac * oracle::necksize(n);
      const FowlerProfile p = profile_from_necksize(Dimension(n), eps, cfg);
      CHECK(p.period() == doctest::Approx(oracle::period(n, eps)).epsilon(1e-6));
    }
  }
}

TEST_CASE("period tends to the linearized value near the cylinder") {
  const double limits[] = {6.28319, 4.44288, 3.62760};
  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    const FowlerProfile p = profile_from_necksize(d, 0.999 * oracle::necksize(n), IntegratorConfig{});
    const double limit = 2.0 * std::numbers::pi / std::sqrt(n - 2.0);
    CHECK(std::abs(limit - limits[n - 3]) <= 1e-5);
    CHECK(std::abs(p.period() / limit - 1.0) <= 0.01);
  }
}

TEST_CASE("period is monotone decreasing on a grid") {
  const Dimension d(4);
  double previous = INFINITY;
  for (int k = 1; k <= 12; ++k) {
    const double eps = std::exp(std::log(0.01) + (std::log(0.99) - std::log(0.01)) * k / 12.0) * oracle::necksize(4);
    const double period = profile_from_necksize(d, eps, IntegratorConfig{}).period();
    CHECK(std::isfinite(period));
    CHECK(period < previous);
    previous = period;
  }
}

TEST_CASE("eps = 0.5, n = 4") {
  const FowlerProfile p = profile_from_necksize(Dimension(4), 0.5, IntegratorConfig{});
  CHECK(p.max_value() < 1.0);
  CHECK(std::abs(p.value(0.0) - 0.5) <= 1e-8);
}

TEST_CASE("necksize range errors") {
  const Dimension d(4);
  CHECK_THROWS_AS(profile_from_necksize(d, 0.0, IntegratorConfig{}), DomainError);
  CHECK_THROWS_AS(profile_from_necksize(d, -0.1, IntegratorConfig{}), DomainError);
  CHECK_THROWS_AS(profile_from_necksize(d, cylinder_necksize(d), IntegratorConfig{}), DomainError);
  try {
    (void)profile_from_necksize(d, 0.8, IntegratorConfig{});
    FAIL("expected NECKSIZE_RANGE");
  } catch (const DomainError& e) {
    CHECK(e.code() == "NECKSIZE_RANGE");
  }
}

TEST_CASE("necksize from energy") {
  const Dimension d4(4);
  CHECK(std::abs(necksize_from_energy(d4, -0.25 + 1e-9) - cylinder_necksize(d4)) <= 1e-3);
  CHECK(necksize_from_energy(d4, -1e-12) < 1e-5);
  CHECK_THROWS_AS(necksize_from_energy(d4, 0.0), DomainError);
  CHECK_THROWS_AS(necksize_from_energy(d4, -0.25), DomainError);
  CHECK_THROWS_AS(necksize_from_energy(d4, -0.3), DomainError);

  // n = 3, H0 = -0.05: -eps^2/4 + eps^6/4 = -0.05 on the lower branch, located
  // by a fine scan and then refined by the secant rule.
  const Dimension d3(3);
  const auto g = [](double e) { return -0.25 * e * e + 0.25 * std::pow(e, 6) + 0.05; };
  double a = 0.0;
  for (int i = 1; i <= 100000; ++i) {
    const double e = oracle::necksize(3) * i / 100000.0;
    if (g(e) < 0.0) {
      a = e;
      break;
    }
  }
  double lo = a - oracle::necksize(3) / 100000.0;
  double hi = a;
  for (int k = 0; k < 60; ++k) {
    const double mid = lo - g(lo) * (hi - lo) / (g(hi) - g(lo));
    (g(mid) > 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-15) break;
  }
  CHECK(std::abs(necksize_from_energy(d3, -0.05) - lo) <= 1e-12);

  for (int n = 3; n <= 5; ++n) {
    const Dimension d(n);
    for (double frac : {0.01, 0.2, 0.5, 0.8, 0.999}) {
      const double eps = frac * oracle::necksize(n);
      CHECK(std::abs(necksize_from_energy(d, scalar_hamiltonian(d, eps, 0.0)) - eps) <= 1e-10);
    }
  }
}

TEST_CASE("spherical profile is the zero-energy separatrix") {
  for (int n = 3; n <= 6; ++n) {
    const Dimension d(n);
    const Trajectory s = spherical_profile(d);
    const State at0 = s(0.0);
    CHECK(at0[0] == doctest::Approx(1.0));
    CHECK(std::abs(at0[1]) <= 1e-15);
    for (int i = 0; i <= 400; ++i) {
      const double t = -20.0 + 40.0 * i / 400.0;
      const State y = s(t);
      CHECK(std::abs(scalar_hamiltonian(d, y[0], y[1])) <= 1e-10);
      CHECK(std::abs(y[0] - oracle::bubble(n, t)) <= 1e-9);
    }
  }
  CHECK(std::abs(spherical_profile(Dimension(4))(1.0)[0] - 0.648054) <= 1e-6);
}
