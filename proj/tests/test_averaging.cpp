#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "meso/averaging.hpp"
#include "meso/systems.hpp"

using namespace meso;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ScaleSeparatedField constant_one() {
  ScaleSeparatedField a;
  a.dim = 1;
  a.ell_r = a.ell_M = 1.0;
  a.eval = [](Point, Point) { return SymTensor::scalar1d(1.0); };
  return a;
}

ScaleSeparatedField two_plus_sin() {
  ScaleSeparatedField a;
  a.dim = 1;
  a.ell_r = 1.0;
  a.ell_M = 3.0;
  a.eval = [](Point, Point lam) {
    return SymTensor::scalar1d(2.0 + std::sin(kTwoPi * lam[0]));
  };
  return a;
}

const auto zero_f = [](double, double) { return 0.0; };

}  // namespace

TEST_CASE("extension restricts to the coefficient on the unit circle") {
  const TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, 1e-3);
  for (double s : {0.0, 0.13, 0.45, 0.61, 0.99}) {
    const double y = std::cos(kTwoPi * s), z = std::sin(kTwoPi * s);
    CHECK(sys.ext_coeff(y, z, 0.3) ==
          doctest::Approx(2.0 + std::sin(kTwoPi * s)).epsilon(1e-12));
  }
  // radial factor 2r^2/(1+r^2) off the circle, removable zero at the origin
  CHECK(sys.ext_coeff(0.0, 0.0, 0.5) == doctest::Approx(0.0));
  CHECK(sys.ext_coeff(2.0, 0.0, 0.0) == doctest::Approx(2.0 * 8.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("fast field is tangent to the circle: F(Psi) . Psi = 0 exactly") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> span(-3.0, 3.0);
  for (int k = 0; k < 250; ++k) {
    const double y = span(rng), z = span(rng);
    // factored form cancels exactly; the component-wise dot only up to
    // one rounding of the 2 pi products
    CHECK(TwoScaleSystem::tangency(y, z) == 0.0);
    const auto f = TwoScaleSystem::F(y, z);
    CHECK(std::fabs(f[0] * y + f[1] * z) <= 1e-13 * (y * y + z * z));
  }
}

TEST_CASE("constant coefficient: exact flow u = x recovered to O(dx)") {
  const TwoScaleSystem sys = reformulate(constant_one(), zero_f, 1e-2);
  const int n = 2000;
  const Trajectory t = integrate_euler(sys, 1.0 / n, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
  CHECK(t.u_end() == doctest::Approx(1.0).epsilon(1e-6));
  for (size_t i = 0; i < t.x.size(); i += 100)
    CHECK(t.u[i] == doctest::Approx(t.x[i]).epsilon(1e-6));

  SUBCASE("v stays constant when f = 0") {
    for (double v : t.v) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("W3 tracks the step grid") {
    const double dx = 1.0 / n;
    for (size_t i = 0; i < t.x.size(); ++i)
      CHECK(std::fabs(t.x[i] - double(i) * dx) <= dx);
  }
}

TEST_CASE("step guard: dx > eps/10 is refused unless overridden") {
  const TwoScaleSystem sys = reformulate(constant_one(), zero_f, 1e-3);
  CHECK_THROWS_AS((void)integrate_euler(sys, 1e-3, 10, {0.0, 1.0, 0.0}, {1.0, 0.0}),
                  std::invalid_argument);
  IntegrateOptions opts;
  opts.allow_large_step = true;
  CHECK_NOTHROW((void)integrate_euler(sys, 1e-3, 10, {0.0, 1.0, 0.0}, {1.0, 0.0}, opts));
}

TEST_CASE("fast rotation returns to the start after one period") {
  const TwoScaleSystem sys = reformulate(constant_one(), zero_f, 1e-3);
  const double dx = sys.eps / 1000.0;
  const int n = 1000;  // one full period of the fast phase
  const Trajectory t = integrate_euler(sys, dx, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
  CHECK(std::hypot(t.y.back() - 1.0, t.z.back() - 0.0) <= 1e-2);
}

TEST_CASE("fine Euler endpoint approaches the harmonic mean limit") {
  const TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, 1e-3);
  const double dx = sys.eps / 50.0;
  const int n = int(std::round(1.0 / dx));
  const Trajectory t = integrate_euler(sys, dx, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
  CHECK(t.u_end() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(2e-2));
}

TEST_CASE("homogenization limit: trajectory distance to x/sqrt(3) shrinks with eps") {
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, eps);
    const double dx = eps / 50.0;
    const int n = int(std::round(1.0 / dx));
    const Trajectory t = integrate_euler(sys, dx, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
    double dist = 0.0;
    for (size_t i = 0; i < t.x.size(); ++i)
      dist = std::fmax(dist, std::fabs(t.u[i] - t.x[i] / std::sqrt(3.0)));
    CHECK(dist <= 1.2 * prev);  // monotone up to 20% slack
    prev = dist;
  }
}

TEST_CASE("seamless with tau = dx is bitwise equal to Euler") {
  const TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, 1e-3);
  const double dx = sys.eps / 20.0;
  const Trajectory a = integrate_euler(sys, dx, 400, {0.0, 1.0, 0.0}, {1.0, 0.0});
  const Trajectory b = integrate_seamless(sys, dx, dx, 400, {0.0, 1.0, 0.0}, {1.0, 0.0});
  for (size_t i = 0; i < a.x.size(); ++i) {
    CHECK(a.u[i] == b.u[i]);
    CHECK(a.v[i] == b.v[i]);
    CHECK(a.y[i] == b.y[i]);
    CHECK(a.z[i] == b.z[i]);
  }
}

TEST_CASE("seamless equals Euler on the eps-rescaled system, bitwise") {
  // dyadic values so the two fast-scale ratios are identical doubles
  const double eps = std::ldexp(1.0, -13);
  const double dx = std::ldexp(1.0, -14);
  const double tau = std::ldexp(1.0, -17);
  const double eps_eff = (dx / tau) * eps;
  const TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, eps);
  const TwoScaleSystem sys_eff = reformulate(two_plus_sin(), zero_f, eps_eff);
  const int n = 1 << 14;
  const Trajectory a = integrate_seamless(sys, dx, tau, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
  const Trajectory b = integrate_euler(sys_eff, dx, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
  REQUIRE(a.u.size() == b.u.size());
  for (size_t i = 0; i < a.u.size(); ++i) {
    CHECK(a.u[i] == b.u[i]);
    CHECK(a.v[i] == b.v[i]);
    CHECK(a.y[i] == b.y[i]);
    CHECK(a.z[i] == b.z[i]);
  }
  // the endpoint sits near the harmonic-mean profile
  CHECK(a.u_end() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(5e-2));
}

TEST_CASE("seamless endpoint error decreases as the clock ratio decreases") {
  const double eps = 1e-4;
  const TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, eps);
  const double exact = 1.0 / std::sqrt(3.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double ratio : {64.0, 16.0, 4.0}) {  // eps_eff = ratio * eps shrinks
    const double tau = eps / 20.0;
    const double dx = ratio * tau;
    const int n = int(std::round(1.0 / dx));
    const Trajectory t =
        integrate_seamless(sys, dx, tau, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
    const double err = std::fabs(t.u_end() - exact);
    CHECK(err <= 1.5 * prev);
    prev = err;
  }
  CHECK(prev <= 2e-2);
}

TEST_CASE("flavors: constant coefficient reproduces plain Euler") {
  const TwoScaleSystem sys = reformulate(constant_one(), zero_f, 1e-4);
  const double dx = 50.0 * sys.eps, tau = sys.eps / 2.0;
  const int n = int(std::round(1.0 / dx));
  const Trajectory fl = integrate_flavors(sys, dx, tau, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
  IntegrateOptions opts;
  opts.allow_large_step = true;
  const Trajectory eu = integrate_euler(sys, dx, n, {0.0, 1.0, 0.0}, {1.0, 0.0}, opts);
  for (size_t i = 0; i < fl.u.size(); ++i) {
    CHECK(fl.u[i] == doctest::Approx(eu.u[i]).epsilon(1e-13));
    CHECK(fl.v[i] == eu.v[i]);
  }
}

TEST_CASE("flavors endpoint lands near the harmonic mean") {
  const double eps = 1e-4;
  const TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, eps);
  const double tau = eps / 2.0, dx = 50.0 * eps;
  const int n = int(std::round(1.0 / dx));
  const Trajectory t = integrate_flavors(sys, dx, tau, n, {0.0, 1.0, 0.0}, {1.0, 0.0});
  CHECK(t.u_end() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(5e-2));
  for (double v : t.v) CHECK(v == doctest::Approx(1.0));  // f = 0 in both phases
}

TEST_CASE("shooting: affine problems converge in one Newton step") {
  TwoScaleSystem sys = reformulate(constant_one(), zero_f, 1e-2);
  sys.dsource_du = [](double, double) { return 0.0; };
  const double dx = sys.eps / 20.0;
  const int n = int(std::round(1.0 / dx));
  const ShootResult res = shoot(sys, 1.0, IntegratorKind::Euler, dx, dx, n, 0.3);
  CHECK(res.converged);
  CHECK(res.iterations <= 2);
  CHECK(res.v0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("shooting on 2 + sin recovers the flux constant sqrt(3)") {
  TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, 1e-3);
  sys.dsource_du = [](double, double) { return 0.0; };
  const double dx = sys.eps / 50.0;
  const int n = int(std::round(1.0 / dx));
  const ShootResult res = shoot(sys, 1.0, IntegratorKind::Euler, dx, dx, n, 1.0);
  CHECK(res.converged);
  CHECK(res.v0 == doctest::Approx(std::sqrt(3.0)).epsilon(3e-2));
}

TEST_CASE("shooting with a linear reaction term meets the residual target") {
  TwoScaleSystem sys =
      reformulate(two_plus_sin(), [](double, double u) { return -u; }, 2e-3);
  sys.dsource_du = [](double, double) { return -1.0; };
  const double dx = sys.eps / 20.0;
  const int n = int(std::round(1.0 / dx));
  const ShootResult res = shoot(sys, 0.7, IntegratorKind::Euler, dx, dx, n, 0.5);
  CHECK(res.converged);
  CHECK(res.residual <= 1e-8);

  SUBCASE("finite-difference fallback agrees with the analytic sensitivity") {
    TwoScaleSystem fd = sys;
    fd.dsource_du = nullptr;
    const ShootResult res_fd = shoot(fd, 0.7, IntegratorKind::Euler, dx, dx, n, 0.5);
    CHECK(res_fd.converged);
    CHECK(res_fd.v0 == doctest::Approx(res.v0).epsilon(1e-6));
  }
}

TEST_CASE("integrator rejects bad inputs") {
  const TwoScaleSystem sys = reformulate(two_plus_sin(), zero_f, 1e-3);
  CHECK_THROWS_AS((void)integrate_seamless(sys, 1e-5, 2e-5, 10, {0, 1, 0}, {1, 0}),
                  std::invalid_argument);  // tau > dx
  ScaleSeparatedField bad = two_plus_sin();
  bad.ell_r = 0.0;
  CHECK_THROWS_AS((void)reformulate(bad, zero_f, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS((void)reformulate(two_plus_sin(), zero_f, 0.0), std::invalid_argument);
}
