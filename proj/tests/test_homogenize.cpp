#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meso/dilation.hpp"
#include "meso/homogenize.hpp"
#include "meso/systems.hpp"

using namespace meso;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ScaleSeparatedField layered_sin2d() {
  ScaleSeparatedField a;
  a.dim = 2;
  a.ell_r = 1.0;
  a.ell_M = 3.0;
  a.eval = [](Point, Point lam) {
    return SymTensor::isotropic(2, 2.0 + std::sin(kTwoPi * lam[0]));
  };
  return a;
}

// adaptive Simpson, used as the independent quadrature oracle
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double tol, int depth) {
  const double m = (a + b) / 2.0;
  const double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

double integrate01(const std::function<double(double)>& f) {
  return adaptive_simpson(f, 0.0, 1.0, f(0.0), f(0.5), f(1.0), 1e-13, 30);
}

}  // namespace

TEST_CASE("quadrature oracle: integral of 1/(2 + sin) is 1/sqrt(3)") {
  const double integral =
      integrate01([](double t) { return 1.0 / (2.0 + std::sin(kTwoPi * t)); });
  CHECK(integral == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-11));
}

TEST_CASE("harmonic_mean_1d recovers sqrt(3) for 2 + sin") {
  ScaleSeparatedField a;
  a.dim = 1;
  a.ell_r = 1.0;
  a.ell_M = 3.0;
  a.eval = [](Point, Point lam) {
    return SymTensor::scalar1d(2.0 + std::sin(kTwoPi * lam[0]));
  };
  CHECK(harmonic_mean_1d(a, 0.3, 4096) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));

  SUBCASE("constant coefficient is its own harmonic mean") {
    ScaleSeparatedField c;
    c.dim = 1;
    c.ell_r = c.ell_M = 2.7;
    c.eval = [](Point, Point) { return SymTensor::scalar1d(2.7); };
    CHECK(harmonic_mean_1d(c, 0.0, 16) == doctest::Approx(2.7).epsilon(1e-14));
  }

  SUBCASE("slow prefactor scales the mean") {
    ScaleSeparatedField g;
    g.dim = 1;
    g.ell_r = 0.5;
    g.ell_M = 6.0;
    g.eval = [](Point x, Point lam) {
      return SymTensor::scalar1d((1.0 + x[0]) * (2.0 + std::sin(kTwoPi * lam[0])));
    };
    const double oracle =
        1.0 / integrate01([](double t) { return 1.0 / (1.6 * (2.0 + std::sin(kTwoPi * t))); });
    CHECK(harmonic_mean_1d(g, 0.6, 4096) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(harmonic_mean_1d(g, 0.6, 4096) ==
          doctest::Approx(1.6 * std::sqrt(3.0)).epsilon(1e-6));
  }

  SUBCASE("non-positive samples are rejected") {
    ScaleSeparatedField bad;
    bad.dim = 1;
    bad.ell_r = -2.0;
    bad.ell_M = 1.0;
    bad.eval = [](Point, Point lam) {
      return SymTensor::scalar1d(std::sin(kTwoPi * lam[0]));
    };
    CHECK_THROWS_AS((void)harmonic_mean_1d(bad, 0.1, 64), std::runtime_error);
  }
}

TEST_CASE("layered closed form: isotropic sine layers give diag(sqrt(3), 2)") {
  const SymTensor t = layered_closed_form(layered_sin2d(), 0.0, {0.5, 0.5}, 512);
  CHECK(t.a11 == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
  CHECK(t.a22 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(t.a12 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("layered closed form: constants, eta = 0, and non-layered rejection") {
  ScaleSeparatedField c;
  c.dim = 2;
  c.ell_r = c.ell_M = 1.8;
  c.eval = [](Point, Point) { return SymTensor::isotropic(2, 1.8); };
  for (double theta : {0.0, 0.35, 1.2}) {
    const SymTensor t = layered_closed_form(c, theta, {0.2, 0.8});
    CHECK(t.a11 == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(t.a22 == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(t.a12 == doctest::Approx(0.0).epsilon(1e-12));
  }

  const System quiet = make_system("layered", {{"eta", 0.0}, {"theta", 0.6}});
  const SymTensor t0 = layered_closed_form(quiet.A, 0.6, {0.4, 0.9});
  const double y1 = 1.0 + 0.1 * 0.4 + 0.05 * 0.9;
  CHECK(t0.a11 == doctest::Approx(y1).epsilon(1e-12));
  CHECK(t0.a22 == doctest::Approx(y1).epsilon(1e-12));

  const System het = make_system("het", {{"eta", 0.8}});
  CHECK_THROWS_AS((void)layered_closed_form(het.A, 0.0, {0.5, 0.5}), std::runtime_error);
}

TEST_CASE("cell problem: constant tensors have zero correctors") {
  const CorrectorField chi =
      solve_cell_problem([](Point) { return SymTensor::diag(2.0, 0.7); }, 16);
  for (double v : chi.chi1) CHECK(std::fabs(v) <= 1e-12);
  for (double v : chi.chi2) CHECK(std::fabs(v) <= 1e-12);
}

TEST_CASE("cell problem: layered cells have chi_2 = 0 and chi_1 along lambda_1") {
  const auto layered = [](Point lam) {
    return SymTensor::isotropic(2, 2.0 + std::sin(kTwoPi * lam[0]));
  };
  const CorrectorField chi = solve_cell_problem(layered, 32);
  CHECK(std::fabs(chi.mean(0)) <= 1e-10);
  CHECK(std::fabs(chi.mean(1)) <= 1e-10);
  for (double v : chi.chi2) CHECK(std::fabs(v) <= 1e-9);
  CHECK(chi.cross_variance(0) <= 1e-8);
}

TEST_CASE("homogenized tensor: constants, layered oracle, and het slow part") {
  const SymTensor c = homogenized_tensor([](Point) { return SymTensor::diag(1.3, 0.4); }, 16);
  CHECK(c.a11 == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(c.a22 == doctest::Approx(0.4).epsilon(1e-12));

  const auto layered = [](Point lam) {
    return SymTensor::isotropic(2, 2.0 + std::sin(kTwoPi * lam[0]));
  };
  const SymTensor t = homogenized_tensor(layered, 64);
  CHECK(t.a11 == doctest::Approx(std::sqrt(3.0)).epsilon(1e-3));
  CHECK(t.a22 == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(std::fabs(t.a12) <= 1e-6);

  const System het = make_system("het", {{"eta", 0.0}});
  const SymTensor h =
      homogenized_tensor([&](Point lam) { return het.A.eval({0.5, 0.5}, lam); }, 16);
  CHECK(h.a11 == doctest::Approx(1.05).epsilon(1e-12));
  CHECK(h.a22 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("homogenized eigenvalues sit in the Voigt-Reuss bracket") {
  const System het = make_system("het", {{"eta", 0.9}});
  for (const Point x : {Point{0.1, 0.3}, Point{0.7, 0.2}, Point{0.5, 0.9}}) {
    const auto cell = [&](Point lam) { return het.A.eval(x, lam); };
    const SymTensor t = homogenized_tensor(cell, 32);
    // sampled harmonic mean of the min eigenvalue / arithmetic mean of the max
    double harm = 0.0, arith = 0.0;
    const int nq = 128;
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j) {
        const SymTensor s = cell({(i + 0.5) / nq, (j + 0.5) / nq});
        harm += 1.0 / s.min_eig();
        arith += s.max_eig();
      }
    harm = double(nq) * nq / harm;
    arith /= double(nq) * nq;
    CHECK(t.min_eig() >= harm - 1e-6);
    CHECK(t.max_eig() <= arith + 1e-6);
  }
}

TEST_CASE("layered closed form cross-validates against the cell solver") {
  // theta = 0: the field is periodic on the unit torus as-is; theta != 0:
  // solve the cell problem in the rotated frame, where the layers are
  // axis-aligned and 1-periodic, and rotate the tensor back
  for (double theta : {0.0, 0.3}) {
    const System sys = make_system("layered", {{"eta", 0.6}, {"theta", theta}});
    const Point x = {0.4, 0.7};
    const SymTensor closed = layered_closed_form(sys.A, theta, x, 512);
    const auto rotated_cell = [&](Point lam) {
      const double c = std::cos(theta), s = std::sin(theta);
      const Point lam_orig = {c * lam[0] + s * lam[1], -s * lam[0] + c * lam[1]};
      return rotate_into(sys.A.eval(x, lam_orig), theta);
    };
    const SymTensor fem = rotate_from(homogenized_tensor(rotated_cell, 64), theta);
    CHECK((closed - fem).norm2() <= 1e-3 * closed.norm2());
  }
}

TEST_CASE("tensor table: slow bilinear fields interpolate exactly") {
  ScaleSeparatedField slow;
  slow.dim = 2;
  slow.ell_r = 0.5;
  slow.ell_M = 4.0;
  slow.eval = [](Point x, Point) {
    return SymTensor::isotropic(2, 1.0 + 0.5 * x[0] + 0.25 * x[1] + 0.1 * x[0] * x[1]);
  };
  const TensorTable table = tensor_table(slow, 5, 16);
  const TensorField f = table.as_field();
  for (const Point x : {Point{0.11, 0.77}, Point{0.5, 0.5}, Point{0.93, 0.08}}) {
    const double expect = 1.0 + 0.5 * x[0] + 0.25 * x[1] + 0.1 * x[0] * x[1];
    CHECK(f.eval(x).a11 == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("tensor table: refinement tightens the het interpolant") {
  const System het = make_system("het", {{"eta", 0.8}});
  const TensorTable coarse = tensor_table(het.A, 5, 24);
  const TensorTable mid = tensor_table(het.A, 9, 24);
  const TensorTable fine = tensor_table(het.A, 17, 24);
  double sup_coarse = 0.0, sup_mid = 0.0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const Point x = {i / 20.0, j / 20.0};
      sup_coarse = std::fmax(sup_coarse,
                             (coarse.interpolate(x) - fine.interpolate(x)).norm2());
      sup_mid = std::fmax(sup_mid, (mid.interpolate(x) - fine.interpolate(x)).norm2());
    }
  CHECK(sup_coarse >= 1.5 * sup_mid);
}

TEST_CASE("tensor table matches the layered closed form at off-grid queries") {
  const System sys = make_system("layered", {{"eta", 0.6}});
  const TensorTable table = tensor_table(sys.A, 9, 32);
  double sup = 0.0;
  for (const Point x : {Point{0.13, 0.61}, Point{0.47, 0.22}, Point{0.86, 0.94}}) {
    const SymTensor closed = layered_closed_form(sys.A, 0.0, x, 512);
    sup = std::fmax(sup, (table.interpolate(x) - closed).norm2());
  }
  CHECK(sup <= 2e-2);
}

TEST_CASE("dilation and homogenization commute on the layered system") {
  const System sys = make_system("layered", {{"eta", 0.5}});
  const double eps = 0.05;
  const DilationParams params{0.25, 2.0, 0.5};
  const ScaleSeparatedField atil = represent_dilated(sys.A, eps, params);
  double sup = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const Point x = {0.1 + 0.2 * i, 0.1 + 0.2 * j};
      const SymTensor lhs =
          homogenized_tensor([&](Point lam) { return atil.eval(x, lam); }, 64);
      const SymTensor rhs = layered_closed_form(sys.A, 0.0, shrink(x, params, 2), 512);
      sup = std::fmax(sup, (lhs - rhs).norm2());
    }
  CHECK(sup <= 2e-3);
}
