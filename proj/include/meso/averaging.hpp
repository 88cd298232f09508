#ifndef MESO_AVERAGING_HPP
#define MESO_AVERAGING_HPP

#include <functional>
#include <optional>
#include <vector>

#include "meso/field.hpp"

namespace meso {

// Slow/fast first-order form of the 1D oscillatory two-point problem
//   -(A(x, x/eps) u')' = f(x, u),  u(0) = 0, u'(0) = v0.
// Slow block W = (u, v, x) with v = A u'; fast block Psi = (y, z) on the unit
// circle, driven by the rotation field F(Psi) = 2 pi (-Psi_2, Psi_1) / eps.
struct TwoScaleSystem {
  double eps = 1e-3;
  std::function<double(double x, double lam)> coeff;   // A(x, lambda), 1-periodic
  std::function<double(double x, double u)> source;    // f(x, u)
  std::function<double(double x, double u)> dsource_du;  // optional, for shooting

  // radial extension of A to the plane: A(x, angle(y,z)) * 2 r^2 / (1 + r^2)
  double ext_coeff(double y, double z, double x) const;

  // G(W, Psi) = (w2 / ext_coeff(Psi; w3), -f(w3, w1), 1)
  std::array<double, 3> G(const std::array<double, 3>& w, double y, double z) const;
  // F(Psi) = 2 pi (-Psi_2, Psi_1); tangent to the circle, F(Psi).Psi = 0
  static std::array<double, 2> F(double y, double z);
  // F(Psi) . Psi evaluated in factored form 2 pi ((-z) y + y z), which
  // cancels exactly in floating point
  static double tangency(double y, double z);
};

TwoScaleSystem reformulate(const ScaleSeparatedField& a,
                           const std::function<double(double, double)>& f, double eps);

struct Trajectory {
  std::vector<double> x;  // recorded W_3 component
  std::vector<double> u, v, y, z;

  double u_end() const { return u.back(); }
  void write_csv(std::ostream& os) const;  // x,u,v,y,z
};

struct IntegrateOptions {
  bool renormalize = true;       // project Psi back to the unit circle each step
  bool allow_large_step = false; // lift the dx <= eps/10 stability guard
};

// Forward Euler with a single clock dx on both blocks.
Trajectory integrate_euler(const TwoScaleSystem& sys, double dx, int n_steps,
                           std::array<double, 3> w0, std::array<double, 2> psi0,
                           const IntegrateOptions& opts = {});

// Two-clock variant: slow block stepped by dx, fast block by tau < dx.
// Algebraically identical to Euler on the system with eps_eff = (dx/tau) eps.
Trajectory integrate_seamless(const TwoScaleSystem& sys, double dx, double tau,
                              int n_steps, std::array<double, 3> w0,
                              std::array<double, 2> psi0,
                              const IntegrateOptions& opts = {});

// Flow-averaging alternation: per macro step, one substep of length tau with
// the fast field on, then one of length dx - tau with the fast field frozen.
Trajectory integrate_flavors(const TwoScaleSystem& sys, double dx, double tau,
                             int n_steps, std::array<double, 3> w0,
                             std::array<double, 2> psi0,
                             const IntegrateOptions& opts = {});

enum class IntegratorKind { Euler, Seamless, Flavors };

struct ShootResult {
  double v0 = 0.0;
  Trajectory trajectory;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // |u(1) - target| at the returned iterate
};

// Newton iteration on g(v0) = u(1; v0) - target. The derivative comes from
// the sensitivity system integrated alongside when dsource_du is set, and
// from a central finite difference otherwise. Stops at |g| <= 1e-8 or 25
// iterations; non-convergence returns the best iterate with converged=false.
ShootResult shoot(const TwoScaleSystem& sys, double target, IntegratorKind kind,
                  double dx, double tau, int n_steps, double v0_init,
                  const IntegrateOptions& opts = {});

}  // namespace meso

#endif
