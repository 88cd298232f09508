#include "meso/averaging.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace meso {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct SensState {
  double su = 0.0, sv = 1.0;
};

struct StepState {
  double u, v, xw, y, z;
  SensState sens;
};

void check_finite(const StepState& s, int step) {
  if (!(std::isfinite(s.u) && std::isfinite(s.v) && std::isfinite(s.y) &&
        std::isfinite(s.z)))
    throw std::runtime_error("integrator: state overflow/NaN at step " +
                             std::to_string(step));
}

void record(Trajectory& t, const StepState& s) {
  t.x.push_back(s.xw);
  t.u.push_back(s.u);
  t.v.push_back(s.v);
  t.y.push_back(s.y);
  t.z.push_back(s.z);
}

// One forward-Euler update; the fast block uses fast_scale = fast_dt / eps.
// All increments are evaluated at the incoming state.
void step_both(const TwoScaleSystem& sys, StepState& s, double slow_dt,
               double fast_scale, bool renorm, bool with_sens) {
  const double ext = sys.ext_coeff(s.y, s.z, s.xw);
  const double du = s.v / ext;
  const double dv = -sys.source(s.xw, s.u);
  const double fy = -kTwoPi * s.z;
  const double fz = kTwoPi * s.y;
  double dsu = 0.0, dsv = 0.0;
  if (with_sens) {
    dsu = s.sens.sv / ext;
    dsv = -sys.dsource_du(s.xw, s.u) * s.sens.su;
  }
  s.u += du * slow_dt;
  s.v += dv * slow_dt;
  s.xw += slow_dt;
  s.y += fy * fast_scale;
  s.z += fz * fast_scale;
  if (with_sens) {
    s.sens.su += dsu * slow_dt;
    s.sens.sv += dsv * slow_dt;
  }
  if (renorm) {
    const double r = std::sqrt(s.y * s.y + s.z * s.z);
    if (r > 0.0) {
      s.y /= r;
      s.z /= r;
    }
  }
}

// fast field frozen: W advances, Psi held still
void step_frozen(const TwoScaleSystem& sys, StepState& s, double slow_dt,
                 bool with_sens) {
  const double ext = sys.ext_coeff(s.y, s.z, s.xw);
  const double du = s.v / ext;
  const double dv = -sys.source(s.xw, s.u);
  double dsu = 0.0, dsv = 0.0;
  if (with_sens) {
    dsu = s.sens.sv / ext;
    dsv = -sys.dsource_du(s.xw, s.u) * s.sens.su;
  }
  s.u += du * slow_dt;
  s.v += dv * slow_dt;
  s.xw += slow_dt;
  if (with_sens) {
    s.sens.su += dsu * slow_dt;
    s.sens.sv += dsv * slow_dt;
  }
}

enum class Scheme { SingleClock, TwoClock, Flavors };

Trajectory run(const TwoScaleSystem& sys, Scheme scheme, double dx, double tau,
               int n_steps, std::array<double, 3> w0, std::array<double, 2> psi0,
               const IntegrateOptions& opts, bool with_sens, SensState* sens_out) {
  if (n_steps < 1) throw std::invalid_argument("integrator: n_steps must be >= 1");
  if (!(dx > 0.0)) throw std::invalid_argument("integrator: dx must be positive");
  StepState s{w0[0], w0[1], w0[2], psi0[0], psi0[1], {}};
  Trajectory traj;
  traj.x.reserve(n_steps + 1);
  traj.u.reserve(n_steps + 1);
  traj.v.reserve(n_steps + 1);
  traj.y.reserve(n_steps + 1);
  traj.z.reserve(n_steps + 1);
  record(traj, s);

  const double fast_dt = scheme == Scheme::SingleClock ? dx : tau;
  const double fast_scale = fast_dt / sys.eps;
  for (int k = 0; k < n_steps; ++k) {
    if (scheme == Scheme::Flavors) {
      step_both(sys, s, tau, fast_scale, opts.renormalize, with_sens);
      step_frozen(sys, s, dx - tau, with_sens);
    } else {
      step_both(sys, s, dx, fast_scale, opts.renormalize, with_sens);
    }
    check_finite(s, k + 1);
    record(traj, s);
  }
  if (sens_out) *sens_out = s.sens;
  return traj;
}

}  // namespace

double TwoScaleSystem::ext_coeff(double y, double z, double x) const {
  const double r2 = y * y + z * z;
  if (r2 == 0.0) return 0.0;  // removable singularity of the radial extension
  double angle = std::atan2(z, y) / kTwoPi;
  if (angle < 0.0) angle += 1.0;
  return coeff(x, angle) * 2.0 * r2 / (1.0 + r2);
}

std::array<double, 3> TwoScaleSystem::G(const std::array<double, 3>& w, double y,
                                        double z) const {
  return {w[1] / ext_coeff(y, z, w[2]), -source(w[2], w[0]), 1.0};
}

std::array<double, 2> TwoScaleSystem::F(double y, double z) {
  return {-kTwoPi * z, kTwoPi * y};
}

double TwoScaleSystem::tangency(double y, double z) {
  return kTwoPi * ((-z) * y + y * z);
}

TwoScaleSystem reformulate(const ScaleSeparatedField& a,
                           const std::function<double(double, double)>& f, double eps) {
  if (a.dim != 1) throw std::invalid_argument("reformulate: 1D fields only");
  if (!(eps > 0.0)) throw std::invalid_argument("reformulate: eps must be positive");
  if (!(a.ell_r > 0.0))
    throw std::invalid_argument("reformulate: coefficient must be positive");
  TwoScaleSystem sys;
  sys.eps = eps;
  sys.coeff = [eval = a.eval](double x, double lam) {
    return eval({x, 0.0}, {lam, 0.0}).a11;
  };
  sys.source = f;
  return sys;
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "x,u,v,y,z\n";
  char buf[160];
  for (size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", x[i], u[i], v[i],
                  y[i], z[i]);
    os << buf;
  }
}

Trajectory integrate_euler(const TwoScaleSystem& sys, double dx, int n_steps,
                           std::array<double, 3> w0, std::array<double, 2> psi0,
                           const IntegrateOptions& opts) {
  if (dx > sys.eps / 10.0 && !opts.allow_large_step)
    throw std::invalid_argument(
        "integrate_euler: dx > eps/10 leaves the averaging regime (set "
        "allow_large_step to override)");
  return run(sys, Scheme::SingleClock, dx, dx, n_steps, w0, psi0, opts, false, nullptr);
}

Trajectory integrate_seamless(const TwoScaleSystem& sys, double dx, double tau,
                              int n_steps, std::array<double, 3> w0,
                              std::array<double, 2> psi0,
                              const IntegrateOptions& opts) {
  if (!(tau > 0.0) || tau > dx)
    throw std::invalid_argument("integrate_seamless: need 0 < tau <= dx");
  if (tau > sys.eps / 10.0 && !opts.allow_large_step)
    throw std::invalid_argument(
        "integrate_seamless: fast clock tau > eps/10 (set allow_large_step to "
        "override)");
  return run(sys, Scheme::TwoClock, dx, tau, n_steps, w0, psi0, opts, false, nullptr);
}

Trajectory integrate_flavors(const TwoScaleSystem& sys, double dx, double tau,
                             int n_steps, std::array<double, 3> w0,
                             std::array<double, 2> psi0,
                             const IntegrateOptions& opts) {
  if (!(tau > 0.0) || tau > dx)
    throw std::invalid_argument("integrate_flavors: need 0 < tau <= dx");
  return run(sys, Scheme::Flavors, dx, tau, n_steps, w0, psi0, opts, false, nullptr);
}

ShootResult shoot(const TwoScaleSystem& sys, double target, IntegratorKind kind,
                  double dx, double tau, int n_steps, double v0_init,
                  const IntegrateOptions& opts) {
  const bool analytic_sens = bool(sys.dsource_du);
  const auto integrate = [&](double v0, bool with_sens, SensState* sens) {
    const Scheme scheme = kind == IntegratorKind::Euler      ? Scheme::SingleClock
                          : kind == IntegratorKind::Seamless ? Scheme::TwoClock
                                                             : Scheme::Flavors;
    return run(sys, scheme, dx, tau, n_steps, {0.0, v0, 0.0}, {1.0, 0.0}, opts,
               with_sens, sens);
  };

  ShootResult best;
  best.residual = std::numeric_limits<double>::infinity();
  double v0 = v0_init;
  for (int it = 0; it < 25; ++it) {
    SensState sens;
    Trajectory traj = integrate(v0, analytic_sens, &sens);
    const double g = traj.u_end() - target;
    if (std::fabs(g) < best.residual) {
      best.v0 = v0;
      best.trajectory = std::move(traj);
      best.residual = std::fabs(g);
      best.iterations = it + 1;
    }
    if (std::fabs(g) <= 1e-8) {
      best.converged = true;
      return best;
    }
    double slope;
    if (analytic_sens) {
      slope = sens.su;
    } else {
      const double delta = 1e-6 * std::fmax(1.0, std::fabs(v0));
      const double gp = integrate(v0 + delta, false, nullptr).u_end() - target;
      const double gm = integrate(v0 - delta, false, nullptr).u_end() - target;
      slope = (gp - gm) / (2.0 * delta);
    }
    if (slope == 0.0 || !std::isfinite(slope)) break;
    v0 -= g / slope;
  }
  return best;
}

}  // namespace meso
