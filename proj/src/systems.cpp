#include "meso/systems.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace meso {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double get(const ParamMap& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const ParamMap& p, const std::set<std::string>& allowed,
                    const std::string& system) {
  for (const auto& [key, _] : p)
    if (!allowed.count(key))
      throw std::invalid_argument("system '" + system + "': unknown parameter '" + key + "'");
}

System make_layered(const ParamMap& p) {
  reject_unknown(p, {"eta", "theta", "epsilon", "dim"}, "layered");
  System sys;
  sys.name = "layered";
  sys.dim = int(get(p, "dim", 2));
  if (sys.dim != 1 && sys.dim != 2)
    throw std::invalid_argument("layered: dim must be 1 or 2");
  sys.epsilon = get(p, "epsilon", 0.04);
  const double eta = get(p, "eta", 0.5);
  const double theta = get(p, "theta", 0.0);
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("layered: eta must be in [0,1]");
  sys.theta = theta;
  const double y2 = 0.9 * eta;
  const int dim = sys.dim;

  sys.A.dim = dim;
  sys.A.ell_r = 1.0 - y2;
  sys.A.ell_M = (dim == 2 ? 1.15 : 1.1) + y2;
  sys.A.eval = [dim, y2, theta](Point x, Point lam) {
    const double y1 = 1.0 + 0.1 * x[0] + (dim == 2 ? 0.05 * x[1] : 0.0);
    const double phase = dim == 2 ? lam[0] * std::cos(theta) - lam[1] * std::sin(theta)
                                  : lam[0];
    const double v = y1 + y2 * std::sin(kTwoPi * phase);
    return SymTensor::isotropic(dim, v);
  };
  sys.f = [dim](Point x) {
    const double d0 = (x[0] - 0.3) * (x[0] - 0.3) + (dim == 2 ? (x[1] - 0.3) * (x[1] - 0.3) : 0.0);
    const double d1 = (x[0] - 0.7) * (x[0] - 0.7) + (dim == 2 ? (x[1] - 0.7) * (x[1] - 0.7) : 0.0);
    return std::exp(-60.0 * d0) + std::exp(-60.0 * d1);
  };
  return sys;
}

System make_het(const ParamMap& p) {
  reject_unknown(p, {"eta", "epsilon"}, "het");
  System sys;
  sys.name = "het";
  sys.dim = 2;
  sys.epsilon = get(p, "epsilon", 0.04);
  const double eta = get(p, "eta", 0.5);
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("het: eta must be in [0,1]");

  sys.A.dim = 2;
  sys.A.ell_r = 1.0 - 0.9 * eta;
  sys.A.ell_M = 1.1 + 0.9 * eta;
  sys.A.eval = [eta](Point x, Point lam) {
    const double s1 = std::sin(kTwoPi * lam[0]);
    const double s2 = std::sin(kTwoPi * lam[1]);
    SymTensor t;
    t.dim = 2;
    t.a11 = 1.0 + 0.1 * x[0] + 0.8 * eta * ((4.0 + x[0]) / 5.0) * s1;
    t.a12 = 0.1 * eta * (1.0 - 0.3 * x[1]) * s1;
    t.a22 = 1.0 + 0.8 * eta * ((7.0 + 3.0 * std::sin(kTwoPi * x[1])) / 10.0) * s2;
    return t;
  };
  sys.f = [](Point x) { return 10.0 * (x[0] - x[1]); };
  return sys;
}

System make_channel(const ParamMap& p) {
  reject_unknown(p, {"eps_c", "k", "b", "eta_c", "eta_o", "s", "epsilon"}, "channel");
  System sys;
  sys.name = "channel";
  sys.dim = 2;
  sys.epsilon = get(p, "epsilon", 1.0 / 32.0);
  ChannelParams cp;
  cp.eps_c = get(p, "eps_c", 0.03);
  cp.k = get(p, "k", 1.0);
  cp.b = get(p, "b", -0.125);
  cp.eta_c = get(p, "eta_c", 9.0);
  cp.eta_o = get(p, "eta_o", 0.6);
  cp.s = get(p, "s", 0.5);
  if (!(cp.eta_o < 1.0))
    throw std::invalid_argument("channel: eta_o must be < 1 for ellipticity");
  sys.channel = cp;

  TensorField structure;
  structure.dim = 2;
  structure.ell_r = 1.0;
  structure.ell_M = 1.0 + cp.eta_c;
  structure.eval = [cp](Point x) {
    const double y = (x[1] - cp.k * x[0] - cp.b) / std::sqrt(cp.k * cp.k + 1.0);
    return SymTensor::isotropic(2, 1.0 + cp.eta_c * channel_bridge(y, cp.eps_c, cp.s));
  };
  sys.structure = structure;

  ScaleSeparatedField osc;
  osc.dim = 2;
  osc.ell_r = -cp.eta_o;  // the oscillation alone is not elliptic
  osc.ell_M = cp.eta_o;
  osc.eval = [amp = cp.eta_o](Point, Point lam) {
    return SymTensor::diag(amp * std::sin(kTwoPi * lam[0]), amp * std::sin(kTwoPi * lam[1]));
  };
  sys.oscillation = osc;

  sys.A.dim = 2;
  sys.A.ell_r = 1.0 - cp.eta_o;
  sys.A.ell_M = 1.0 + cp.eta_c + cp.eta_o;
  sys.A.eval = [s = structure.eval, o = osc.eval](Point x, Point lam) {
    return s(x) + o(x, lam);
  };

  const double sigma2 = 2.0 * 0.2 * 0.2;
  const Point cplus = {0.25, 0.25 * cp.k + cp.b};
  const Point cminus = {0.75, 0.75 * cp.k + cp.b};
  sys.f = [sigma2, cplus, cminus](Point x) {
    const Point dp = x - cplus, dm = x - cminus;
    return std::exp(-(dp[0] * dp[0] + dp[1] * dp[1]) / sigma2) -
           std::exp(-(dm[0] * dm[0] + dm[1] * dm[1]) / sigma2);
  };
  return sys;
}

System make_sin1d(const ParamMap& p) {
  reject_unknown(p, {"epsilon"}, "sin1d");
  System sys;
  sys.name = "sin1d";
  sys.dim = 1;
  sys.epsilon = get(p, "epsilon", 0.04);
  sys.A.dim = 1;
  sys.A.ell_r = 1.0;
  sys.A.ell_M = 3.0;
  sys.A.eval = [](Point, Point lam) {
    return SymTensor::scalar1d(2.0 + std::sin(kTwoPi * lam[0]));
  };
  sys.f = [](Point) { return 1.0; };
  return sys;
}

}  // namespace

double channel_bridge(double y, double eps_c, double s) {
  const double t = std::fabs(y / eps_c);
  if (t <= s) return 1.0;
  if (t >= s + 1.0) return 0.0;
  const double q = (t - s) * (t - s) - 1.0;
  return q * q;
}

System make_system(const std::string& name, const ParamMap& params) {
  if (name == "layered") return make_layered(params);
  if (name == "het") return make_het(params);
  if (name == "channel") return make_channel(params);
  if (name == "sin1d") return make_sin1d(params);
  throw std::invalid_argument("unknown system '" + name + "'");
}

}  // namespace meso
