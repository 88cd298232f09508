#ifndef MESO_SYSTEMS_HPP
#define MESO_SYSTEMS_HPP

#include <map>
#include <optional>
#include <string>

#include "meso/field.hpp"

namespace meso {

using ParamMap = std::map<std::string, double>;

struct ChannelParams {
  double eps_c = 0.03;  // channel edge width scale
  double k = 1.0;       // centerline slope
  double b = -0.125;    // centerline intercept
  double eta_c = 9.0;   // channel permeability contrast
  double eta_o = 0.6;   // oscillation amplitude
  double s = 0.5;       // half-width of the flat channel core, in eps_c units
};

// A configured coefficient system: the two-scale field, its source term, and
// whatever metadata the reference solvers need.
struct System {
  std::string name;
  int dim = 2;
  double epsilon = 0.04;
  ScaleSeparatedField A;
  std::function<double(Point)> f;

  // layered only: tilt angle of the oscillation direction
  std::optional<double> theta;
  // channel only
  std::optional<ChannelParams> channel;
  // channel only: the slow/oscillatory split (structure as TensorField,
  // oscillation still in two-scale form so it can be wrapped at any eps)
  std::optional<TensorField> structure;
  std::optional<ScaleSeparatedField> oscillation;
};

// Bridge profile of the channel structure: 1 on the channel core
// |y| <= s*eps_c, decaying as ((|y|/eps_c - s)^2 - 1)^2 across the edge band,
// 0 beyond |y| >= (s+1)*eps_c.
double channel_bridge(double y, double eps_c, double s);

// Registry keyed by name: "layered" (eta, theta, epsilon, dim), "het" (eta,
// epsilon), "channel" (all nine parameters), "sin1d". Unknown keys are
// rejected; missing keys fall back to defaults.
System make_system(const std::string& name, const ParamMap& params = {});

}  // namespace meso

#endif
