#ifndef MESO_HARNESS_HPP
#define MESO_HARNESS_HPP

#include <map>
#include <string>
#include <vector>

#include "meso/config.hpp"
#include "meso/fem.hpp"
#include "meso/report.hpp"
#include "meso/systems.hpp"

namespace meso {

// Aligned mesh choice: L snapped to the nearest unit fraction 1/nL, mesh size
// h = L/q with q = round(L / h_target), so discontinuity lines of the dilated
// coefficient fall on mesh lines and n = nL * q.
struct AlignedMesh {
  double L = 0.0;
  int q = 0;
  int n = 0;
  double h = 0.0;
};

AlignedMesh align_mesh(double L_target, double h_target, int cap_n = 1 << 20);

// h <= m*eps/5 and m*eps < L; violations throw ConfigError unless forced
void enforce_scale_condition(double h, double m, double eps, double L, bool force);

// The reference homogenized tensor of a system: layered uses the rotated
// closed form, het a 17x17 tensor table on 64^2 cells, channel the exact
// per-direction harmonic means around the structure, sin1d the 1D harmonic
// mean. Table sizes configurable through [reference].
TensorField reference_tensor(const System& sys, const Config& cfg);

// error-vs-L study for the dilated homogenized problem, h = frac * L aligned
ErrorReport run_dilation_sweep(const Config& cfg);

// error-vs-eps study between the dilated oscillatory and dilated homogenized
// problems, h = frac * m * eps; one report per m value, keyed by m
std::map<double, ErrorReport> run_homogenization_sweep(const Config& cfg);

// error-vs-h study at fixed (eps, m, L) against a 4x-refined aligned mesh
ErrorReport run_discretization_sweep(const Config& cfg);

struct IntegratedResult {
  // per-method reports over the m sweep: "local_L2", "local_L8", "partial",
  // and "hybrid" for layered systems
  std::map<std::string, ErrorReport> methods;
  std::vector<double> hybrid_smooth_coeffs;  // fitted slow-part monomials
  struct BudgetRow {
    double m = 0.0;
    double total = 0.0, discretization = 0.0, homogenization = 0.0, dilation = 0.0;
  };
  std::vector<BudgetRow> budget;  // filled when [flags] budget = 1
};

IntegratedResult run_integrated_test(const Config& cfg);

struct ChannelRow {
  double param = 0.0;
  double u_naive = 0.0, u_aware = 0.0;
  double flux_naive = 0.0, flux_aware = 0.0;
  double seconds = 0.0;
};

struct ChannelResult {
  std::vector<ChannelRow> vs_m, vs_L;
  // fields of the first vs_m row, for CSV export
  NodalField u_naive, u_aware, u_ref;
  ElementField flux_naive, flux_aware, flux_ref;

  static std::string csv_header();
  static std::string csv_rows(const std::vector<ChannelRow>& rows);
};

ChannelResult run_channel_study(const Config& cfg);

// hybrid coefficient for layered systems: per-trace decomposition along x1
// with a bank of transverse offsets, linearly blended across x2
struct HybridCoefficient {
  TensorField field;
  std::vector<double> smooth_coeffs;  // (c0, c1) in 1D, (c0, c1, c2) in 2D
};
HybridCoefficient hybrid_coefficient(const System& sys, double m, double width,
                                     int degree, int samples, int traces);

}  // namespace meso

#endif
