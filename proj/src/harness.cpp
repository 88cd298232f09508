#include "meso/harness.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "meso/decompose.hpp"
#include "meso/dilation.hpp"
#include "meso/homogenize.hpp"
#include "meso/parallel.hpp"

namespace meso {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

System system_from_config(const Config& cfg, const std::string& fallback_name) {
  const std::string name = cfg.get_string("system", "name", fallback_name);
  ParamMap params;
  for (const char* key :
       {"eta", "theta", "epsilon", "dim", "eps_c", "k", "b", "eta_c", "eta_o", "s"})
    if (cfg.has("system", key)) params[key] = cfg.get_double("system", key);
  return make_system(name, params);
}

NodalField solve_on(const MeshPtr& mesh, const TensorField& a,
                    const std::function<double(Point)>& f, double rel_tol) {
  return solve(assemble(mesh, a, f), rel_tol);
}

struct RelErrors {
  double l2 = 0.0, h1 = 0.0;
};

RelErrors relative_errors(const NodalField& u, const NodalField& ref) {
  RelErrors e;
  e.l2 = l2_error(u, ref) / l2_norm(ref);
  e.h1 = h1_semi_error(u, ref) / h1_semi_norm(ref);
  return e;
}

// per-direction harmonic mean around the slow structure value; exact for the
// channel system, whose oscillation is diagonal with entry i depending on
// lambda_i only (the cell problem separates)
TensorField channel_reference(const System& sys, int n_quad) {
  const ChannelParams cp = *sys.channel;
  TensorField out;
  out.dim = 2;
  out.ell_r = std::sqrt(1.0 - cp.eta_o * cp.eta_o);
  out.ell_M = 1.0 + cp.eta_c;
  out.eval = [structure = sys.structure->eval, amp = cp.eta_o, n_quad](Point x) {
    const double c = structure(x).a11;
    double inv = 0.0;
    for (int k = 0; k < n_quad; ++k)
      inv += 1.0 / (c + amp * std::sin(kTwoPi * (k + 0.5) / n_quad));
    const double hm = double(n_quad) / inv;
    return SymTensor::diag(hm, hm);
  };
  return out;
}

}  // namespace

AlignedMesh align_mesh(double L_target, double h_target, int cap_n) {
  if (!(L_target > 0.0) || !(h_target > 0.0))
    throw ConfigError("align_mesh: L and h targets must be positive");
  AlignedMesh am;
  const int nL = std::max(1, int(std::round(1.0 / L_target)));
  am.L = 1.0 / nL;
  am.q = std::max(1, int(std::round(am.L / h_target)));
  while (nL * am.q > cap_n && am.q > 1) --am.q;
  am.n = nL * am.q;
  am.h = am.L / am.q;
  if (am.n < 2) am.n = 2;
  return am;
}

void enforce_scale_condition(double h, double m, double eps, double L, bool force) {
  if (force) return;
  std::ostringstream os;
  if (h > m * eps / 5.0 + 1e-12) {
    os << "scale condition violated: h = " << h << " > m*eps/5 = " << m * eps / 5.0
       << " (use force to override)";
    throw ConfigError(os.str());
  }
  if (!(m * eps < L + 1e-12)) {
    os << "scale condition violated: m*eps = " << m * eps << " >= L = " << L
       << " (use force to override)";
    throw ConfigError(os.str());
  }
}

TensorField reference_tensor(const System& sys, const Config& cfg) {
  const int n_quad = cfg.get_int("reference", "quad", 128);
  if (sys.name == "layered") {
    TensorField out;
    out.dim = sys.dim;
    out.ell_r = sys.A.ell_r;
    out.ell_M = sys.A.ell_M;
    if (sys.dim == 1) {
      out.eval = [a = sys.A, n_quad](Point x) {
        return SymTensor::scalar1d(harmonic_mean_1d(a, x[0], n_quad));
      };
    } else {
      out.eval = [a = sys.A, theta = *sys.theta, n_quad](Point x) {
        return layered_closed_form(a, theta, x, n_quad);
      };
    }
    return out;
  }
  if (sys.name == "het") {
    const int grid_n = cfg.get_int("reference", "table_grid", 17);
    const int cell_n = cfg.get_int("reference", "cell_n", 64);
    return tensor_table(sys.A, grid_n, cell_n).as_field();
  }
  if (sys.name == "channel") return channel_reference(sys, n_quad);
  if (sys.name == "sin1d") {
    TensorField out;
    out.dim = 1;
    out.ell_r = sys.A.ell_r;
    out.ell_M = sys.A.ell_M;
    out.eval = [a = sys.A, n_quad](Point x) {
      return SymTensor::scalar1d(harmonic_mean_1d(a, x[0], std::max(n_quad, 512)));
    };
    return out;
  }
  throw ConfigError("reference_tensor: no reference rule for system " + sys.name);
}

ErrorReport run_dilation_sweep(const Config& cfg) {
  const System sys = system_from_config(cfg, "layered");
  const double m = cfg.get_double("method", "m", 4.0);
  const double nu = cfg.get_double("method", "nu", 0.5);
  const double frac = cfg.get_double("mesh", "frac", 0.15);
  const double rel_tol = cfg.get_double("solver", "rel_tol", 1e-10);
  const int cap_n = cfg.get_int("mesh", "cap_n", 1 << 20);
  std::vector<double> L_values = {0.2, 0.1, 0.05, 0.025};
  if (cfg.has("sweep", "values")) L_values = cfg.get_list("sweep", "values");

  const TensorField abar = reference_tensor(sys, cfg);
  ErrorReport report;
  report.rows.resize(L_values.size());
  report.notes.push_back("sweep=dilation system=" + sys.name +
                         " m=" + format_g12(m) + " nu=" + format_g12(nu));
  parallel_for(int(L_values.size()), [&](int i) {
    const double t0 = now_seconds();
    const AlignedMesh am = align_mesh(L_values[i], frac * L_values[i], cap_n);
    const DilationParams params{am.L, m, nu};
    const MeshPtr mesh = build_mesh(sys.dim, am.n);
    const NodalField u0 = solve_on(mesh, abar, sys.f, rel_tol);
    const NodalField u0d = solve_on(mesh, dilate_local(abar, params), sys.f, rel_tol);
    const RelErrors err = relative_errors(u0d, u0);
    report.rows[i] = {am.L, err.l2, err.h1, now_seconds() - t0};
  });
  report.finalize_slopes();
  return report;
}

std::map<double, ErrorReport> run_homogenization_sweep(const Config& cfg) {
  const System sys = system_from_config(cfg, "layered");
  const double nu = cfg.get_double("method", "nu", 0.5);
  const double L = cfg.get_double("method", "L", 0.1);
  const double frac = cfg.get_double("mesh", "frac", 0.1);
  const double rel_tol = cfg.get_double("solver", "rel_tol", 1e-10);
  const int cap_n = cfg.get_int("mesh", "cap_n", 1 << 20);
  const bool force = cfg.get_int("flags", "force", 0) != 0;
  std::vector<double> eps_values = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  if (cfg.has("sweep", "values")) eps_values = cfg.get_list("sweep", "values");
  std::vector<double> m_values = {1.0, 3.0};
  if (cfg.has("sweep", "m_values")) m_values = cfg.get_list("sweep", "m_values");

  const TensorField abar = reference_tensor(sys, cfg);
  std::map<double, ErrorReport> reports;
  for (double m : m_values) {
    ErrorReport& rep = reports[m];
    rep.rows.resize(eps_values.size());
    rep.notes.push_back("sweep=homog system=" + sys.name + " m=" + format_g12(m) +
                        " L=" + format_g12(L) + " nu=" + format_g12(nu));
  }

  struct Job {
    double m, eps;
    SweepRow* row;
  };
  std::vector<Job> jobs;
  for (double m : m_values)
    for (size_t i = 0; i < eps_values.size(); ++i)
      jobs.push_back({m, eps_values[i], &reports[m].rows[i]});

  parallel_for(int(jobs.size()), [&](int j) {
    const auto [m, eps, row] = jobs[j];
    const double t0 = now_seconds();
    MeshPtr mesh;
    TensorField osc, hom;
    if (m == 1.0) {
      const int n = std::min(cap_n, std::max(2, int(std::round(1.0 / (frac * eps)))));
      mesh = build_mesh(sys.dim, n);
      enforce_scale_condition(1.0 / n, 1.0, eps, 1.0, force);
      osc = wrap(sys.A, eps);
      hom = abar;
    } else {
      const AlignedMesh am = align_mesh(L, frac * m * eps, cap_n);
      enforce_scale_condition(am.h, m, eps, am.L, force);
      const DilationParams params{am.L, m, nu};
      mesh = build_mesh(sys.dim, am.n);
      osc = dilate_local(wrap(sys.A, eps), params);
      hom = dilate_local(abar, params);
    }
    const NodalField u_eps = solve_on(mesh, osc, sys.f, rel_tol);
    const NodalField u_hom = solve_on(mesh, hom, sys.f, rel_tol);
    const RelErrors err = relative_errors(u_eps, u_hom);
    *row = {m * eps, err.l2, err.h1, now_seconds() - t0};
  });
  for (auto& [m, rep] : reports) rep.finalize_slopes();
  return reports;
}

ErrorReport run_discretization_sweep(const Config& cfg) {
  const System sys = system_from_config(cfg, "sin1d");
  const double eps = sys.epsilon;
  const double m = cfg.get_double("method", "m", 2.0);
  const double nu = cfg.get_double("method", "nu", 0.5);
  const double L = cfg.get_double("method", "L", 0.1);
  const double rel_tol = cfg.get_double("solver", "rel_tol", 1e-10);
  const int refine = cfg.get_int("reference", "refine", 4);
  const bool force = cfg.get_int("flags", "force", 0) != 0;
  std::vector<double> q_values = {8, 16, 32, 64};
  if (cfg.has("sweep", "values")) q_values = cfg.get_list("sweep", "values");

  const int nL = int(std::round(1.0 / L));
  const DilationParams params{1.0 / nL, m, nu};
  const TensorField dilated = dilate_local(wrap(sys.A, eps), params);

  int q_max = 0;
  for (double q : q_values) q_max = std::max(q_max, int(q));
  const int q_ref = refine * q_max;
  const MeshPtr ref_mesh = build_mesh(sys.dim, nL * q_ref);
  const NodalField u_ref = solve_on(ref_mesh, dilated, sys.f, rel_tol);
  const double ref_l2 = l2_norm(u_ref), ref_h1 = h1_semi_norm(u_ref);

  ErrorReport report;
  report.rows.resize(q_values.size());
  report.notes.push_back("sweep=disc system=" + sys.name + " eps=" + format_g12(eps) +
                         " m=" + format_g12(m) + " L=" + format_g12(params.L) +
                         " q_ref=" + format_g12(q_ref));
  parallel_for(int(q_values.size()), [&](int i) {
    const double t0 = now_seconds();
    const int q = int(q_values[i]);
    const double h = params.L / q;
    enforce_scale_condition(h, m, eps, params.L, force);
    const MeshPtr mesh = build_mesh(sys.dim, nL * q);
    const NodalField u = solve_on(mesh, dilated, sys.f, rel_tol);
    report.rows[i] = {h, l2_error(u, u_ref) / ref_l2, h1_semi_error(u, u_ref) / ref_h1,
                      now_seconds() - t0};
  });
  report.finalize_slopes();
  return report;
}

HybridCoefficient hybrid_coefficient(const System& sys, double m, double width,
                                     int degree, int samples, int traces) {
  if (sys.name != "layered")
    throw ConfigError("hybrid_coefficient: only layered systems are supported");
  if (sys.theta && std::fabs(*sys.theta) > 1e-12)
    throw ConfigError("hybrid_coefficient: tilted layers are not supported");
  const double eps = sys.epsilon;
  const TensorField wrapped = wrap(sys.A, eps);

  const int nt = sys.dim == 1 ? 1 : std::max(2, traces);
  std::vector<HybridField> bank(nt);
  std::vector<double> offsets(nt, 0.0);
  for (int j = 0; j < nt; ++j) {
    offsets[j] = nt == 1 ? 0.0 : double(j) / (nt - 1);
    const double x2 = offsets[j];
    const SampledTrace trace = SampledTrace::sample(
        [&](double t) { return wrapped.eval({t, x2}).a11; }, samples);
    bank[j] = hybrid_dilate(trace, m, width, degree);
  }

  HybridCoefficient out;
  // the slow model: c0 + c1 x1 (+ c2 x2 recovered across the trace bank)
  const auto& coeffs0 = bank[0].modes.smooth.coeffs;
  double c0 = coeffs0.empty() ? 0.0 : coeffs0[0];
  double c1 = coeffs0.size() > 1 ? coeffs0[1] : 0.0;
  if (sys.dim == 1) {
    out.smooth_coeffs = {c0, c1};
  } else {
    double sum_c1 = 0.0;
    std::vector<double> icepts(nt);
    for (int j = 0; j < nt; ++j) {
      icepts[j] = bank[j].modes.smooth.coeffs.empty() ? 0.0
                                                      : bank[j].modes.smooth.coeffs[0];
      sum_c1 += bank[j].modes.smooth.coeffs.size() > 1 ? bank[j].modes.smooth.coeffs[1]
                                                       : 0.0;
    }
    const Polynomial cross = fit_monomials(offsets, icepts, 1, 0.0);
    out.smooth_coeffs = {cross.coeffs[0], sum_c1 / nt,
                         cross.coeffs.size() > 1 ? cross.coeffs[1] : 0.0};
  }

  auto shared = std::make_shared<std::vector<HybridField>>(std::move(bank));
  out.field.dim = sys.dim;
  out.field.ell_r = 0.5 * sys.A.ell_r;  // heuristic: spot-checked by the assembler
  out.field.ell_M = 1.5 * sys.A.ell_M;
  out.field.eval = [shared, nt, dim = sys.dim](Point x) {
    double value;
    if (nt == 1) {
      value = (*shared)[0](x[0]);
    } else {
      const double pos = std::clamp(x[1], 0.0, 1.0) * (nt - 1);
      const int j = std::min(int(pos), nt - 2);
      const double f = pos - j;
      value = (1.0 - f) * (*shared)[j](x[0]) + f * (*shared)[j + 1](x[0]);
    }
    return SymTensor::isotropic(dim, value);
  };
  return out;
}

IntegratedResult run_integrated_test(const Config& cfg) {
  const System sys = system_from_config(cfg, "layered");
  const double eps = sys.epsilon;
  const double nu = cfg.get_double("method", "nu", 0.5);
  const double frac = cfg.get_double("mesh", "frac", 1.0 / 6.5);
  const int cap_n = cfg.get_int("mesh", "cap_n", 512);
  const int refine = cfg.get_int("reference", "refine", 4);
  const double rel_tol = cfg.get_double("solver", "rel_tol", 1e-10);
  const bool force = cfg.get_int("flags", "force", 0) != 0;
  const bool with_budget = cfg.get_int("flags", "budget", 0) != 0;
  const bool with_hybrid = sys.name == "layered" && cfg.get_int("flags", "hybrid", 1) != 0;
  const int hybrid_samples = cfg.get_int("hybrid", "samples", 4096);
  const int hybrid_traces = cfg.get_int("hybrid", "traces", 9);
  const int hybrid_degree = cfg.get_int("hybrid", "degree", 2);
  const double hybrid_width = cfg.get_double("hybrid", "width_over_eps", 3.0) * eps;
  std::vector<double> m_values = {2, 4, 6, 8};
  if (cfg.has("sweep", "values")) m_values = cfg.get_list("sweep", "values");

  const TensorField abar = reference_tensor(sys, cfg);

  IntegratedResult result;
  std::vector<std::string> names = {"local_L2", "local_L8", "partial"};
  if (with_hybrid) names.push_back("hybrid");
  for (const auto& n : names) result.methods[n].rows.resize(m_values.size());
  if (with_budget) result.budget.resize(m_values.size());

  parallel_for(int(m_values.size()), [&](int i) {
    const double m = m_values[i];
    const double me = m * eps;
    std::map<int, NodalField> ref_cache;  // ref mesh n -> homogenized solution
    const auto reference_for = [&](int n_test) -> const NodalField& {
      const int n_ref = refine * n_test;
      auto it = ref_cache.find(n_ref);
      if (it == ref_cache.end())
        it = ref_cache.emplace(n_ref, solve_on(build_mesh(sys.dim, n_ref), abar, sys.f,
                                               rel_tol)).first;
      return it->second;
    };

    const auto run_method = [&](const std::string& name, const TensorField& coeff,
                                const AlignedMesh& am) {
      const double t0 = now_seconds();
      const MeshPtr mesh = build_mesh(sys.dim, am.n);
      const NodalField u = solve_on(mesh, coeff, sys.f, rel_tol);
      const NodalField& u0 = reference_for(am.n);
      const RelErrors err = relative_errors(u, u0);
      result.methods[name].rows[i] = {m, err.l2, err.h1, now_seconds() - t0};
      return u;
    };

    const AlignedMesh am2 = align_mesh(2.0 * me, frac * me, cap_n);
    enforce_scale_condition(am2.h, m, eps, am2.L, force);
    const DilationParams p2{am2.L, m, nu};
    const TensorField local2 = dilate_local(wrap(sys.A, eps), p2);
    const NodalField u_local2 = run_method("local_L2", local2, am2);

    const AlignedMesh am8 = align_mesh(8.0 * me, frac * me, cap_n);
    enforce_scale_condition(am8.h, m, eps, am8.L, force);
    const DilationParams p8{am8.L, m, nu};
    run_method("local_L8", dilate_local(wrap(sys.A, eps), p8), am8);

    run_method("partial", wrap(sys.A, m * eps), am2);

    if (with_hybrid) {
      const HybridCoefficient hyb = hybrid_coefficient(sys, m, hybrid_width,
                                                       hybrid_degree, hybrid_samples,
                                                       hybrid_traces);
      run_method("hybrid", hyb.field, am2);
      if (i == 0) result.hybrid_smooth_coeffs = hyb.smooth_coeffs;
    }

    if (with_budget) {
      const MeshPtr ref_mesh = build_mesh(sys.dim, refine * am2.n);
      const NodalField& u0_ref = reference_for(am2.n);
      const NodalField u_d_ref = solve_on(ref_mesh, local2, sys.f, rel_tol);
      const NodalField u_0d_ref =
          solve_on(ref_mesh, dilate_local(abar, p2), sys.f, rel_tol);
      const double den = l2_norm(u0_ref);
      result.budget[i] = {m, l2_error(u_local2, u0_ref) / den,
                          l2_error(u_local2, u_d_ref) / den,
                          l2_error(u_d_ref, u_0d_ref) / den,
                          l2_error(u_0d_ref, u0_ref) / den};
    }
  });
  for (auto& [name, rep] : result.methods) {
    rep.notes.push_back("sweep=integrated system=" + sys.name + " method=" + name +
                        " eps=" + format_g12(eps));
    rep.finalize_slopes();
  }
  return result;
}

std::string ChannelResult::csv_header() {
  return "param,u_naive,u_aware,flux_naive,flux_aware,seconds\n";
}

std::string ChannelResult::csv_rows(const std::vector<ChannelRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += format_g12(r.param) + ',' + format_g12(r.u_naive) + ',' +
           format_g12(r.u_aware) + ',' + format_g12(r.flux_naive) + ',' +
           format_g12(r.flux_aware) + ',' + format_g12(r.seconds) + '\n';
  }
  return out;
}

ChannelResult run_channel_study(const Config& cfg) {
  const System sys = system_from_config(cfg, "channel");
  if (!sys.channel) throw ConfigError("run_channel_study: system must be 'channel'");
  const double eps = sys.epsilon;
  const double nu = cfg.get_double("method", "nu", 0.5);
  const double frac = cfg.get_double("mesh", "frac", 1.0 / 6.5);
  const int cap_n = cfg.get_int("mesh", "cap_n", 1 << 20);
  const int refine = cfg.get_int("reference", "refine", 4);
  const double rel_tol = cfg.get_double("solver", "rel_tol", 1e-10);
  const bool force = cfg.get_int("flags", "force", 0) != 0;
  std::vector<double> m_values = {2, 3, 4};
  if (cfg.has("sweep", "m_values")) m_values = cfg.get_list("sweep", "m_values");
  std::vector<double> L_values = {0.25, 0.2, 1.0 / 6.0, 0.125};
  if (cfg.has("sweep", "L_values")) L_values = cfg.get_list("sweep", "L_values");
  const double L_for_m = cfg.get_double("method", "L", 0.25);
  const double m_for_L = cfg.get_double("method", "m", 2.0);

  const TensorField abar = reference_tensor(sys, cfg);
  const TensorField wrapped_full = wrap(sys.A, eps);
  const TensorField wrapped_osc = wrap(*sys.oscillation, eps);

  ChannelResult result;
  struct Job {
    double m, L;
    bool is_m_row;
    int index;
  };
  std::vector<Job> jobs;
  for (size_t i = 0; i < m_values.size(); ++i)
    jobs.push_back({m_values[i], L_for_m, true, int(i)});
  for (size_t i = 0; i < L_values.size(); ++i)
    jobs.push_back({m_for_L, L_values[i], false, int(i)});
  result.vs_m.resize(m_values.size());
  result.vs_L.resize(L_values.size());

  parallel_for(int(jobs.size()), [&](int j) {
    const Job job = jobs[j];
    const double t0 = now_seconds();
    const AlignedMesh am = align_mesh(job.L, frac * job.m * eps, cap_n);
    enforce_scale_condition(am.h, job.m, eps, am.L, force);
    const DilationParams params{am.L, job.m, nu};
    const MeshPtr mesh = build_mesh(2, am.n);
    const MeshPtr ref_mesh = build_mesh(2, refine * am.n);

    const TensorField naive = dilate_local(wrapped_full, params);
    const TensorField aware =
        dilate_structure_aware({*sys.structure, wrapped_osc}, params);

    const NodalField u_ref = solve_on(ref_mesh, abar, sys.f, rel_tol);
    const NodalField u_n = solve_on(mesh, naive, sys.f, rel_tol);
    const NodalField u_a = solve_on(mesh, aware, sys.f, rel_tol);
    const ElementField fl_ref = flux(u_ref, abar);
    const ElementField fl_n = flux(u_n, naive);
    const ElementField fl_a = flux(u_a, aware);

    const double u_den = l2_norm(u_ref);
    const double fl_den = flux_component_norm(fl_ref, 0);
    ChannelRow row;
    row.param = job.is_m_row ? job.m : am.L;
    row.u_naive = l2_error(u_n, u_ref) / u_den;
    row.u_aware = l2_error(u_a, u_ref) / u_den;
    row.flux_naive = flux_component_error(fl_n, fl_ref, 0) / fl_den;
    row.flux_aware = flux_component_error(fl_a, fl_ref, 0) / fl_den;
    row.seconds = now_seconds() - t0;
    (job.is_m_row ? result.vs_m : result.vs_L)[job.index] = row;

    if (job.is_m_row && job.index == 0) {
      result.u_naive = u_n;
      result.u_aware = u_a;
      result.u_ref = u_ref;
      result.flux_naive = fl_n;
      result.flux_aware = fl_a;
      result.flux_ref = fl_ref;
    }
  });
  return result;
}

}  // namespace meso
