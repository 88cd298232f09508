// Command-line front end: configure a coefficient system, run solves and
// error sweeps, and emit CSV reports. Fully deterministic; identical configs
// produce byte-identical CSV apart from the seconds column.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "meso/averaging.hpp"
#include "meso/config.hpp"
#include "meso/decompose.hpp"
#include "meso/dilation.hpp"
#include "meso/fem.hpp"
#include "meso/harness.hpp"
#include "meso/homogenize.hpp"
#include "meso/report.hpp"
#include "meso/systems.hpp"

namespace {

using namespace meso;

Config load_config(const std::string& path, bool force) {
  if (!std::filesystem::exists(path))
    throw ConfigError("config file not found: " + path);
  Config cfg = Config::parse_file(path);
  if (force) {
    // inject the override so scale-condition checks pass
    Config forced = Config::parse_string("[flags]\nforce = 1\n");
    std::ostringstream merged;
    std::ifstream in(path);
    merged << in.rdbuf() << "\n[flags]\nforce = 1\n";
    cfg = Config::parse_string(merged.str());
  }
  return cfg;
}

std::string output_path(const Config& cfg, const std::string& fallback) {
  return cfg.get_string("output", "path", fallback);
}

std::string stem_of(const std::string& path) {
  const auto dot = path.rfind('.');
  return dot == std::string::npos ? path : path.substr(0, dot);
}

void write_report(const ErrorReport& report, const std::string& path) {
  std::ostringstream os;
  report.write_csv(os);
  write_file(path, os.str());
  std::cout << "wrote " << path << "\n";
}

DilationParams params_from(const Config& cfg) {
  return {cfg.get_double("method", "L", 0.25), cfg.get_double("method", "m", 4.0),
          cfg.get_double("method", "nu", 0.5)};
}

int cmd_solve(const Config& cfg) {
  const System sys = make_system(cfg.get_string("system", "name", "layered"), [&] {
    ParamMap p;
    for (const char* key :
         {"eta", "theta", "epsilon", "dim", "eps_c", "k", "b", "eta_c", "eta_o", "s"})
      if (cfg.has("system", key)) p[key] = cfg.get_double("system", key);
    return p;
  }());
  const std::string method = cfg.get_string("method", "kind", "none");
  const double rel_tol = cfg.get_double("solver", "rel_tol", 1e-10);
  const int n = cfg.get_int("mesh", "n", 128);

  TensorField coeff;
  if (method == "none") {
    coeff = wrap(sys.A, sys.epsilon);
  } else if (method == "local") {
    coeff = dilate_local(wrap(sys.A, sys.epsilon), params_from(cfg));
  } else if (method == "partial") {
    coeff = wrap(sys.A, params_from(cfg).m * sys.epsilon);
  } else if (method == "structure-aware") {
    if (!sys.structure)
      throw ConfigError("structure-aware method requires the channel system");
    coeff = dilate_structure_aware(
        {*sys.structure, wrap(*sys.oscillation, sys.epsilon)}, params_from(cfg));
  } else if (method == "hybrid") {
    coeff = hybrid_coefficient(sys, params_from(cfg).m,
                               cfg.get_double("hybrid", "width_over_eps", 3.0) *
                                   sys.epsilon,
                               cfg.get_int("hybrid", "degree", 2),
                               cfg.get_int("hybrid", "samples", 4096),
                               cfg.get_int("hybrid", "traces", 9))
                .field;
  } else if (method == "homogenized") {
    coeff = reference_tensor(sys, cfg);
  } else {
    throw ConfigError("unknown method kind: " + method);
  }

  const NodalField u = solve(assemble(build_mesh(sys.dim, n), coeff, sys.f), rel_tol);
  const std::string path = output_path(cfg, "solution.csv");
  std::ostringstream os;
  write_csv(u, os);
  write_file(path, os.str());
  std::cout << "wrote " << path << "\n";
  if (cfg.has("output", "flux_path")) {
    std::ostringstream fs;
    write_csv(flux(u, coeff), fs);
    write_file(cfg.get_string("output", "flux_path"), fs.str());
    std::cout << "wrote " << cfg.get_string("output", "flux_path") << "\n";
  }
  return 0;
}

int cmd_homogenize(const Config& cfg) {
  const System sys = make_system(cfg.get_string("system", "name", "het"), [&] {
    ParamMap p;
    for (const char* key : {"eta", "theta", "epsilon", "dim"})
      if (cfg.has("system", key)) p[key] = cfg.get_double("system", key);
    return p;
  }());
  const TensorTable table = tensor_table(sys.A, cfg.get_int("reference", "table_grid", 17),
                                         cfg.get_int("reference", "cell_n", 64));
  std::ostringstream os;
  table.write_csv(os);
  const std::string path = output_path(cfg, "tensor_table.csv");
  write_file(path, os.str());
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_dilate_preview(const Config& cfg) {
  const System sys = make_system(cfg.get_string("system", "name", "sin1d"), [&] {
    ParamMap p;
    if (cfg.has("system", "epsilon")) p["epsilon"] = cfg.get_double("system", "epsilon");
    if (cfg.has("system", "dim")) p["dim"] = cfg.get_double("system", "dim");
    if (cfg.has("system", "eta")) p["eta"] = cfg.get_double("system", "eta");
    return p;
  }());
  const DilationParams params = params_from(cfg);
  const int samples = cfg.get_int("output", "samples", 2048);
  const TensorField a_eps = wrap(sys.A, sys.epsilon);
  const TensorField local = dilate_local(a_eps, params);
  const TensorField partial = wrap(dilate_partial(sys.A, params.m), sys.epsilon);

  std::ostringstream os;
  os << "x,a,local,partial\n";
  for (int i = 0; i < samples; ++i) {
    const double x = double(i) / (samples - 1);
    os << format_g12(x) << ',' << format_g12(a_eps.eval({x, 0.0}).a11) << ','
       << format_g12(local.eval({x, 0.0}).a11) << ','
       << format_g12(partial.eval({x, 0.0}).a11) << '\n';
  }
  const std::string path = output_path(cfg, "dilate_preview.csv");
  write_file(path, os.str());
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_sweep(const Config& cfg, const std::string& kind) {
  if (kind == "dilation") {
    write_report(run_dilation_sweep(cfg), output_path(cfg, "dilation_sweep.csv"));
  } else if (kind == "homog") {
    const auto reports = run_homogenization_sweep(cfg);
    const std::string stem = stem_of(output_path(cfg, "homog_sweep.csv"));
    for (const auto& [m, rep] : reports) {
      std::ostringstream name;
      name << stem << "_m" << int(m) << ".csv";
      write_report(rep, name.str());
    }
  } else if (kind == "disc") {
    write_report(run_discretization_sweep(cfg), output_path(cfg, "disc_sweep.csv"));
  } else if (kind == "integrated") {
    const IntegratedResult result = run_integrated_test(cfg);
    const std::string stem = stem_of(output_path(cfg, "integrated.csv"));
    for (const auto& [name, rep] : result.methods)
      write_report(rep, stem + "_" + name + ".csv");
    if (!result.hybrid_smooth_coeffs.empty()) {
      std::ostringstream os;
      os << "coefficient,value\n";
      for (size_t k = 0; k < result.hybrid_smooth_coeffs.size(); ++k)
        os << 'c' << k << ',' << format_g12(result.hybrid_smooth_coeffs[k]) << '\n';
      write_file(stem + "_hybrid_smooth.csv", os.str());
      std::cout << "wrote " << stem + "_hybrid_smooth.csv" << "\n";
    }
    if (!result.budget.empty()) {
      std::ostringstream os;
      os << "m,total,discretization,homogenization,dilation\n";
      for (const auto& b : result.budget)
        os << format_g12(b.m) << ',' << format_g12(b.total) << ','
           << format_g12(b.discretization) << ',' << format_g12(b.homogenization) << ','
           << format_g12(b.dilation) << '\n';
      write_file(stem + "_budget.csv", os.str());
      std::cout << "wrote " << stem + "_budget.csv" << "\n";
    }
  } else {
    throw ConfigError("unknown sweep kind: " + kind);
  }
  return 0;
}

int cmd_channel(const Config& cfg) {
  const ChannelResult result = run_channel_study(cfg);
  const std::string stem = stem_of(output_path(cfg, "channel.csv"));
  write_file(stem + "_vs_m.csv",
             ChannelResult::csv_header() + ChannelResult::csv_rows(result.vs_m));
  write_file(stem + "_vs_L.csv",
             ChannelResult::csv_header() + ChannelResult::csv_rows(result.vs_L));
  std::cout << "wrote " << stem + "_vs_m.csv" << "\n";
  std::cout << "wrote " << stem + "_vs_L.csv" << "\n";
  for (const auto& [tag, field] :
       {std::pair<const char*, const ElementField*>{"naive", &result.flux_naive},
        {"aware", &result.flux_aware},
        {"ref", &result.flux_ref}}) {
    std::ostringstream os;
    write_csv(*field, os);
    write_file(stem + "_flux_" + tag + ".csv", os.str());
    std::cout << "wrote " << stem + "_flux_" + tag + ".csv" << "\n";
  }
  return 0;
}

int cmd_avg1d(const Config& cfg) {
  const System sys = make_system(cfg.get_string("system", "name", "sin1d"), [&] {
    ParamMap p;
    if (cfg.has("system", "epsilon")) p["epsilon"] = cfg.get_double("system", "epsilon");
    return p;
  }());
  if (sys.dim != 1) throw ConfigError("avg1d: 1D systems only");
  const double eps = sys.epsilon;
  const std::string f_kind = cfg.get_string("avg", "f", "zero");
  std::function<double(double, double)> f;
  std::function<double(double, double)> dfdu;
  if (f_kind == "zero") {
    f = [](double, double) { return 0.0; };
    dfdu = [](double, double) { return 0.0; };
  } else if (f_kind == "one") {
    f = [](double, double) { return 1.0; };
    dfdu = [](double, double) { return 0.0; };
  } else if (f_kind == "minus_u") {
    f = [](double, double u) { return -u; };
    dfdu = [](double, double) { return -1.0; };
  } else {
    throw ConfigError("avg1d: unknown source kind " + f_kind);
  }
  TwoScaleSystem sys2 = reformulate(sys.A, f, eps);
  sys2.dsource_du = dfdu;

  const std::string integrator = cfg.get_string("avg", "integrator", "euler");
  const double dx = cfg.get_double("avg", "dx", eps / 50.0);
  const double tau = cfg.get_double("avg", "tau", dx);
  const int n_steps = cfg.get_int("avg", "n_steps", int(std::round(1.0 / dx)));
  IntegrateOptions opts;
  opts.allow_large_step = cfg.get_int("flags", "force", 0) != 0;

  Trajectory traj;
  const std::string mode = cfg.get_string("avg", "mode", "ivp");
  if (mode == "shoot") {
    const double target = cfg.get_double("avg", "target", 1.0);
    const IntegratorKind kind = integrator == "euler"      ? IntegratorKind::Euler
                                : integrator == "seamless" ? IntegratorKind::Seamless
                                                           : IntegratorKind::Flavors;
    const ShootResult res = shoot(sys2, target, kind, dx, tau, n_steps,
                                  cfg.get_double("avg", "v0", 1.0), opts);
    std::cout << "v0=" << format_g12(res.v0) << " residual=" << format_g12(res.residual)
              << " converged=" << (res.converged ? "yes" : "no") << "\n";
    traj = res.trajectory;
  } else {
    const double v0 = cfg.get_double("avg", "v0", 1.0);
    if (integrator == "euler")
      traj = integrate_euler(sys2, dx, n_steps, {0.0, v0, 0.0}, {1.0, 0.0}, opts);
    else if (integrator == "seamless")
      traj = integrate_seamless(sys2, dx, tau, n_steps, {0.0, v0, 0.0}, {1.0, 0.0}, opts);
    else if (integrator == "flavors")
      traj = integrate_flavors(sys2, dx, tau, n_steps, {0.0, v0, 0.0}, {1.0, 0.0}, opts);
    else
      throw ConfigError("avg1d: unknown integrator " + integrator);
  }
  std::ostringstream os;
  traj.write_csv(os);
  const std::string path = output_path(cfg, "trajectory.csv");
  write_file(path, os.str());
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale elliptic workbench: dilation operators, reference "
               "homogenization, FEM solvers, and averaging integrators"};
  app.require_subcommand(1);

  std::string config_path;
  bool force = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "path to a key = value config file")
        ->required();
    sub->add_flag("--force", force, "override the scale-condition checks");
  };

  auto* solve_cmd = app.add_subcommand("solve", "solve one configured problem");
  auto* homog_cmd =
      app.add_subcommand("homogenize", "tabulate the homogenized tensor as CSV");
  auto* preview_cmd = app.add_subcommand(
      "dilate-preview", "sample a 1D coefficient and its dilations as CSV");
  auto* sweep_cmd = app.add_subcommand("sweep", "run an error sweep");
  std::string sweep_kind;
  sweep_cmd->add_option("kind", sweep_kind, "dilation | homog | disc | integrated")
      ->required();
  auto* channel_cmd =
      app.add_subcommand("channel", "naive vs structure-aware dilation study");
  auto* avg_cmd =
      app.add_subcommand("avg1d", "1D averaging integrators and shooting");
  for (auto* sub : {solve_cmd, homog_cmd, preview_cmd, sweep_cmd, channel_cmd, avg_cmd})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const meso::Config cfg = load_config(config_path, force);
    if (solve_cmd->parsed()) return cmd_solve(cfg);
    if (homog_cmd->parsed()) return cmd_homogenize(cfg);
    if (preview_cmd->parsed()) return cmd_dilate_preview(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, sweep_kind);
    if (channel_cmd->parsed()) return cmd_channel(cfg);
    if (avg_cmd->parsed()) return cmd_avg1d(cfg);
  } catch (const meso::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
