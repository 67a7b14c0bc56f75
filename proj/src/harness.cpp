#include "stfem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

namespace stfem {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::function<double(double)> gaussian_nodal_field(double amplitude, std::uint64_t seed) {
  constexpr int kNodes = 257;
  std::mt19937_64 rng(seed);
  std::vector<double> values(kNodes);
  for (int i = 0; i < kNodes; ++i) {
    // Box-Muller on the hand-rolled uniform keeps the field platform-stable
    const double u1 = std::max(uniform01(rng), 1e-300);
    const double u2 = uniform01(rng);
    values[i] = amplitude * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  values.front() = values.back() = 0.0;
  return [values = std::move(values)](double x) {
    const double pos = std::clamp(x, 0.0, 1.0) * (kNodes - 1);
    const int s = std::min(static_cast<int>(pos), kNodes - 2);
    const double w = pos - s;
    return (1.0 - w) * values[s] + w * values[s + 1];
  };
}

SpaceTimeMesh make_mesh(int n, double horizon, double perturb_amplitude, std::uint64_t seed) {
  SpaceTimeMesh mesh = generate_structured(n, horizon);
  if (perturb_amplitude > 0.0) mesh = perturb_interior(mesh, perturb_amplitude, seed);
  return mesh;
}

}  // namespace

TargetData make_target(double delta) {
  if (delta < 0.0) throw std::invalid_argument("make_target: delta must be nonnegative");
  TargetData t;
  t.delta = delta;
  const double damp = std::exp(-M_PI * M_PI);
  t.problem.observed = [damp, delta](double x) {
    return damp * std::sin(M_PI * x) + delta * std::sin(10.0 * M_PI * x);
  };
  t.problem.exact_initial = [](double x) { return std::sin(M_PI * x); };
  return t;
}

TargetData make_target(double delta, double noise_amplitude, std::uint64_t noise_seed) {
  TargetData t = make_target(delta);
  if (noise_amplitude == 0.0) return t;
  auto field = gaussian_nodal_field(noise_amplitude, noise_seed);
  auto base = t.problem.observed;
  t.problem.observed = [base, field](double x) { return base(x) + field(x); };
  return t;
}

StudyResult run_study_h(const ExperimentConfig& config) {
  if (config.n_values.empty() || config.deltas.empty())
    throw std::invalid_argument("run_study_h: empty parameter list");
  StudyResult result;
  const TargetData target = make_target(config.deltas.front());
  for (int n : config.n_values) {
    const SpaceTimeMesh mesh =
        make_mesh(n, config.horizon, config.perturb_amplitude, config.seed);
    TikhonovConfig tc;
    tc.rho = config.rho;
    tc.path = config.path;
    tc.cg_tol = config.cg_tol;
    tc.cg_maxit = config.cg_maxit;
    tc.delta = target.delta;
    const Reconstruction rec = reconstruct(mesh, tc, target.problem);
    result.rows.push_back({1.0 / n, rec.l2_vs_exact, rec.l2_vs_oracle, rec.cg_iterations});
  }
  return result;
}

StudyResult run_study_noise(const ExperimentConfig& config) {
  if (config.n_values.empty() || config.deltas.empty())
    throw std::invalid_argument("run_study_noise: empty parameter list");
  StudyResult result;
  const SpaceTimeMesh mesh =
      make_mesh(config.n_values.front(), config.horizon, config.perturb_amplitude, config.seed);
  for (double delta : config.deltas) {
    const TargetData target = make_target(delta);
    TikhonovConfig tc;
    tc.rho = config.rho;
    tc.path = config.path;
    tc.cg_tol = config.cg_tol;
    tc.cg_maxit = config.cg_maxit;
    tc.delta = delta;
    const Reconstruction rec = reconstruct(mesh, tc, target.problem);
    result.rows.push_back({delta, rec.l2_vs_exact, rec.l2_vs_oracle, rec.cg_iterations});
  }
  return result;
}

void write_study_csv(const StudyResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_study_csv: cannot open " + path);
  out << "param,l2_vs_exact,l2_vs_oracle,iterations\n";
  for (const StudyRow& row : result.rows)
    out << format17(row.param) << ',' << format17(row.l2_vs_exact) << ','
        << format17(row.l2_vs_oracle) << ',' << row.iterations << '\n';
  if (!out) throw std::runtime_error("write_study_csv: write failed for " + path);
}

void write_reconstruction_csv(const TraceGrid& trace, const std::vector<double>& z,
                              const std::function<double(double)>& exact,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_reconstruction_csv: cannot open " + path);
  out << "x,z,exact\n";
  for (std::size_t k = 0; k < trace.x.size(); ++k) {
    const double zv = (trace.dof[k] >= 0) ? z[trace.dof[k]] : 0.0;
    out << format17(trace.x[k]) << ',' << format17(zv) << ',' << format17(exact(trace.x[k]))
        << '\n';
  }
  if (!out) throw std::runtime_error("write_reconstruction_csv: write failed for " + path);
}

void write_vtk(const SpaceTimeMesh& mesh, const DofPartition& dofs,
               const std::vector<double>& u, const std::vector<double>& p,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
  out << "# vtk DataFile Version 3.0\n";
  out << "space-time reconstruction\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices)
    out << format17(v[0]) << ' ' << format17(v[1]) << " 0\n";
  out << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << '\n';
  for (const auto& e : mesh.elements) out << "3 " << e[0] << ' ' << e[1] << ' ' << e[2] << '\n';
  out << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) out << "5\n";
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  for (const auto& [name, field] : {std::pair{"u", &u}, std::pair{"p", &p}}) {
    out << "SCALARS " << name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const int dof = dofs.stacked[v];
      out << format17(dof >= 0 ? (*field)[dof] : 0.0) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write_vtk: write failed for " + path);
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_config_file: cannot open " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("parse_config_file: " + path + ": line " +
                               std::to_string(line_no) + ": expected 'key = value'");
    entries.emplace_back(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return entries;
}

// ---------------------------------------------------------------------------
// command line

namespace {

struct CliOptions {
  int n = 64;
  double horizon = 1.0;
  double rho = 1e-14;
  double delta = 0.0;
  std::string path = "reduced";
  double perturb = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  double cg_tol = 1e-12;
  int cg_maxit = 20000;
  double noise_amp = 0.0;
  std::uint64_t noise_seed = 0;
  int modes = kDefaultModes;
  std::string n_list = "16,32,64";
  std::string delta_list = "0.5,0.4,0.3,0.2,1e-1,1e-3,1e-5";
  bool dump_matrices = false;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) items.push_back(item);
  return items;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const std::string& item : split_list(text)) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size() || v < 2)
      throw std::invalid_argument("list entry '" + item + "' is not a valid refinement");
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("empty refinement list");
  return values;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (const std::string& item : split_list(text)) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() || v < 0.0)
      throw std::invalid_argument("list entry '" + item + "' is not a valid noise level");
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("empty noise level list");
  return values;
}

SolvePath parse_path(const std::string& name) {
  if (name == "coupled") return SolvePath::Coupled;
  if (name == "reduced") return SolvePath::Reduced;
  if (name == "kkt") return SolvePath::FullKkt;
  throw CLI::ValidationError("--path", "must be one of coupled|reduced|kkt");
}

std::filesystem::path prepare_out_dir(const std::string& out) {
  const std::filesystem::path dir = out.empty() ? "." : out;
  std::filesystem::create_directories(dir);
  return dir;
}

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--t", opt.horizon, "final time T")->check(CLI::PositiveNumber);
  cmd->add_option("--perturb", opt.perturb, "interior vertex perturbation amplitude");
  cmd->add_option("--seed", opt.seed, "perturbation seed");
  cmd->add_option("--out", opt.out, "output directory");
}

// Flat 'key = value' configuration files are expanded into flags before
// parsing; explicit command-line flags win over file entries.
int expand_config_argument(std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        std::cerr << "error: --config expects a file name\n";
        return 1;
      }
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (config_path.empty()) return 0;
  try {
    for (const auto& [key, value] : parse_config_file(config_path)) {
      const std::string flag = "--" + key;
      bool present = false;
      for (const std::string& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
      if (!present) {
        args.push_back(flag);
        args.push_back(value);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cli_mesh(const CliOptions& opt) {
  const SpaceTimeMesh mesh = make_mesh(opt.n, opt.horizon, opt.perturb, opt.seed);
  const auto dir = prepare_out_dir(opt.out);
  const auto path = dir / "mesh.txt";
  write_mesh(mesh, path.string());
  std::cout << "mesh: " << mesh.num_vertices() << " vertices, " << mesh.num_elements()
            << " elements -> " << path.string() << "\n";
  return 0;
}

int cli_forward(const CliOptions& opt) {
  const SpaceTimeMesh mesh = make_mesh(opt.n, opt.horizon, opt.perturb, opt.seed);
  const GlobalMatrices gm = assemble_global(mesh, build_partition(mesh));
  const ForwardOperator fo = build_forward(gm);
  const std::vector<double> z = initial_interpolant(gm, [](double x) { return std::sin(M_PI * x); });
  const ForwardOperator::StateFields s = fo.forward_solve(z);

  const double damp = std::exp(-M_PI * M_PI * opt.horizon);
  const auto exact_t = [damp](double x) { return damp * std::sin(M_PI * x); };
  const auto ut_fn = trace_function(gm.traceT, s.ut);
  const double rel = l2_error(ut_fn, exact_t) / l2_error(exact_t, [](double) { return 0.0; });

  const auto dir = prepare_out_dir(opt.out);
  write_reconstruction_csv(gm.traceT, s.ut, exact_t, (dir / "terminal.csv").string());
  std::vector<double> u(gm.dofs.n_union());
  std::copy(s.u0.begin(), s.u0.end(), u.begin());
  std::copy(s.ui.begin(), s.ui.end(), u.begin() + gm.dofs.n0);
  std::copy(s.ut.begin(), s.ut.end(), u.begin() + gm.dofs.n0 + gm.dofs.ni);
  const std::vector<double> p(gm.dofs.n_union(), 0.0);
  write_vtk(mesh, gm.dofs, u, p, (dir / "forward.vtk").string());
  std::cout << "forward: N=" << opt.n << " T=" << opt.horizon
            << " relative terminal error=" << format17(rel) << "\n";
  return 0;
}

int cli_reconstruct(const CliOptions& opt) {
  const SpaceTimeMesh mesh = make_mesh(opt.n, opt.horizon, opt.perturb, opt.seed);
  const TargetData target = make_target(opt.delta, opt.noise_amp, opt.noise_seed);
  TikhonovConfig tc;
  tc.rho = opt.rho;
  tc.path = parse_path(opt.path);
  tc.cg_tol = opt.cg_tol;
  tc.cg_maxit = opt.cg_maxit;
  tc.delta = opt.delta;
  const Reconstruction rec = reconstruct(mesh, tc, target.problem);

  const auto dir = prepare_out_dir(opt.out);
  const GlobalMatrices gm = assemble_global(mesh, build_partition(mesh));
  write_reconstruction_csv(gm.trace0, rec.z, target.problem.exact_initial,
                           (dir / "reconstruction.csv").string());
  write_vtk(mesh, gm.dofs, rec.u, rec.p, (dir / "reconstruction.vtk").string());
  if (opt.dump_matrices) {
    write_matrix_market(gm.kii, (dir / "kii.mtx").string());
    write_matrix_market(gm.k0i, (dir / "k0i.mtx").string());
    write_matrix_market(gm.kit, (dir / "kit.mtx").string());
    write_matrix_market(gm.kti, (dir / "kti.mtx").string());
    write_matrix_market(gm.ktt, (dir / "ktt.mtx").string());
    write_matrix_market(gm.m00, (dir / "m00.mtx").string());
    write_matrix_market(gm.mtt, (dir / "mtt.mtx").string());
  }
  std::cout << "reconstruct: N=" << opt.n << " rho=" << opt.rho << " delta=" << opt.delta
            << " path=" << opt.path << " l2_vs_exact=" << format17(rec.l2_vs_exact)
            << " l2_vs_oracle=" << format17(rec.l2_vs_oracle)
            << " iterations=" << rec.cg_iterations << "\n";
  return 0;
}

int cli_study_h(const CliOptions& opt) {
  ExperimentConfig cfg;
  cfg.n_values = parse_int_list(opt.n_list);
  cfg.horizon = opt.horizon;
  cfg.rho = opt.rho;
  cfg.deltas = {opt.delta};
  cfg.path = parse_path(opt.path);
  cfg.perturb_amplitude = opt.perturb;
  cfg.seed = opt.seed;
  cfg.cg_tol = opt.cg_tol;
  cfg.cg_maxit = opt.cg_maxit;
  const StudyResult result = run_study_h(cfg);
  const auto dir = prepare_out_dir(opt.out);
  write_study_csv(result, (dir / "study_h.csv").string());
  for (const StudyRow& row : result.rows)
    std::cout << "h=" << format17(row.param) << " l2_vs_exact=" << format17(row.l2_vs_exact)
              << " l2_vs_oracle=" << format17(row.l2_vs_oracle) << "\n";
  return 0;
}

int cli_study_noise(const CliOptions& opt) {
  ExperimentConfig cfg;
  cfg.n_values = {opt.n};
  cfg.horizon = opt.horizon;
  cfg.rho = opt.rho;
  cfg.deltas = parse_double_list(opt.delta_list);
  cfg.path = parse_path(opt.path);
  cfg.perturb_amplitude = opt.perturb;
  cfg.seed = opt.seed;
  cfg.cg_tol = opt.cg_tol;
  cfg.cg_maxit = opt.cg_maxit;
  const StudyResult result = run_study_noise(cfg);
  const auto dir = prepare_out_dir(opt.out);
  write_study_csv(result, (dir / "study_noise.csv").string());
  for (const StudyRow& row : result.rows)
    std::cout << "delta=" << format17(row.param) << " l2_vs_exact=" << format17(row.l2_vs_exact)
              << " l2_vs_oracle=" << format17(row.l2_vs_oracle) << "\n";
  return 0;
}

int cli_oracle(const CliOptions& opt) {
  const TargetData target = make_target(opt.delta);
  const SineSeries observed = sine_coefficients(target.problem.observed, opt.modes);
  const SpectralModel model(opt.modes, opt.horizon);
  const SineSeries solution = model.tikhonov(observed, opt.rho);

  const auto dir = prepare_out_dir(opt.out);
  std::ofstream out(dir / "oracle.csv");
  if (!out) throw std::runtime_error("oracle: cannot open output file");
  out << "x,u0_oracle,exact\n";
  constexpr int kPoints = 257;
  for (int i = 0; i < kPoints; ++i) {
    const double x = static_cast<double>(i) / (kPoints - 1);
    out << format17(x) << ',' << format17(evaluate_series(solution, x)) << ','
        << format17(target.problem.exact_initial(x)) << '\n';
  }

  std::cout << "mode sigma observed filtered\n";
  for (int m = 0; m < std::min(12, opt.modes); ++m)
    std::cout << (m + 1) << ' ' << format17(model.sigma[m]) << ' '
              << format17(observed.coefficients[m]) << ' '
              << format17(solution.coefficients[m]) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Space-time finite element reconstruction of initial heat data"};
  app.require_subcommand(1);
  app.footer(
      "Each subcommand also accepts --config <file> with plain 'key = value' lines;\n"
      "explicit flags take precedence over file entries.");
  CliOptions opt;

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "generate (and optionally perturb) a mesh");
  mesh_cmd->add_option("--n", opt.n, "grid refinements per direction")->check(CLI::Range(2, 4096));
  add_common_options(mesh_cmd, opt);

  CLI::App* forward_cmd =
      app.add_subcommand("forward", "forward evolution of the interpolated exact initial datum");
  forward_cmd->add_option("--n", opt.n)->check(CLI::Range(2, 4096));
  add_common_options(forward_cmd, opt);

  CLI::App* rec_cmd = app.add_subcommand("reconstruct", "single Tikhonov reconstruction");
  rec_cmd->add_option("--n", opt.n)->check(CLI::Range(2, 4096));
  rec_cmd->add_option("--rho", opt.rho, "regularization parameter (positive)");
  rec_cmd->add_option("--delta", opt.delta, "noise amplitude of the observation");
  rec_cmd->add_option("--path", opt.path, "coupled|reduced|kkt");
  rec_cmd->add_option("--cg-tol", opt.cg_tol);
  rec_cmd->add_option("--cg-maxit", opt.cg_maxit);
  rec_cmd->add_option("--noise-amp", opt.noise_amp, "extra Gaussian nodal noise amplitude");
  rec_cmd->add_option("--noise-seed", opt.noise_seed);
  rec_cmd->add_flag("--dump-matrices", opt.dump_matrices, "write assembled blocks (matrix market)");
  add_common_options(rec_cmd, opt);

  CLI::App* sh_cmd = app.add_subcommand("study-h", "mesh refinement study");
  sh_cmd->add_option("--n-list", opt.n_list, "comma separated mesh refinements");
  sh_cmd->add_option("--rho", opt.rho);
  sh_cmd->add_option("--delta", opt.delta);
  sh_cmd->add_option("--path", opt.path);
  sh_cmd->add_option("--cg-tol", opt.cg_tol);
  sh_cmd->add_option("--cg-maxit", opt.cg_maxit);
  add_common_options(sh_cmd, opt);

  CLI::App* sn_cmd = app.add_subcommand("study-noise", "noise level study");
  sn_cmd->add_option("--n", opt.n)->check(CLI::Range(2, 4096));
  sn_cmd->add_option("--delta-list", opt.delta_list, "comma separated noise amplitudes");
  sn_cmd->add_option("--rho", opt.rho);
  sn_cmd->add_option("--path", opt.path);
  sn_cmd->add_option("--cg-tol", opt.cg_tol);
  sn_cmd->add_option("--cg-maxit", opt.cg_maxit);
  add_common_options(sn_cmd, opt);

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "analytic spectral reference solution");
  oracle_cmd->add_option("--rho", opt.rho);
  oracle_cmd->add_option("--delta", opt.delta);
  oracle_cmd->add_option("--modes", opt.modes)->check(CLI::Range(1, 10000));
  add_common_options(oracle_cmd, opt);

  std::vector<std::string> expanded = args;
  if (const int code = expand_config_argument(expanded); code != 0) return code;

  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 1;
  }

  try {
    if (*rec_cmd || *sh_cmd || *sn_cmd || *oracle_cmd) {
      if (!(opt.rho > 0.0)) {
        std::cerr << "error: --rho must be positive\n";
        return 1;
      }
    }
    if (opt.delta < 0.0) {
      std::cerr << "error: --delta must be nonnegative\n";
      return 1;
    }
    if (*mesh_cmd) return cli_mesh(opt);
    if (*forward_cmd) return cli_forward(opt);
    if (*rec_cmd) return cli_reconstruct(opt);
    if (*sh_cmd) return cli_study_h(opt);
    if (*sn_cmd) return cli_study_noise(opt);
    if (*oracle_cmd) return cli_oracle(opt);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace stfem
