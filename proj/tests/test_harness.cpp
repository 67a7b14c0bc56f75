#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stfem/harness.hpp"

using namespace stfem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::path(".") / name) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("manufactured target at the midpoint without noise") {
  const TargetData t = make_target(0.0);
  CHECK(t.problem.observed(0.5) == doctest::Approx(std::exp(-M_PI * M_PI)).epsilon(1e-12));
  CHECK(t.problem.observed(0.5) == doctest::Approx(5.17231e-5).epsilon(1e-5));
  CHECK(t.problem.exact_initial(0.5) == doctest::Approx(1.0));
}

TEST_CASE("manufactured target with noise evaluates the closed form") {
  const TargetData t = make_target(1e-5);
  const double expected =
      std::exp(-M_PI * M_PI) * std::sin(0.05 * M_PI) + 1e-5 * std::sin(0.5 * M_PI);
  CHECK(t.problem.observed(0.05) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(1.80913e-5).epsilon(1e-4));
}

TEST_CASE("noise amplitude maps to an L2 distance of delta over sqrt(2)") {
  for (double delta : {0.5, 1e-1, 1e-3}) {
    const TargetData noisy = make_target(delta);
    const TargetData clean = make_target(0.0);
    CHECK(l2_error(noisy.problem.observed, clean.problem.observed) ==
          doctest::Approx(delta / std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("make_target rejects negative noise amplitudes") {
  CHECK_THROWS_AS(make_target(-0.1), std::invalid_argument);
}

TEST_CASE("gaussian overlay is deterministic in the seed and vanishes at amplitude zero") {
  const TargetData a = make_target(1e-3, 0.01, 7);
  const TargetData b = make_target(1e-3, 0.01, 7);
  const TargetData c = make_target(1e-3, 0.01, 8);
  const TargetData plain = make_target(1e-3, 0.0, 7);
  bool differs = false;
  for (double x : {0.1, 0.37, 0.52, 0.9}) {
    CHECK(a.problem.observed(x) == b.problem.observed(x));
    if (a.problem.observed(x) != c.problem.observed(x)) differs = true;
    CHECK(plain.problem.observed(x) == make_target(1e-3).problem.observed(x));
  }
  CHECK(differs);
}

TEST_CASE("mesh refinement study decreases the error monotonically") {
  ExperimentConfig cfg;
  cfg.n_values = {16, 32, 64};
  cfg.deltas = {0.0};
  cfg.rho = 1e-14;
  cfg.cg_tol = 1e-15;
  const StudyResult result = run_study_h(cfg);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].param == doctest::Approx(1.0 / 16));
  CHECK(result.rows[2].param == doctest::Approx(1.0 / 64));
  CHECK(result.rows[1].l2_vs_exact < result.rows[0].l2_vs_exact);
  CHECK(result.rows[2].l2_vs_exact < result.rows[1].l2_vs_exact);
  for (const StudyRow& row : result.rows) CHECK(row.l2_vs_exact >= 0.0);
}

TEST_CASE("noise study is non-increasing as the noise level decreases") {
  ExperimentConfig cfg;
  cfg.n_values = {32};
  cfg.deltas = {0.5, 0.2, 1e-1, 1e-3, 1e-5};
  cfg.rho = 1e-14;
  cfg.cg_tol = 1e-15;
  const StudyResult result = run_study_noise(cfg);
  REQUIRE(result.rows.size() == 5);
  for (std::size_t k = 1; k < result.rows.size(); ++k)
    CHECK(result.rows[k].l2_vs_exact <= result.rows[k - 1].l2_vs_exact * (1.0 + 1e-9));
}

TEST_CASE("small noise amplitudes cost at most a factor two over clean data") {
  ExperimentConfig cfg;
  cfg.n_values = {64};
  cfg.deltas = {0.0, 1e-3, 1e-5};
  cfg.rho = 1e-14;
  cfg.cg_tol = 1e-15;
  const StudyResult result = run_study_noise(cfg);
  const double clean = result.rows[0].l2_vs_exact;
  CHECK(result.rows[1].l2_vs_exact <= 2.0 * clean);
  CHECK(result.rows[2].l2_vs_exact <= 2.0 * clean);
  // both rows are dominated by discretization, not by the filtered noise mode
  CHECK(std::abs(result.rows[2].l2_vs_exact - result.rows[1].l2_vs_exact) <= clean);
}

TEST_CASE("empty study configurations are rejected") {
  ExperimentConfig cfg;
  cfg.n_values = {};
  CHECK_THROWS_AS(run_study_h(cfg), std::invalid_argument);
  cfg.n_values = {16};
  cfg.deltas = {};
  CHECK_THROWS_AS(run_study_noise(cfg), std::invalid_argument);
}

TEST_CASE("study csv has the documented header and is byte-reproducible") {
  TempDir dir("harness_csv_test");
  ExperimentConfig cfg;
  cfg.n_values = {8, 16};
  cfg.deltas = {0.0};
  cfg.rho = 1e-14;
  cfg.cg_tol = 1e-15;

  const std::string path_a = (dir.path / "a.csv").string();
  const std::string path_b = (dir.path / "b.csv").string();
  write_study_csv(run_study_h(cfg), path_a);
  write_study_csv(run_study_h(cfg), path_b);

  const std::string a = slurp(path_a);
  CHECK(a.substr(0, a.find('\n')) == "param,l2_vs_exact,l2_vs_oracle,iterations");
  CHECK(count_lines(a) == 3);
  CHECK(a == slurp(path_b));
}

TEST_CASE("reconstruction csv lists every trace node including the endpoints") {
  TempDir dir("harness_recon_csv");
  const SpaceTimeMesh mesh = generate_structured(64, 1.0);
  const GlobalMatrices gm = assemble_global(mesh, build_partition(mesh));
  const std::vector<double> z(gm.dofs.n0, 0.25);
  const std::string path = (dir.path / "z.csv").string();
  write_reconstruction_csv(gm.trace0, z, [](double x) { return std::sin(M_PI * x); }, path);

  const std::string text = slurp(path);
  CHECK(count_lines(text) == 66);  // header + 65 nodes
  CHECK(text.substr(0, text.find('\n')) == "x,z,exact");
  // Dirichlet endpoints carry z = 0
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  CHECK(line == "0,0,0");
}

TEST_CASE("vtk export counts points and triangle cells") {
  TempDir dir("harness_vtk");
  const SpaceTimeMesh mesh = generate_structured(2, 1.0);
  const DofPartition dofs = build_partition(mesh);
  const std::vector<double> u(dofs.n_union(), 1.0);
  const std::vector<double> p(dofs.n_union(), -1.0);
  const std::string path = (dir.path / "out.vtk").string();
  write_vtk(mesh, dofs, u, p, path);

  const std::string text = slurp(path);
  CHECK(text.find("# vtk DataFile Version 3.0") == 0);
  CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(text.find("POINTS 9 double") != std::string::npos);
  CHECK(text.find("CELLS 8 32") != std::string::npos);
  CHECK(text.find("CELL_TYPES 8") != std::string::npos);
  CHECK(text.find("SCALARS u double 1") != std::string::npos);
  CHECK(text.find("SCALARS p double 1") != std::string::npos);
  // all eight cells are VTK triangles
  int triangles = 0;
  std::stringstream ss(text.substr(text.find("CELL_TYPES")));
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line) && line == "5") ++triangles;
  CHECK(triangles == 8);
}

TEST_CASE("config files parse key = value lines with comments") {
  TempDir dir("harness_config");
  const std::string path = (dir.path / "run.cfg").string();
  {
    std::ofstream out(path);
    out << "# reconstruction setup\n";
    out << "n = 16\n";
    out << "rho = 1e-10\n\n";
    out << "path = coupled  # direct solve\n";
  }
  const auto entries = parse_config_file(path);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0] == std::pair<std::string, std::string>{"n", "16"});
  CHECK(entries[1] == std::pair<std::string, std::string>{"rho", "1e-10"});
  CHECK(entries[2] == std::pair<std::string, std::string>{"path", "coupled"});

  {
    std::ofstream out(path);
    out << "just some words\n";
  }
  CHECK_THROWS_AS(parse_config_file(path), std::runtime_error);
}

TEST_CASE("cli: reconstruction happy path writes outputs and exits zero") {
  TempDir dir("harness_cli_recon");
  const int code = run_cli({"reconstruct", "--n", "16", "--rho", "1e-14", "--delta", "0",
                            "--path", "coupled", "--out", dir.path.string()});
  CHECK(code == 0);
  CHECK(std::filesystem::exists(dir.path / "reconstruction.csv"));
  CHECK(std::filesystem::exists(dir.path / "reconstruction.vtk"));
}

TEST_CASE("cli: rho must be positive") {
  CHECK(run_cli({"reconstruct", "--n", "8", "--rho", "0"}) == 1);
  CHECK(run_cli({"reconstruct", "--n", "8", "--rho", "-1e-5"}) == 1);
}

TEST_CASE("cli: unknown flags are usage errors") {
  CHECK(run_cli({"reconstruct", "--does-not-exist", "1"}) == 1);
  CHECK(run_cli({"no-such-command"}) == 1);
  CHECK(run_cli({}) == 1);
}

TEST_CASE("cli: help exits zero") {
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("cli: mesh and oracle subcommands run") {
  TempDir dir("harness_cli_misc");
  CHECK(run_cli({"mesh", "--n", "8", "--perturb", "0.2", "--seed", "3", "--out",
                 dir.path.string()}) == 0);
  CHECK(std::filesystem::exists(dir.path / "mesh.txt"));
  const MeshLoad load = read_mesh((dir.path / "mesh.txt").string());
  CHECK(load.mesh.num_vertices() == 81);

  CHECK(run_cli({"oracle", "--rho", "1e-14", "--delta", "1e-5", "--out",
                 dir.path.string()}) == 0);
  CHECK(std::filesystem::exists(dir.path / "oracle.csv"));
}

TEST_CASE("cli: forward subcommand reports the terminal trace") {
  TempDir dir("harness_cli_forward");
  CHECK(run_cli({"forward", "--n", "16", "--t", "0.1", "--out", dir.path.string()}) == 0);
  CHECK(std::filesystem::exists(dir.path / "terminal.csv"));
  CHECK(std::filesystem::exists(dir.path / "forward.vtk"));
}

TEST_CASE("cli: studies accept config files") {
  TempDir dir("harness_cli_cfg");
  const std::string cfg = (dir.path / "study.cfg").string();
  {
    std::ofstream out(cfg);
    out << "n-list = 8,16\n";
    out << "rho = 1e-12\n";
    out << "out = " << dir.path.string() << "\n";
  }
  CHECK(run_cli({"study-h", "--config", cfg}) == 0);
  CHECK(std::filesystem::exists(dir.path / "study_h.csv"));

  const std::string text = slurp((dir.path / "study_h.csv").string());
  CHECK(count_lines(text) == 3);
}

TEST_CASE("cli: study-noise with default levels reproduces the published ordering") {
  TempDir dir("harness_cli_noise");
  CHECK(run_cli({"study-noise", "--n", "64", "--out", dir.path.string()}) == 0);
  const std::string text = slurp((dir.path / "study_noise.csv").string());
  CHECK(count_lines(text) == 8);  // header + the seven default noise levels

  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  double prev = 1e300;
  double first = -1.0, last = -1.0;
  while (std::getline(ss, line)) {
    const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
    const double err = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    if (first < 0.0) first = err;
    last = err;
    CHECK(err <= prev * (1.0 + 1e-12));
    prev = err;
  }
  CHECK(first > last);  // delta = 0.5 is strictly worse than delta = 1e-5
}

TEST_CASE("cli: numerical failures exit with code two") {
  TempDir dir("harness_cli_fail");
  CHECK(run_cli({"reconstruct", "--n", "8", "--cg-maxit", "1", "--out",
                 dir.path.string()}) == 2);
}

TEST_CASE("cli runs are byte reproducible") {
  TempDir da("harness_cli_repro_a");
  TempDir db("harness_cli_repro_b");
  CHECK(run_cli({"reconstruct", "--n", "16", "--rho", "1e-12", "--delta", "1e-3", "--out",
                 da.path.string()}) == 0);
  CHECK(run_cli({"reconstruct", "--n", "16", "--rho", "1e-12", "--delta", "1e-3", "--out",
                 db.path.string()}) == 0);
  CHECK(slurp((da.path / "reconstruction.csv").string()) ==
        slurp((db.path / "reconstruction.csv").string()));
  CHECK(slurp((da.path / "reconstruction.vtk").string()) ==
        slurp((db.path / "reconstruction.vtk").string()));
}
