#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stfem/inverse.hpp"

namespace stfem {

struct TargetData {
  ReconstructionProblem problem;
  double delta = 0.0;
};

// Manufactured observation x -> exp(-pi^2) sin(pi x) + delta sin(10 pi x);
// the matching exact initial datum is sin(pi x). An optional deterministic
// Gaussian nodal field (257-point grid, piecewise linear) can be overlaid for
// robustness experiments.
TargetData make_target(double delta);
TargetData make_target(double delta, double noise_amplitude, std::uint64_t noise_seed);

struct ExperimentConfig {
  std::vector<int> n_values{64};
  double horizon = 1.0;
  double rho = 1e-14;
  std::vector<double> deltas{0.0};
  SolvePath path = SolvePath::Reduced;
  double perturb_amplitude = 0.0;
  std::uint64_t seed = 0;
  double cg_tol = 1e-12;
  int cg_maxit = 20000;
  std::string out_dir;
};

struct StudyRow {
  double param = 0.0;  // mesh width h or noise amplitude delta
  double l2_vs_exact = 0.0;
  double l2_vs_oracle = 0.0;
  int iterations = 0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
};

// one reconstruction per N in config.n_values, delta fixed to deltas[0]
StudyResult run_study_h(const ExperimentConfig& config);
// one reconstruction per delta in config.deltas, N fixed to n_values[0]
StudyResult run_study_noise(const ExperimentConfig& config);

// CSV schema: "param,l2_vs_exact,l2_vs_oracle,iterations", 17 significant digits.
void write_study_csv(const StudyResult& result, const std::string& path);

// CSV schema: "x,z,exact", one row per Sigma0 trace node including the
// Dirichlet endpoints.
void write_reconstruction_csv(const TraceGrid& trace, const std::vector<double>& z,
                              const std::function<double(double)>& exact,
                              const std::string& path);

// Legacy ASCII VTK unstructured grid with point data u and p.
void write_vtk(const SpaceTimeMesh& mesh, const DofPartition& dofs,
               const std::vector<double>& u, const std::vector<double>& p,
               const std::string& path);

// Plain "key = value" lines; '#' starts a comment. Unknown keys are errors.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

// Entry point behind the command line tool; returns the process exit code
// (0 success, 1 usage error, 2 numerical failure).
int run_cli(const std::vector<std::string>& args);

}  // namespace stfem
