#pragma once

#include <functional>
#include <vector>

#include "stfem/assembly.hpp"
#include "stfem/mesh.hpp"
#include "stfem/oracle.hpp"
#include "stfem/solvers.hpp"

namespace stfem {

// Discrete solution operator mapping initial nodal data to terminal nodal
// data: eliminate the interior unknowns through the factored interior block
// and the dense terminal Schur complement. Immutable after build; concurrent
// applications are safe.
class ForwardOperator {
 public:
  struct StateFields {
    std::vector<double> u0, ui, ut;
  };
  struct AdjointFields {
    std::vector<double> p0, pi, pt;
  };

  int n0() const { return n0_; }
  int ni() const { return ni_; }
  int nt() const { return nt_; }
  const DenseMatrix& schur() const { return schur_; }
  const CsrMatrix& m00() const { return m00_; }
  const CsrMatrix& mtt() const { return mtt_; }
  const CsrMatrix& mh() const { return mh_; }

  // terminal trace of the state driven by initial datum z
  std::vector<double> apply(const std::vector<double>& z) const;
  // exact transpose of apply()
  std::vector<double> apply_transpose(const std::vector<double>& w) const;

  StateFields forward_solve(const std::vector<double>& z) const;
  // backward sweep for w given on SigmaT: pt = S^{-T} w, pi, p0
  AdjointFields adjoint_solve(const std::vector<double>& w) const;

 private:
  friend ForwardOperator build_forward(const GlobalMatrices& gm);

  int n0_ = 0, ni_ = 0, nt_ = 0;
  CsrMatrix k0i_, kti_, kit_, m00_, mtt_, mh_;
  LuFactorization kii_lu_;
  LuFactorization m00_lu_;
  DenseMatrix schur_;  // ktt - kit kii^{-1} kti
  DenseLu schur_lu_;
};

ForwardOperator build_forward(const GlobalMatrices& gm);

enum class SolvePath { Reduced, Coupled, FullKkt };

struct TikhonovConfig {
  double rho = 1e-14;
  SolvePath path = SolvePath::Reduced;
  double cg_tol = 1e-12;
  int cg_maxit = 20000;
  double delta = 0.0;  // recorded noise amplitude of the observation
};

struct ReducedSolution {
  std::vector<double> z;
  int iterations = 0;
  double relative_residual = 0.0;
};

// CG on the normal operator A^T M_TT A + rho M, one forward plus one adjoint
// sweep per application.
ReducedSolution solve_reduced(const ForwardOperator& fo, double rho,
                              const std::vector<double>& f, double cg_tol, int cg_maxit);

struct CoupledSolution {
  std::vector<double> u0, ui, ut, pi, pt;
  std::size_t factor_nnz = 0;
};

// Sparse LU on the five-block optimality system with unknowns
// (u0, ui, ut, pi, pt); the recovered control is u0.
CoupledSolution solve_coupled(const GlobalMatrices& gm, double rho,
                              const std::vector<double>& f);

struct KktSolution {
  std::vector<double> u0, ui, ut, z, p0, pi, pt;
  std::size_t factor_nnz = 0;
};

// Sparse LU on the seven-block system keeping z and p0 as unknowns; validates
// the eliminations z = u0 and p0 = -rho z.
KktSolution solve_full_kkt(const GlobalMatrices& gm, double rho, const std::vector<double>& f);

// Quadratic part of the discrete Tikhonov objective,
//   1/2 (M_TT A z, A z) - (f, A z) + rho/2 (M z, z),
// i.e. the objective up to the data-only constant.
double tikhonov_cost(const ForwardOperator& fo, double rho, const std::vector<double>& f,
                     const std::vector<double>& z);

// || A^T (M_TT A z - f) + rho M z || / || A^T f ||
double gradient_residual(const ForwardOperator& fo, double rho, const std::vector<double>& f,
                         const std::vector<double>& z);

struct ReconstructionProblem {
  std::function<double(double)> observed;
  std::function<double(double)> exact_initial;
};

struct Reconstruction {
  std::vector<double> z;  // nodal initial datum on Sigma0
  std::vector<double> u;  // state over the union numbering
  std::vector<double> p;  // adjoint over the union numbering
  double l2_vs_exact = 0.0;   // relative L2(0,1) error against the exact initial datum
  double l2_vs_oracle = 0.0;  // relative L2(0,1) error against the spectral Tikhonov solution
  int cg_iterations = 0;
  std::size_t lu_fill = 0;
  double gradient_residual = 0.0;
};

// Piecewise linear synthesis of nodal values on a trace grid (zero at the
// Dirichlet endpoints), evaluable anywhere in [0,1].
std::function<double(double)> trace_function(const TraceGrid& grid,
                                             const std::vector<double>& values);

Reconstruction reconstruct(const SpaceTimeMesh& mesh, const TikhonovConfig& config,
                           const ReconstructionProblem& problem);

// Smallest generalized singular value of the coupled optimality form in the
// ansatz/test norms; dense diagnostic, refused for meshes finer than N = 16.
double discrete_inf_sup(const GlobalMatrices& gm, double rho);

}  // namespace stfem
