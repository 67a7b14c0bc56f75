#pragma once

#include <array>
#include <functional>
#include <vector>

#include "stfem/mesh.hpp"
#include "stfem/solvers.hpp"

namespace stfem {

// Degrees of freedom split into the Sigma0 / interior / SigmaT blocks; the
// stacked ("union") numbering is [Sigma0 | interior | SigmaT]. Dirichlet
// vertices carry no unknowns.
struct DofPartition {
  std::vector<int> block_local;  // per vertex, local index within its block (-1 for Dirichlet)
  std::vector<int> stacked;      // per vertex, index in the union numbering (-1 for Dirichlet)
  std::vector<int> sigma0_vertices;    // block-local -> vertex
  std::vector<int> interior_vertices;
  std::vector<int> sigmat_vertices;
  int n0 = 0, ni = 0, nt = 0;

  int n_union() const { return n0 + ni + nt; }
};

DofPartition build_partition(const SpaceTimeMesh& mesh);

// Nodes of the Sigma0 or SigmaT trace line, sorted by x; Dirichlet endpoints
// carry dof = -1.
struct TraceGrid {
  std::vector<double> x;
  std::vector<int> vertex;
  std::vector<int> dof;

  int segments() const { return static_cast<int>(x.size()) - 1; }
};

struct GlobalMatrices {
  DofPartition dofs;
  double horizon = 0.0;

  // blocks of the space-time form, rows = test dofs, columns = trial dofs
  CsrMatrix k0i;  // ni x n0  (interior tests, Sigma0 trials)
  CsrMatrix kii;  // ni x ni
  CsrMatrix kti;  // ni x nt
  CsrMatrix kit;  // nt x ni
  CsrMatrix ktt;  // nt x nt

  CsrMatrix m00;  // n0 x n0 trace mass on Sigma0
  CsrMatrix mtt;  // nt x nt trace mass on SigmaT
  CsrMatrix mh;   // control coupling; equals m00 when the control space is the trace space

  // over the union numbering
  CsrMatrix kx;  // spatial gradient part, symmetric positive definite
  CsrMatrix ct;  // time derivative coupling, entry (i,j) = integral of dphi_j/dt * phi_i

  TraceGrid trace0;
  TraceGrid traceT;
};

// Exact P1 element matrix of the space-time form:
//   entry(i,j) = area * dphi_j/dx * dphi_i/dx + dphi_j/dt * area / 3.
std::array<double, 9> element_matrix(const ElementGeometry& geom);

GlobalMatrices assemble_global(const SpaceTimeMesh& mesh, const DofPartition& dofs);

// Space-time form over all vertices including Dirichlet ones; its row sums
// vanish since constants are in the kernel of the trial slot.
CsrMatrix assemble_full_bform(const SpaceTimeMesh& mesh);

// f_i = integral of g(x) phi_i(x, T) dx, 5-point Gauss per trace segment.
std::vector<double> terminal_load(const GlobalMatrices& gm,
                                  const std::function<double(double)>& g);

std::vector<double> initial_interpolant(const GlobalMatrices& gm,
                                        const std::function<double(double)>& g);

struct ContinuityConstants {
  double friedrichs = 0.0;   // c_F = 1/pi on (0,1)
  double trace_mu = 0.0;     // trace constant
  double rho = 0.0;
  double bound_heat_form = 0.0;        // sqrt(2)
  double bound_optimality_form = 0.0;  // 2 (1 + rho) mu^2
};

ContinuityConstants continuity_constants(double horizon, double rho);

// Discrete norms of the ansatz and test spaces plus the two bilinear forms;
// holds a factorization of kx for the auxiliary Riesz solve.
class NormOperators {
 public:
  explicit NormOperators(const GlobalMatrices& gm);

  // || grad_x u ||_{L2(Q)}
  double test_space_norm(const std::vector<double>& u) const;
  // sqrt(||w_u||_Y^2 + ||u||_Y^2) with kx w_u = ct u
  double ansatz_space_norm(const std::vector<double>& u) const;

  // b(u, v): u trial, v test, both over the union numbering
  double heat_form(const std::vector<double>& u, const std::vector<double>& v) const;
  // B(u,p; v,q) = b(u,v) - b(q,p) + <u(T), q(T)> + rho <u(0), q(0)>
  double optimality_form(const std::vector<double>& u, const std::vector<double>& p,
                         const std::vector<double>& v, const std::vector<double>& q,
                         double rho) const;

 private:
  const GlobalMatrices* gm_;
  LuFactorization kx_lu_;
};

}  // namespace stfem
