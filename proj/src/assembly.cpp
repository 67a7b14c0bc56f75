#include "stfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stfem {

namespace {

constexpr double kGaussNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
constexpr double kGaussWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                     0.4786286704993665, 0.2369268850561891};

TraceGrid build_trace_grid(const SpaceTimeMesh& mesh, const DofPartition& dofs, double level) {
  TraceGrid grid;
  std::vector<int> verts;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (std::abs(mesh.vertices[v][1] - level) <= kCoordTol) verts.push_back(v);
  std::sort(verts.begin(), verts.end(), [&](int a, int b) {
    return mesh.vertices[a][0] < mesh.vertices[b][0];
  });
  for (int v : verts) {
    grid.x.push_back(mesh.vertices[v][0]);
    grid.vertex.push_back(v);
    grid.dof.push_back(dofs.block_local[v]);
  }
  if (grid.x.size() < 3)
    throw std::invalid_argument("assemble_global: trace line has no interior nodes");
  if (grid.dof.front() != -1 || grid.dof.back() != -1)
    throw std::invalid_argument("assemble_global: trace line endpoints are not Dirichlet");
  for (int s = 0; s < grid.segments(); ++s)
    if (!(grid.x[s + 1] > grid.x[s]))
      throw std::invalid_argument("assemble_global: trace nodes are not strictly increasing");
  return grid;
}

CsrMatrix trace_mass(const TraceGrid& grid, int n) {
  TripletList t(n, n);
  for (int s = 0; s < grid.segments(); ++s) {
    const double len = grid.x[s + 1] - grid.x[s];
    const int da = grid.dof[s], db = grid.dof[s + 1];
    if (da >= 0) t.add(da, da, len / 3.0);
    if (db >= 0) t.add(db, db, len / 3.0);
    if (da >= 0 && db >= 0) {
      t.add(da, db, len / 6.0);
      t.add(db, da, len / 6.0);
    }
  }
  return t.compress();
}

}  // namespace

DofPartition build_partition(const SpaceTimeMesh& mesh) {
  DofPartition dofs;
  const int nv = mesh.num_vertices();
  dofs.block_local.assign(nv, -1);
  dofs.stacked.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    switch (mesh.tags[v]) {
      case BoundaryTag::Sigma0:
        dofs.block_local[v] = dofs.n0++;
        dofs.sigma0_vertices.push_back(v);
        break;
      case BoundaryTag::Interior:
        dofs.block_local[v] = dofs.ni++;
        dofs.interior_vertices.push_back(v);
        break;
      case BoundaryTag::SigmaT:
        dofs.block_local[v] = dofs.nt++;
        dofs.sigmat_vertices.push_back(v);
        break;
      case BoundaryTag::Dirichlet:
        break;
    }
  }
  for (int v = 0; v < nv; ++v) {
    switch (mesh.tags[v]) {
      case BoundaryTag::Sigma0:
        dofs.stacked[v] = dofs.block_local[v];
        break;
      case BoundaryTag::Interior:
        dofs.stacked[v] = dofs.n0 + dofs.block_local[v];
        break;
      case BoundaryTag::SigmaT:
        dofs.stacked[v] = dofs.n0 + dofs.ni + dofs.block_local[v];
        break;
      case BoundaryTag::Dirichlet:
        break;
    }
  }
  return dofs;
}

std::array<double, 9> element_matrix(const ElementGeometry& geom) {
  std::array<double, 9> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m[3 * i + j] = geom.area * geom.gradients[j][0] * geom.gradients[i][0] +
                     geom.gradients[j][1] * geom.area / 3.0;
  return m;
}

GlobalMatrices assemble_global(const SpaceTimeMesh& mesh, const DofPartition& dofs) {
  if (dofs.n0 == 0 || dofs.ni == 0 || dofs.nt == 0)
    throw std::invalid_argument("assemble_global: empty dof block (mesh too coarse)");

  GlobalMatrices gm;
  gm.dofs = dofs;
  gm.horizon = mesh.horizon;

  const int n = dofs.n_union();
  TripletList kx_t(n, n), ct_t(n, n);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    const auto& el = mesh.elements[e];
    for (int i = 0; i < 3; ++i) {
      const int row = dofs.stacked[el[i]];
      if (row < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int col = dofs.stacked[el[j]];
        if (col < 0) continue;
        kx_t.add(row, col, geom.area * geom.gradients[j][0] * geom.gradients[i][0]);
        ct_t.add(row, col, geom.gradients[j][1] * geom.area / 3.0);
      }
    }
  }
  gm.kx = kx_t.compress();
  gm.ct = ct_t.compress();

  const CsrMatrix bform = csr_add(gm.kx, gm.ct);
  const int o_i = dofs.n0;
  const int o_t = dofs.n0 + dofs.ni;
  gm.k0i = csr_block(bform, o_i, o_t, 0, o_i);
  gm.kii = csr_block(bform, o_i, o_t, o_i, o_t);
  gm.kti = csr_block(bform, o_i, o_t, o_t, n);
  gm.kit = csr_block(bform, o_t, n, o_i, o_t);
  gm.ktt = csr_block(bform, o_t, n, o_t, n);
  if (csr_block(bform, o_t, n, 0, o_i).nnz() != 0)
    throw std::invalid_argument(
        "assemble_global: an element couples the initial and terminal boundaries");

  gm.trace0 = build_trace_grid(mesh, dofs, 0.0);
  gm.traceT = build_trace_grid(mesh, dofs, mesh.horizon);
  gm.m00 = trace_mass(gm.trace0, dofs.n0);
  gm.mtt = trace_mass(gm.traceT, dofs.nt);
  gm.mh = gm.m00;  // control space = trace space of the ansatz space
  return gm;
}

CsrMatrix assemble_full_bform(const SpaceTimeMesh& mesh) {
  const int nv = mesh.num_vertices();
  TripletList t(nv, nv);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    const std::array<double, 9> m = element_matrix(geom);
    const auto& el = mesh.elements[e];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.add(el[i], el[j], m[3 * i + j]);
  }
  return t.compress();
}

std::vector<double> terminal_load(const GlobalMatrices& gm,
                                  const std::function<double(double)>& g) {
  std::vector<double> f(gm.dofs.nt, 0.0);
  const TraceGrid& grid = gm.traceT;
  for (int s = 0; s < grid.segments(); ++s) {
    const double xa = grid.x[s], xb = grid.x[s + 1];
    const double len = xb - xa;
    for (int q = 0; q < 5; ++q) {
      const double xg = 0.5 * (xa + xb) + 0.5 * len * kGaussNodes[q];
      const double w = 0.5 * len * kGaussWeights[q];
      const double val = g(xg);
      const double phi_b = (xg - xa) / len;
      if (grid.dof[s] >= 0) f[grid.dof[s]] += w * val * (1.0 - phi_b);
      if (grid.dof[s + 1] >= 0) f[grid.dof[s + 1]] += w * val * phi_b;
    }
  }
  return f;
}

std::vector<double> initial_interpolant(const GlobalMatrices& gm,
                                        const std::function<double(double)>& g) {
  std::vector<double> z(gm.dofs.n0, 0.0);
  for (std::size_t k = 0; k < gm.trace0.x.size(); ++k)
    if (gm.trace0.dof[k] >= 0) z[gm.trace0.dof[k]] = g(gm.trace0.x[k]);
  return z;
}

ContinuityConstants continuity_constants(double horizon, double rho) {
  if (!(horizon > 0.0)) throw std::invalid_argument("continuity_constants: T must be positive");
  ContinuityConstants c;
  c.friedrichs = 1.0 / M_PI;
  c.rho = rho;
  const double r = c.friedrichs / horizon;
  c.trace_mu = std::sqrt(1.0 + 0.5 * r * r + std::sqrt(0.25 * r * r * r * r + r * r));
  c.bound_heat_form = std::sqrt(2.0);
  c.bound_optimality_form = 2.0 * (1.0 + rho) * c.trace_mu * c.trace_mu;
  return c;
}

NormOperators::NormOperators(const GlobalMatrices& gm) : gm_(&gm), kx_lu_(lu_factor(gm.kx)) {}

double NormOperators::test_space_norm(const std::vector<double>& u) const {
  return std::sqrt(std::max(0.0, dot(u, spmv(gm_->kx, u))));
}

double NormOperators::ansatz_space_norm(const std::vector<double>& u) const {
  const std::vector<double> rhs = spmv(gm_->ct, u);
  const std::vector<double> w = kx_lu_.solve(rhs);
  // w' kx w equals w' ct u by construction of w
  const double dual_part = std::max(0.0, dot(w, rhs));
  const double grad_part = std::max(0.0, dot(u, spmv(gm_->kx, u)));
  return std::sqrt(dual_part + grad_part);
}

double NormOperators::heat_form(const std::vector<double>& u, const std::vector<double>& v) const {
  return dot(v, spmv(gm_->kx, u)) + dot(v, spmv(gm_->ct, u));
}

double NormOperators::optimality_form(const std::vector<double>& u, const std::vector<double>& p,
                                      const std::vector<double>& v, const std::vector<double>& q,
                                      double rho) const {
  const int n0 = gm_->dofs.n0, ni = gm_->dofs.ni, nt = gm_->dofs.nt;
  const int n = n0 + ni + nt;
  if (static_cast<int>(u.size()) != n || static_cast<int>(p.size()) != n ||
      static_cast<int>(v.size()) != n || static_cast<int>(q.size()) != n)
    throw std::invalid_argument("optimality_form: dimension mismatch");

  const std::vector<double> u_at_t(u.begin() + n0 + ni, u.end());
  const std::vector<double> q_at_t(q.begin() + n0 + ni, q.end());
  const std::vector<double> u_at_0(u.begin(), u.begin() + n0);
  const std::vector<double> q_at_0(q.begin(), q.begin() + n0);

  return heat_form(u, v) - heat_form(q, p) + dot(q_at_t, spmv(gm_->mtt, u_at_t)) +
         rho * dot(q_at_0, spmv(gm_->m00, u_at_0));
}

}  // namespace stfem
