#include "stfem/inverse.hpp"

#include <algorithm>
#include <cmath>

namespace stfem {

ForwardOperator build_forward(const GlobalMatrices& gm) {
  ForwardOperator fo;
  fo.n0_ = gm.dofs.n0;
  fo.ni_ = gm.dofs.ni;
  fo.nt_ = gm.dofs.nt;
  fo.k0i_ = gm.k0i;
  fo.kti_ = gm.kti;
  fo.kit_ = gm.kit;
  fo.m00_ = gm.m00;
  fo.mtt_ = gm.mtt;
  fo.mh_ = gm.mh;

  try {
    fo.kii_lu_ = lu_factor(gm.kii);
    fo.m00_lu_ = lu_factor(gm.m00);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("build_forward: inconsistent assembly: ") + e.what());
  }

  // Schur complement column by column: S e_c = ktt e_c - kit kii^{-1} (kti e_c)
  fo.schur_ = DenseMatrix(fo.nt_, fo.nt_);
  std::vector<double> unit(fo.nt_, 0.0);
  for (int c = 0; c < fo.nt_; ++c) {
    unit.assign(fo.nt_, 0.0);
    unit[c] = 1.0;
    const std::vector<double> kti_col = spmv(gm.kti, unit);
    const std::vector<double> interior = fo.kii_lu_.solve(kti_col);
    const std::vector<double> down = spmv(gm.kit, interior);
    const std::vector<double> ktt_col = spmv(gm.ktt, unit);
    for (int r = 0; r < fo.nt_; ++r) fo.schur_(r, c) = ktt_col[r] - down[r];
  }
  try {
    fo.schur_lu_ = dense_lu_factor(fo.schur_);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("build_forward: singular terminal Schur complement: ") +
                              e.what());
  }
  return fo;
}

ForwardOperator::StateFields ForwardOperator::forward_solve(const std::vector<double>& z) const {
  if (static_cast<int>(z.size()) != n0_)
    throw std::invalid_argument("forward_solve: dimension mismatch");
  StateFields s;
  s.u0 = m00_lu_.solve(spmv(mh_, z, /*transpose=*/true));
  const std::vector<double> t1 = spmv(k0i_, s.u0);
  const std::vector<double> t2 = kii_lu_.solve(t1);
  s.ut = dense_lu_solve(schur_lu_, spmv(kit_, t2));
  // interior rows read k0i u0 + kii ui + kti ut = 0
  std::vector<double> rhs = spmv(kti_, s.ut);
  for (int i = 0; i < ni_; ++i) rhs[i] += t1[i];
  s.ui = kii_lu_.solve(rhs);
  for (double& v : s.ui) v = -v;
  return s;
}

std::vector<double> ForwardOperator::apply(const std::vector<double>& z) const {
  if (static_cast<int>(z.size()) != n0_)
    throw std::invalid_argument("ForwardOperator::apply: dimension mismatch");
  const std::vector<double> u0 = m00_lu_.solve(spmv(mh_, z, /*transpose=*/true));
  const std::vector<double> t2 = kii_lu_.solve(spmv(k0i_, u0));
  return dense_lu_solve(schur_lu_, spmv(kit_, t2));
}

ForwardOperator::AdjointFields ForwardOperator::adjoint_solve(const std::vector<double>& w) const {
  if (static_cast<int>(w.size()) != nt_)
    throw std::invalid_argument("adjoint_solve: dimension mismatch");
  AdjointFields a;
  a.pt = dense_lu_solve(schur_lu_, w, /*transpose=*/true);
  a.pi = kii_lu_.solve(spmv(kit_, a.pt, /*transpose=*/true), /*transpose=*/true);
  for (double& v : a.pi) v = -v;
  std::vector<double> rhs = spmv(k0i_, a.pi, /*transpose=*/true);
  for (double& v : rhs) v = -v;
  a.p0 = m00_lu_.solve(rhs);
  return a;
}

std::vector<double> ForwardOperator::apply_transpose(const std::vector<double>& w) const {
  const AdjointFields a = adjoint_solve(w);
  return spmv(mh_, a.p0);
}

ReducedSolution solve_reduced(const ForwardOperator& fo, double rho,
                              const std::vector<double>& f, double cg_tol, int cg_maxit) {
  if (!(rho > 0.0)) throw std::invalid_argument("solve_reduced: rho must be positive");
  if (static_cast<int>(f.size()) != fo.nt())
    throw std::invalid_argument("solve_reduced: dimension mismatch");

  const auto normal_op = [&](const std::vector<double>& z) {
    std::vector<double> out = fo.apply_transpose(spmv(fo.mtt(), fo.apply(z)));
    const std::vector<double> mass = spmv(fo.mh(), z);  // control mass: trace space
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += rho * mass[i];
    return out;
  };
  const std::vector<double> rhs = fo.apply_transpose(f);

  const CgResult res = cg(normal_op, rhs, cg_tol, cg_maxit);
  return {res.x, res.iterations, res.relative_residual};
}

namespace {

void add_block(TripletList& t, const CsrMatrix& a, int row_off, int col_off, double scale,
               bool transpose) {
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p) {
      const int j = a.columns[p];
      if (!transpose)
        t.add(row_off + i, col_off + j, scale * a.values[p]);
      else
        t.add(row_off + j, col_off + i, scale * a.values[p]);
    }
}

std::vector<double> segment(const std::vector<double>& x, int begin, int len) {
  return std::vector<double>(x.begin() + begin, x.begin() + begin + len);
}

}  // namespace

CoupledSolution solve_coupled(const GlobalMatrices& gm, double rho,
                              const std::vector<double>& f) {
  if (!(rho > 0.0)) throw std::invalid_argument("solve_coupled: rho must be positive");
  const int n0 = gm.dofs.n0, ni = gm.dofs.ni, nt = gm.dofs.nt;
  if (static_cast<int>(f.size()) != nt)
    throw std::invalid_argument("solve_coupled: dimension mismatch");

  const int ou0 = 0, oui = n0, out = n0 + ni, opi = n0 + ni + nt, opt = n0 + 2 * ni + nt;
  const int dim = n0 + 2 * ni + 2 * nt;
  TripletList t(dim, dim);
  add_block(t, gm.m00, ou0, ou0, rho, false);
  add_block(t, gm.k0i, ou0, opi, -1.0, true);
  add_block(t, gm.kii, oui, opi, -1.0, true);
  add_block(t, gm.kit, oui, opt, -1.0, true);
  add_block(t, gm.mtt, out, out, 1.0, false);
  add_block(t, gm.kti, out, opi, -1.0, true);
  add_block(t, gm.ktt, out, opt, -1.0, true);
  add_block(t, gm.k0i, opi, ou0, 1.0, false);
  add_block(t, gm.kii, opi, oui, 1.0, false);
  add_block(t, gm.kti, opi, out, 1.0, false);
  add_block(t, gm.kit, opt, oui, 1.0, false);
  add_block(t, gm.ktt, opt, out, 1.0, false);

  std::vector<double> rhs(dim, 0.0);
  std::copy(f.begin(), f.end(), rhs.begin() + out);

  // trailing pivots scale with rho; the compensated scalar keeps them meaningful
  const LuFactorizationDD lu = lu_factor_dd(t.compress());
  const std::vector<double> sol = lu.solve(rhs);

  CoupledSolution cs;
  cs.u0 = segment(sol, ou0, n0);
  cs.ui = segment(sol, oui, ni);
  cs.ut = segment(sol, out, nt);
  cs.pi = segment(sol, opi, ni);
  cs.pt = segment(sol, opt, nt);
  cs.factor_nnz = lu.factor_nnz();
  return cs;
}

KktSolution solve_full_kkt(const GlobalMatrices& gm, double rho, const std::vector<double>& f) {
  if (!(rho > 0.0)) throw std::invalid_argument("solve_full_kkt: rho must be positive");
  const int n0 = gm.dofs.n0, ni = gm.dofs.ni, nt = gm.dofs.nt;
  if (static_cast<int>(f.size()) != nt)
    throw std::invalid_argument("solve_full_kkt: dimension mismatch");

  const int ou0 = 0, oui = n0, out = n0 + ni, oz = n0 + ni + nt, op0 = 2 * n0 + ni + nt,
            opi = 3 * n0 + ni + nt, opt = 3 * n0 + 2 * ni + nt;
  const int dim = 3 * n0 + 2 * ni + 2 * nt;
  TripletList t(dim, dim);
  add_block(t, gm.m00, ou0, op0, -1.0, false);
  add_block(t, gm.k0i, ou0, opi, -1.0, true);
  add_block(t, gm.kii, oui, opi, -1.0, true);
  add_block(t, gm.kit, oui, opt, -1.0, true);
  add_block(t, gm.mtt, out, out, 1.0, false);
  add_block(t, gm.kti, out, opi, -1.0, true);
  add_block(t, gm.ktt, out, opt, -1.0, true);
  add_block(t, gm.mh, oz, oz, rho, false);  // control mass: trace space, so mh itself
  add_block(t, gm.mh, oz, op0, 1.0, false);
  add_block(t, gm.m00, op0, ou0, 1.0, false);
  add_block(t, gm.mh, op0, oz, -1.0, true);
  add_block(t, gm.k0i, opi, ou0, 1.0, false);
  add_block(t, gm.kii, opi, oui, 1.0, false);
  add_block(t, gm.kti, opi, out, 1.0, false);
  add_block(t, gm.kit, opt, oui, 1.0, false);
  add_block(t, gm.ktt, opt, out, 1.0, false);

  std::vector<double> rhs(dim, 0.0);
  std::copy(f.begin(), f.end(), rhs.begin() + out);

  const LuFactorizationDD lu = lu_factor_dd(t.compress());
  const std::vector<double> sol = lu.solve(rhs);

  KktSolution ks;
  ks.u0 = segment(sol, ou0, n0);
  ks.ui = segment(sol, oui, ni);
  ks.ut = segment(sol, out, nt);
  ks.z = segment(sol, oz, n0);
  ks.p0 = segment(sol, op0, n0);
  ks.pi = segment(sol, opi, ni);
  ks.pt = segment(sol, opt, nt);
  ks.factor_nnz = lu.factor_nnz();
  return ks;
}

double tikhonov_cost(const ForwardOperator& fo, double rho, const std::vector<double>& f,
                     const std::vector<double>& z) {
  const std::vector<double> ut = fo.apply(z);
  const std::vector<double> m_ut = spmv(fo.mtt(), ut);
  const std::vector<double> m_z = spmv(fo.mh(), z);
  return 0.5 * dot(m_ut, ut) - dot(f, ut) + 0.5 * rho * dot(m_z, z);
}

double gradient_residual(const ForwardOperator& fo, double rho, const std::vector<double>& f,
                         const std::vector<double>& z) {
  std::vector<double> misfit = spmv(fo.mtt(), fo.apply(z));
  for (std::size_t i = 0; i < misfit.size(); ++i) misfit[i] -= f[i];
  std::vector<double> g = fo.apply_transpose(misfit);
  const std::vector<double> mass = spmv(fo.mh(), z);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += rho * mass[i];
  const double ref = norm2(fo.apply_transpose(f));
  return (ref > 0.0) ? norm2(g) / ref : norm2(g);
}

std::function<double(double)> trace_function(const TraceGrid& grid,
                                             const std::vector<double>& values) {
  std::vector<double> xs = grid.x;
  std::vector<double> vals(xs.size(), 0.0);
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (grid.dof[k] >= 0) vals[k] = values[grid.dof[k]];
  return [xs = std::move(xs), vals = std::move(vals)](double x) {
    if (x <= xs.front()) return vals.front();
    if (x >= xs.back()) return vals.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t s = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (x - xs[s]) / (xs[s + 1] - xs[s]);
    return (1.0 - w) * vals[s] + w * vals[s + 1];
  };
}

Reconstruction reconstruct(const SpaceTimeMesh& mesh, const TikhonovConfig& config,
                           const ReconstructionProblem& problem) {
  if (!(config.rho > 0.0)) throw std::invalid_argument("reconstruct: rho must be positive");

  const DofPartition dofs = build_partition(mesh);
  const GlobalMatrices gm = assemble_global(mesh, dofs);
  const ForwardOperator fo = build_forward(gm);
  const std::vector<double> f = terminal_load(gm, problem.observed);

  Reconstruction rec;
  switch (config.path) {
    case SolvePath::Reduced: {
      const ReducedSolution rs = solve_reduced(fo, config.rho, f, config.cg_tol, config.cg_maxit);
      rec.z = rs.z;
      rec.cg_iterations = rs.iterations;
      break;
    }
    case SolvePath::Coupled: {
      const CoupledSolution cs = solve_coupled(gm, config.rho, f);
      rec.z = cs.u0;  // control equals the initial trace for the trace-space control
      rec.lu_fill = cs.factor_nnz;
      break;
    }
    case SolvePath::FullKkt: {
      const KktSolution ks = solve_full_kkt(gm, config.rho, f);
      rec.z = ks.z;
      rec.lu_fill = ks.factor_nnz;
      break;
    }
  }

  // full state and adjoint fields over the union numbering
  const ForwardOperator::StateFields s = fo.forward_solve(rec.z);
  std::vector<double> misfit = spmv(gm.mtt, s.ut);
  for (std::size_t i = 0; i < misfit.size(); ++i) misfit[i] -= f[i];
  const ForwardOperator::AdjointFields a = fo.adjoint_solve(misfit);

  const int n0 = dofs.n0, ni = dofs.ni;
  rec.u.resize(dofs.n_union());
  rec.p.resize(dofs.n_union());
  std::copy(s.u0.begin(), s.u0.end(), rec.u.begin());
  std::copy(s.ui.begin(), s.ui.end(), rec.u.begin() + n0);
  std::copy(s.ut.begin(), s.ut.end(), rec.u.begin() + n0 + ni);
  std::copy(a.p0.begin(), a.p0.end(), rec.p.begin());
  std::copy(a.pi.begin(), a.pi.end(), rec.p.begin() + n0);
  std::copy(a.pt.begin(), a.pt.end(), rec.p.begin() + n0 + ni);

  rec.gradient_residual = gradient_residual(fo, config.rho, f, rec.z);

  const auto z_fn = trace_function(gm.trace0, rec.z);
  const double err_exact = l2_error(z_fn, problem.exact_initial);
  const double norm_exact =
      l2_error(problem.exact_initial, [](double) { return 0.0; });
  rec.l2_vs_exact = (norm_exact > 0.0) ? err_exact / norm_exact : err_exact;

  const SineSeries observed_series = sine_coefficients(problem.observed);
  const SineSeries oracle_z = tikhonov_solution(observed_series, config.rho, mesh.horizon);
  const double err_oracle = l2_error(oracle_z, z_fn);
  const double norm_oracle = l2_norm(oracle_z);
  rec.l2_vs_oracle = (norm_oracle > 0.0) ? err_oracle / norm_oracle : err_oracle;
  return rec;
}

double discrete_inf_sup(const GlobalMatrices& gm, double rho) {
  const int n0 = gm.dofs.n0, ni = gm.dofs.ni, nt = gm.dofs.nt;
  if (n0 + 1 > 16)
    throw std::invalid_argument(
        "discrete_inf_sup: dense diagnostic is limited to meshes with N <= 16");

  const int n = n0 + ni + nt;   // ansatz space
  const int ny = ni + nt;       // test functions vanishing on Sigma0
  const int dim = n + ny;

  // coupled optimality matrix, rows = (q, v) tests, columns = (u, p) trials
  TripletList t(dim, dim);
  add_block(t, gm.m00, 0, 0, rho, false);
  add_block(t, gm.k0i, 0, n + 0, -1.0, true);
  add_block(t, gm.kii, n0, n + 0, -1.0, true);
  add_block(t, gm.kit, n0, n + ni, -1.0, true);
  add_block(t, gm.mtt, n0 + ni, n0 + ni, 1.0, false);
  add_block(t, gm.kti, n0 + ni, n + 0, -1.0, true);
  add_block(t, gm.ktt, n0 + ni, n + ni, -1.0, true);
  add_block(t, gm.k0i, n + 0, 0, 1.0, false);
  add_block(t, gm.kii, n + 0, n0, 1.0, false);
  add_block(t, gm.kti, n + 0, n0 + ni, 1.0, false);
  add_block(t, gm.kit, n + ni, n0, 1.0, false);
  add_block(t, gm.ktt, n + ni, n0 + ni, 1.0, false);
  const DenseMatrix bmat = dense_from_csr(t.compress());

  // Gram matrix of the ansatz norm: kx + ct^T kx^{-1} ct, dense at this scale
  const LuFactorization kx_lu = lu_factor(gm.kx);
  DenseMatrix gram_x = dense_from_csr(gm.kx);
  std::vector<double> col(n, 0.0);
  DenseMatrix w(n, n);
  for (int j = 0; j < n; ++j) {
    col.assign(n, 0.0);
    col[j] = 1.0;
    const std::vector<double> ct_col = spmv(gm.ct, col);
    const std::vector<double> wj = kx_lu.solve(ct_col);
    for (int i = 0; i < n; ++i) w(i, j) = wj[i];
  }
  const CsrMatrix ct_t = csr_transpose(gm.ct);
  for (int i = 0; i < n; ++i) {
    // row i of ct^T times columns of w
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = ct_t.offsets[i]; p < ct_t.offsets[i + 1]; ++p)
        s += ct_t.values[p] * w(ct_t.columns[p], j);
      gram_x(i, j) += s;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (gram_x(i, j) + gram_x(j, i));
      gram_x(i, j) = gram_x(j, i) = avg;
    }

  // test-space part: kx restricted to functions vanishing on Sigma0
  const CsrMatrix kx_y0 = csr_block(gm.kx, n0, n, n0, n);
  DenseMatrix gram(dim, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram(i, j) = gram_x(i, j);
  const DenseMatrix ky = dense_from_csr(kx_y0);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < ny; ++j) gram(n + i, n + j) = ky(i, j);

  const SymmetricEigen eig = jacobi_eigensolver(gram);
  if (eig.values.front() <= 0.0)
    throw SingularMatrixError("discrete_inf_sup: norm Gram matrix not positive definite");
  DenseMatrix gram_inv_sqrt(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k)
        s += eig.vectors(i, k) * eig.vectors(j, k) / std::sqrt(eig.values[k]);
      gram_inv_sqrt(i, j) = s;
    }

  // C = G^{-1/2} B G^{-1/2}; both test and trial carry the same Gram matrix
  DenseMatrix tmp(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += gram_inv_sqrt(i, k) * bmat(k, j);
      tmp(i, j) = s;
    }
  DenseMatrix c(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += tmp(i, k) * gram_inv_sqrt(k, j);
      c(i, j) = s;
    }

  return singular_values(c).front();
}

}  // namespace stfem
