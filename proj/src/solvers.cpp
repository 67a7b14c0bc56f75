#include "stfem/solvers.hpp"

#include "stfem/doubledouble.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace stfem {

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void TripletList::add(int i, int j, double v) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw std::invalid_argument("TripletList::add: index out of range");
  is_.push_back(i);
  js_.push_back(j);
  vs_.push_back(v);
}

CsrMatrix TripletList::compress() const {
  const std::size_t m = is_.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (is_[a] != is_[b]) return is_[a] < is_[b];
    return js_[a] < js_[b];
  });

  CsrMatrix out;
  out.rows = rows_;
  out.cols = cols_;
  out.offsets.assign(static_cast<std::size_t>(rows_) + 1, 0);
  out.columns.reserve(m);
  out.values.reserve(m);

  std::size_t k = 0;
  for (int row = 0; row < rows_; ++row) {
    while (k < m && is_[order[k]] == row) {
      const int col = js_[order[k]];
      double sum = 0.0;
      while (k < m && is_[order[k]] == row && js_[order[k]] == col) {
        sum += vs_[order[k]];
        ++k;
      }
      out.columns.push_back(col);
      out.values.push_back(sum);
    }
    out.offsets[static_cast<std::size_t>(row) + 1] = static_cast<int>(out.columns.size());
  }
  return out;
}

CsrMatrix csr_identity(int n) {
  CsrMatrix a;
  a.rows = a.cols = n;
  a.offsets.resize(static_cast<std::size_t>(n) + 1);
  a.columns.resize(n);
  a.values.assign(n, 1.0);
  for (int i = 0; i <= n; ++i) a.offsets[i] = i;
  std::iota(a.columns.begin(), a.columns.end(), 0);
  return a;
}

CsrMatrix csr_transpose(const CsrMatrix& a) {
  CsrMatrix t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.offsets.assign(static_cast<std::size_t>(a.cols) + 1, 0);
  for (int c : a.columns) ++t.offsets[static_cast<std::size_t>(c) + 1];
  for (int j = 0; j < a.cols; ++j) t.offsets[j + 1] += t.offsets[j];
  t.columns.resize(a.columns.size());
  t.values.resize(a.values.size());
  std::vector<int> next(t.offsets.begin(), t.offsets.end() - 1);
  for (int i = 0; i < a.rows; ++i) {
    for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p) {
      const int dst = next[a.columns[p]]++;
      t.columns[dst] = i;
      t.values[dst] = a.values[p];
    }
  }
  return t;
}

CsrMatrix csr_add(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("csr_add: dimension mismatch");
  TripletList t(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p) t.add(i, a.columns[p], a.values[p]);
  for (int i = 0; i < b.rows; ++i)
    for (int p = b.offsets[i]; p < b.offsets[i + 1]; ++p) t.add(i, b.columns[p], b.values[p]);
  return t.compress();
}

CsrMatrix csr_block(const CsrMatrix& a, int r0, int r1, int c0, int c1) {
  if (r0 < 0 || r1 > a.rows || c0 < 0 || c1 > a.cols || r0 > r1 || c0 > c1)
    throw std::invalid_argument("csr_block: bad range");
  CsrMatrix out;
  out.rows = r1 - r0;
  out.cols = c1 - c0;
  out.offsets.assign(static_cast<std::size_t>(out.rows) + 1, 0);
  for (int i = r0; i < r1; ++i) {
    for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p) {
      const int c = a.columns[p];
      if (c >= c0 && c < c1) {
        out.columns.push_back(c - c0);
        out.values.push_back(a.values[p]);
      }
    }
    out.offsets[static_cast<std::size_t>(i - r0) + 1] = static_cast<int>(out.columns.size());
  }
  return out;
}

void spmv(const CsrMatrix& a, const double* x, double* y, bool transpose) {
  if (!transpose) {
    for (int i = 0; i < a.rows; ++i) {
      double s = 0.0;
      for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p) s += a.values[p] * x[a.columns[p]];
      y[i] = s;
    }
  } else {
    std::fill(y, y + a.cols, 0.0);
    for (int i = 0; i < a.rows; ++i)
      for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p)
        y[a.columns[p]] += a.values[p] * x[i];
  }
}

std::vector<double> spmv(const CsrMatrix& a, const std::vector<double>& x, bool transpose) {
  if ((transpose ? a.rows : a.cols) != static_cast<int>(x.size()))
    throw std::invalid_argument("spmv: dimension mismatch");
  std::vector<double> y(transpose ? a.cols : a.rows, 0.0);
  spmv(a, x.data(), y.data(), transpose);
  return y;
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_matrix_market: cannot open " + path);
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f, "%d %d %d\n", a.rows, a.cols, a.nnz());
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p)
      std::fprintf(f, "%d %d %.17g\n", i + 1, a.columns[p] + 1, a.values[p]);
  std::fclose(f);
}

// ---------------------------------------------------------------------------
// reverse Cuthill-McKee

std::vector<int> rcm_ordering(const CsrMatrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("rcm_ordering: matrix not square");
  const int n = a.rows;

  // adjacency of a + a^T, sorted per row
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p) {
      const int j = a.columns[p];
      if (j == i) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  auto degree = [&](int v) { return static_cast<int>(adj[v].size()); };

  for (;;) {
    int start = -1;
    for (int v = 0; v < n; ++v) {
      if (seen[v]) continue;
      if (start < 0 || degree(v) < degree(start)) start = v;
    }
    if (start < 0) break;

    std::vector<int> queue{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      order.push_back(u);
      std::vector<int> next;
      for (int w : adj[u])
        if (!seen[w]) next.push_back(w);
      std::sort(next.begin(), next.end(), [&](int x, int y) {
        if (degree(x) != degree(y)) return degree(x) < degree(y);
        return x < y;
      });
      for (int w : next) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

// ---------------------------------------------------------------------------
// left-looking sparse LU (Gilbert-Peierls) on the RCM-ordered matrix

namespace {

// CSC view of A(order, order).
struct CscMatrix {
  int n = 0;
  std::vector<int> offsets, rows;
  std::vector<double> values;
};

CscMatrix permuted_csc(const CsrMatrix& a, const std::vector<int>& order) {
  const int n = a.rows;
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[order[i]] = i;

  TripletList t(n, n);
  for (int i = 0; i < n; ++i)
    for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p)
      t.add(inv[a.columns[p]], inv[i], a.values[p]);  // transposed: rows of t = columns of B
  CsrMatrix bt = t.compress();

  CscMatrix csc;
  csc.n = n;
  csc.offsets = std::move(bt.offsets);
  csc.rows = std::move(bt.columns);
  csc.values = std::move(bt.values);
  return csc;
}

}  // namespace

template <typename Scalar>
LuFactorizationT<Scalar> lu_factor_impl(const CsrMatrix& a, double pivot_floor_scale) {
  if (a.rows != a.cols) throw std::invalid_argument("lu_factor: matrix not square");
  const int n = a.rows;

  LuFactorizationT<Scalar> f;
  f.n_ = n;
  f.ordering_ = rcm_ordering(a);
  const CscMatrix b = permuted_csc(a, f.ordering_);

  const Scalar pivot_floor(pivot_floor_scale * a.max_abs());
  const Scalar zero(0.0);

  f.l_offsets_.assign(1, 0);
  f.u_offsets_.assign(1, 0);
  f.u_diag_.assign(n, zero);
  f.pivot_rows_.assign(n, -1);

  std::vector<int> pinv(n, -1);        // ordered row -> pivot step, -1 if not pivotal yet
  std::vector<Scalar> x(n, zero);      // dense accumulator
  std::vector<char> visited(n, 0);
  std::vector<int> pattern(n), dfs_stack(n), pos_stack(n);

  for (int col = 0; col < n; ++col) {
    // symbolic: union of reachable rows from the column pattern
    int top = n;
    for (int p = b.offsets[col]; p < b.offsets[col + 1]; ++p) {
      int root = b.rows[p];
      if (visited[root]) continue;
      int head = 0;
      dfs_stack[0] = root;
      while (head >= 0) {
        const int node = dfs_stack[head];
        const int node_col = pinv[node];
        if (!visited[node]) {
          visited[node] = 1;
          pos_stack[head] = (node_col < 0) ? 0 : f.l_offsets_[node_col];
        }
        bool descend = false;
        if (node_col >= 0) {
          for (int q = pos_stack[head]; q < f.l_offsets_[node_col + 1]; ++q) {
            const int child = f.l_rows_[q];  // still in ordered-row coordinates
            if (visited[child]) continue;
            pos_stack[head] = q + 1;
            dfs_stack[++head] = child;
            descend = true;
            break;
          }
        }
        if (!descend) {
          --head;
          pattern[--top] = node;
        }
      }
    }

    // numeric: x = B(:,col), then eliminate through earlier pivots in topological order
    for (int p = b.offsets[col]; p < b.offsets[col + 1]; ++p) x[b.rows[p]] = Scalar(b.values[p]);
    for (int t = top; t < n; ++t) {
      const int node = pattern[t];
      const int node_col = pinv[node];
      if (node_col < 0) continue;
      const Scalar xv = x[node];
      if (xv == zero) continue;
      for (int q = f.l_offsets_[node_col]; q < f.l_offsets_[node_col + 1]; ++q)
        x[f.l_rows_[q]] -= f.l_values_[q] * xv;
    }

    // pivot: prefer the diagonal row when it is within a factor 10 of the max
    int piv = -1;
    Scalar piv_abs(-1.0);
    Scalar diag_abs(-1.0);
    using std::abs;
    for (int t = top; t < n; ++t) {
      const int node = pattern[t];
      if (pinv[node] >= 0) continue;
      const Scalar v = abs(x[node]);
      if (v > piv_abs || (v == piv_abs && (piv < 0 || node < piv))) {
        piv_abs = v;
        piv = node;
      }
      if (node == col) diag_abs = v;
    }
    if (piv < 0 || piv_abs <= pivot_floor || piv_abs == zero)
      throw SingularMatrixError("lu_factor: numerically singular at column " +
                                std::to_string(col));
    if (diag_abs >= Scalar(0.1) * piv_abs) piv = col;

    const Scalar piv_val = x[piv];
    pinv[piv] = col;
    f.pivot_rows_[col] = piv;
    f.u_diag_[col] = piv_val;

    for (int t = top; t < n; ++t) {
      const int node = pattern[t];
      if (node == piv) continue;
      const Scalar v = x[node];
      if (pinv[node] >= 0 && pinv[node] < col) {
        if (v != zero) {
          f.u_rows_.push_back(pinv[node]);
          f.u_values_.push_back(v);
        }
      } else if (pinv[node] < 0) {
        if (v != zero) {
          f.l_rows_.push_back(node);
          f.l_values_.push_back(v / piv_val);
        }
      }
    }
    f.l_offsets_.push_back(static_cast<int>(f.l_rows_.size()));
    f.u_offsets_.push_back(static_cast<int>(f.u_rows_.size()));

    for (int t = top; t < n; ++t) {
      x[pattern[t]] = zero;
      visited[pattern[t]] = 0;
    }
  }

  // remap L row indices from ordered-row to pivot coordinates
  for (int& r : f.l_rows_) r = pinv[r];
  return f;
}

LuFactorization lu_factor(const CsrMatrix& a, double pivot_floor_scale) {
  return lu_factor_impl<double>(a, pivot_floor_scale);
}

LuFactorizationDD lu_factor_dd(const CsrMatrix& a) {
  return lu_factor_impl<DoubleDouble>(a, 0.0);
}

template <typename Scalar>
std::vector<double> LuFactorizationT<Scalar>::solve(const std::vector<double>& b,
                                                    bool transpose) const {
  if (static_cast<int>(b.size()) != n_)
    throw std::invalid_argument("LuFactorization::solve: dimension mismatch");
  const Scalar zero(0.0);
  std::vector<double> x(n_);
  std::vector<Scalar> y(n_), c(n_);

  if (!transpose) {
    // A x = b:  c = P (b restricted to ordering), L c' = c, U y = c', scatter back
    for (int i = 0; i < n_; ++i) y[i] = Scalar(b[ordering_[i]]);
    for (int k = 0; k < n_; ++k) c[k] = y[pivot_rows_[k]];
    for (int k = 0; k < n_; ++k) {
      const Scalar ck = c[k];
      if (ck == zero) continue;
      for (int p = l_offsets_[k]; p < l_offsets_[k + 1]; ++p) c[l_rows_[p]] -= l_values_[p] * ck;
    }
    for (int k = n_ - 1; k >= 0; --k) {
      c[k] /= u_diag_[k];
      const Scalar ck = c[k];
      if (ck == zero) continue;
      for (int p = u_offsets_[k]; p < u_offsets_[k + 1]; ++p) c[u_rows_[p]] -= u_values_[p] * ck;
    }
    for (int j = 0; j < n_; ++j) x[ordering_[j]] = static_cast<double>(c[j]);
  } else {
    // A^T x = b:  U^T w = b', L^T v = w, y[pivot_rows[k]] = v[k]
    for (int j = 0; j < n_; ++j) c[j] = Scalar(b[ordering_[j]]);
    for (int k = 0; k < n_; ++k) {
      Scalar s = c[k];
      for (int p = u_offsets_[k]; p < u_offsets_[k + 1]; ++p) s -= u_values_[p] * c[u_rows_[p]];
      c[k] = s / u_diag_[k];
    }
    for (int k = n_ - 1; k >= 0; --k) {
      Scalar s = c[k];
      for (int p = l_offsets_[k]; p < l_offsets_[k + 1]; ++p) s -= l_values_[p] * c[l_rows_[p]];
      c[k] = s;
    }
    for (int k = 0; k < n_; ++k) y[pivot_rows_[k]] = c[k];
    for (int i = 0; i < n_; ++i) x[ordering_[i]] = static_cast<double>(y[i]);
  }
  return x;
}

template class LuFactorizationT<double>;
template class LuFactorizationT<DoubleDouble>;

// ---------------------------------------------------------------------------
// conjugate gradients

CgResult cg(const LinearOperator& apply, const std::vector<double>& b, double tol, int maxit) {
  const double nb = norm2(b);
  CgResult res;
  res.x.assign(b.size(), 0.0);
  if (nb == 0.0) return res;

  std::vector<double> r = b;
  std::vector<double> p = r;
  double rs = dot(r, r);

  std::vector<double> best_x = res.x;
  double best_rel = 1.0;

  for (int it = 1; it <= maxit; ++it) {
    std::vector<double> ap = apply(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0))
      throw CgFailure("cg: operator not positive definite (p'Ap = " + std::to_string(pap) + ")",
                      best_x, best_rel, it - 1);
    const double alpha = rs / pap;
    axpy(alpha, p, res.x);
    axpy(-alpha, ap, r);
    const double rs_new = dot(r, r);
    const double rel = std::sqrt(rs_new) / nb;
    if (rel < best_rel) {
      best_rel = rel;
      best_x = res.x;
    }
    if (rel <= tol) {
      res.iterations = it;
      res.relative_residual = rel;
      return res;
    }
    const double beta = rs_new / rs;
    rs = rs_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
  }
  throw CgFailure("cg: no convergence within " + std::to_string(maxit) +
                      " iterations (best residual " + std::to_string(best_rel) + ")",
                  best_x, best_rel, maxit);
}

// ---------------------------------------------------------------------------
// dense kernels

DenseMatrix dense_from_csr(const CsrMatrix& a) {
  DenseMatrix d(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int p = a.offsets[i]; p < a.offsets[i + 1]; ++p) d(i, a.columns[p]) = a.values[p];
  return d;
}

std::vector<double> dense_apply(const DenseMatrix& a, const std::vector<double>& x,
                                bool transpose) {
  if ((transpose ? a.rows : a.cols) != static_cast<int>(x.size()))
    throw std::invalid_argument("dense_apply: dimension mismatch");
  std::vector<double> y(transpose ? a.cols : a.rows, 0.0);
  if (!transpose) {
    for (int i = 0; i < a.rows; ++i) {
      double s = 0.0;
      for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
  } else {
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j) y[j] += a(i, j) * x[i];
  }
  return y;
}

DenseLu dense_lu_factor(DenseMatrix a) {
  if (a.rows != a.cols) throw std::invalid_argument("dense_lu_factor: matrix not square");
  const int n = a.rows;
  DenseLu f;
  f.row_perm.resize(n);
  std::iota(f.row_perm.begin(), f.row_perm.end(), 0);

  double scale = 0.0;
  for (double v : a.a) scale = std::max(scale, std::abs(v));
  const double floor = 1e-14 * scale;

  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= floor)
      throw SingularMatrixError("dense_lu_factor: numerically singular at column " +
                                std::to_string(k));
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(f.row_perm[k], f.row_perm[piv]);
    }
    const double inv = 1.0 / a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = a(i, k) * inv;
      a(i, k) = m;
      if (m == 0.0) continue;
      for (int j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
  f.lu = std::move(a);
  return f;
}

std::vector<double> dense_lu_solve(const DenseLu& f, const std::vector<double>& b,
                                   bool transpose) {
  const int n = f.lu.rows;
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("dense_lu_solve: dimension mismatch");
  std::vector<double> x(n);
  if (!transpose) {
    for (int k = 0; k < n; ++k) x[k] = b[f.row_perm[k]];
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < k; ++j) x[k] -= f.lu(k, j) * x[j];
    for (int k = n - 1; k >= 0; --k) {
      for (int j = k + 1; j < n; ++j) x[k] -= f.lu(k, j) * x[j];
      x[k] /= f.lu(k, k);
    }
  } else {
    std::vector<double> w(n);
    for (int k = 0; k < n; ++k) {
      double s = b[k];
      for (int j = 0; j < k; ++j) s -= f.lu(j, k) * w[j];
      w[k] = s / f.lu(k, k);
    }
    for (int k = n - 1; k >= 0; --k)
      for (int j = k + 1; j < n; ++j) w[k] -= f.lu(j, k) * w[j];
    for (int k = 0; k < n; ++k) x[f.row_perm[k]] = w[k];
  }
  return x;
}

SymmetricEigen jacobi_eigensolver(DenseMatrix a) {
  if (a.rows != a.cols) throw std::invalid_argument("jacobi_eigensolver: matrix not square");
  const int n = a.rows;
  DenseMatrix v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return s;
  };
  double frob = 0.0;
  for (double w : a.a) frob += w * w;
  const double stop = 1e-28 * std::max(frob, 1e-300);

  for (int sweep = 0; sweep < 100 && off_norm() > stop; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = a(idx[j], idx[j]);
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, idx[j]);
  }
  return out;
}

std::vector<double> singular_values(DenseMatrix a) {
  const int m = a.rows, n = a.cols;
  // one-sided Jacobi: orthogonalize column pairs
  for (int sweep = 0; sweep < 60; ++sweep) {
    double max_cos = 0.0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          app += a(i, p) * a(i, p);
          aqq += a(i, q) * a(i, q);
          apq += a(i, p) * a(i, q);
        }
        if (app == 0.0 || aqq == 0.0) continue;
        const double cosine = std::abs(apq) / std::sqrt(app * aqq);
        max_cos = std::max(max_cos, cosine);
        if (cosine < 1e-15) continue;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < m; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
      }
    }
    if (max_cos < 1e-15) break;
  }
  std::vector<double> sv(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += a(i, j) * a(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end());
  return sv;
}

}  // namespace stfem
