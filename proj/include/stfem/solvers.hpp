#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stfem/doubledouble.hpp"

namespace stfem {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when cg() runs out of iterations; keeps the best iterate seen.
class CgFailure : public std::runtime_error {
 public:
  CgFailure(const std::string& msg, std::vector<double> best, double rel, int its)
      : std::runtime_error(msg), best_iterate(std::move(best)), residual(rel), iterations(its) {}
  std::vector<double> best_iterate;
  double residual;
  int iterations;
};

// ---------------------------------------------------------------------------
// small vector helpers

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------------------
// compressed sparse row storage

struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> offsets;   // size rows+1, monotone
  std::vector<int> columns;   // sorted and unique within each row
  std::vector<double> values;

  int nnz() const { return offsets.empty() ? 0 : offsets.back(); }
  double max_abs() const;
};

// Accumulates (i, j, v) entries; duplicate entries are summed on compress().
class TripletList {
 public:
  TripletList(int rows, int cols) : rows_(rows), cols_(cols) {}
  void add(int i, int j, double v);
  CsrMatrix compress() const;
  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_, cols_;
  std::vector<int> is_, js_;
  std::vector<double> vs_;
};

CsrMatrix csr_identity(int n);
CsrMatrix csr_transpose(const CsrMatrix& a);
CsrMatrix csr_add(const CsrMatrix& a, const CsrMatrix& b);
// Contiguous sub-block a[r0:r1, c0:c1].
CsrMatrix csr_block(const CsrMatrix& a, int r0, int r1, int c0, int c1);

// y = A x or A^T x.
void spmv(const CsrMatrix& a, const double* x, double* y, bool transpose = false);
std::vector<double> spmv(const CsrMatrix& a, const std::vector<double>& x,
                         bool transpose = false);

void write_matrix_market(const CsrMatrix& a, const std::string& path);

// ---------------------------------------------------------------------------
// sparse LU with threshold partial pivoting and a reverse Cuthill-McKee
// fill-reducing ordering; supports transpose solves against the same factors.
// The scalar type is double for ordinary systems and DoubleDouble for the
// optimality block systems, whose trailing pivots shrink with rho and sit far
// below the working scale of the matrix entries.

template <typename Scalar>
class LuFactorizationT {
 public:
  int size() const { return n_; }
  std::size_t factor_nnz() const { return l_rows_.size() + u_rows_.size() + u_diag_.size(); }

  std::vector<double> solve(const std::vector<double>& b, bool transpose = false) const;

 private:
  template <typename S>
  friend LuFactorizationT<S> lu_factor_impl(const CsrMatrix& a, double pivot_floor_scale);

  int n_ = 0;
  // L and U columns in pivot coordinates; L has unit diagonal (not stored).
  std::vector<int> l_offsets_, l_rows_;
  std::vector<Scalar> l_values_;
  std::vector<int> u_offsets_, u_rows_;
  std::vector<Scalar> u_values_;
  std::vector<Scalar> u_diag_;
  std::vector<int> pivot_rows_;  // k-th pivot is this row of the ordered matrix
  std::vector<int> ordering_;    // RCM symmetric permutation applied before pivoting
};

using LuFactorization = LuFactorizationT<double>;
using LuFactorizationDD = LuFactorizationT<DoubleDouble>;

// A column whose best pivot candidate falls below pivot_floor_scale * max|a|
// is reported singular. Saddle-point systems with a vanishing regularization
// block legitimately produce pivots near machine zero; lu_factor_dd accepts
// them (rejecting exact zeros only) and compensates with the wider scalar.
LuFactorization lu_factor(const CsrMatrix& a, double pivot_floor_scale);
inline LuFactorization lu_factor(const CsrMatrix& a) { return lu_factor(a, 1e-14); }
LuFactorizationDD lu_factor_dd(const CsrMatrix& a);

inline std::vector<double> lu_solve(const LuFactorization& f, const std::vector<double>& b,
                                    bool transpose = false) {
  return f.solve(b, transpose);
}

// Reverse Cuthill-McKee ordering on the pattern of a + a^T.
std::vector<int> rcm_ordering(const CsrMatrix& a);

// ---------------------------------------------------------------------------
// conjugate gradients (matrix-free)

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

using LinearOperator = std::function<std::vector<double>(const std::vector<double>&)>;

CgResult cg(const LinearOperator& apply, const std::vector<double>& b, double tol, int maxit);

// ---------------------------------------------------------------------------
// dense kernels (Schur complements, diagnostics)

struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

DenseMatrix dense_from_csr(const CsrMatrix& a);
std::vector<double> dense_apply(const DenseMatrix& a, const std::vector<double>& x,
                                bool transpose = false);

struct DenseLu {
  DenseMatrix lu;
  std::vector<int> row_perm;
};

DenseLu dense_lu_factor(DenseMatrix a);
std::vector<double> dense_lu_solve(const DenseLu& f, const std::vector<double>& b,
                                   bool transpose = false);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // columns match values
};

// Cyclic Jacobi for symmetric matrices.
SymmetricEigen jacobi_eigensolver(DenseMatrix a);

// Singular values by one-sided Jacobi, ascending.
std::vector<double> singular_values(DenseMatrix a);

}  // namespace stfem
