#include "slag/intlattice.hpp"

#include <cstdlib>
#include <numeric>

namespace slag {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw SolverError("integer overflow in lattice arithmetic");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw SolverError("integer overflow in lattice arithmetic");
  return r;
}

namespace {

void col_axpy(IMat& M, int dst, int src, std::int64_t q) {
  // column dst -= q * column src
  for (int i = 0; i < M.rows(); ++i)
    M(i, dst) = checked_add(M(i, dst), -checked_mul(q, M(i, src)));
}

void row_axpy(IMat& M, int dst, int src, std::int64_t q) {
  for (int j = 0; j < M.cols(); ++j)
    M(dst, j) = checked_add(M(dst, j), -checked_mul(q, M(src, j)));
}

}  // namespace

HnfResult hermite_normal_form(const IMat& A) {
  HnfResult res;
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  res.H = A;
  res.U = IMat::Identity(n, n);
  IMat& H = res.H;
  IMat& U = res.U;

  int col = 0;
  for (int row = 0; row < m && col < n; ++row) {
    // Euclidean elimination across columns col..n-1 on this row.
    while (true) {
      int nz = -1;
      for (int j = col + 1; j < n; ++j)
        if (H(row, j) != 0) { nz = j; break; }
      if (nz < 0) break;
      if (H(row, col) == 0) {
        H.col(col).swap(H.col(nz));
        U.col(col).swap(U.col(nz));
        continue;
      }
      // Reduce the larger by the smaller.
      if (std::abs(H(row, col)) <= std::abs(H(row, nz))) {
        std::int64_t q = H(row, nz) / H(row, col);
        col_axpy(H, nz, col, q);
        col_axpy(U, nz, col, q);
      } else {
        H.col(col).swap(H.col(nz));
        U.col(col).swap(U.col(nz));
      }
    }
    if (H(row, col) == 0) continue;  // rank-deficient row, pivot stays in this column
    if (H(row, col) < 0) {
      H.col(col) = -H.col(col);
      U.col(col) = -U.col(col);
    }
    // Reduce earlier pivot columns? Column HNF reduces entries to the LEFT of
    // the pivot within its row so that 0 <= H(row, j) < H(row, col) for j < col.
    for (int j = 0; j < col; ++j) {
      if (H(row, j) == 0) continue;
      std::int64_t q = H(row, j) / H(row, col);
      if (H(row, j) % H(row, col) < 0) q -= 1;  // floor division for nonneg remainder
      if (q != 0) {
        col_axpy(H, j, col, q);
        col_axpy(U, j, col, q);
      }
    }
    res.pivot_rows.push_back(row);
    ++col;
  }
  res.rank = col;
  return res;
}

SmithResult smith_normal_form(IMat A) {
  SmithResult out;
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const int r = std::min(m, n);
  int t = 0;
  for (; t < r; ++t) {
    // Find a nonzero pivot in the trailing block.
    int pi = -1, pj = -1;
    for (int i = t; i < m && pi < 0; ++i)
      for (int j = t; j < n; ++j)
        if (A(i, j) != 0) { pi = i; pj = j; break; }
    if (pi < 0) break;
    A.row(t).swap(A.row(pi));
    A.col(t).swap(A.col(pj));
    // Euclidean clearing of column and row t; row steps can dirty the row and
    // vice versa, so iterate until a full pass changes nothing.
    while (true) {
      bool changed = false;
      for (int i = t + 1; i < m; ++i) {
        while (A(i, t) != 0) {
          const std::int64_t q = A(i, t) / A(t, t);
          if (q != 0) row_axpy(A, i, t, q);
          if (A(i, t) != 0) {
            A.row(t).swap(A.row(i));  // remainder becomes the (smaller) pivot
            changed = true;
          }
        }
      }
      for (int j = t + 1; j < n; ++j) {
        while (A(t, j) != 0) {
          const std::int64_t q = A(t, j) / A(t, t);
          if (q != 0) col_axpy(A, j, t, q);
          if (A(t, j) != 0) {
            A.col(t).swap(A.col(j));
            changed = true;
          }
        }
      }
      bool clean = true;
      for (int i = t + 1; i < m; ++i)
        if (A(i, t) != 0) clean = false;
      if (clean && !changed) break;
    }
    // Divisibility fix-up: pivot must divide every trailing entry.
    bool fixed = false;
    for (int i = t + 1; i < m && !fixed; ++i)
      for (int j = t + 1; j < n; ++j)
        if (A(i, j) % A(t, t) != 0) {
          // Fold row i into row t and redo this pivot.
          for (int jj = t; jj < n; ++jj) A(t, jj) = checked_add(A(t, jj), A(i, jj));
          fixed = true;
          break;
        }
    if (fixed) { --t; continue; }
    if (A(t, t) < 0) A.row(t) = -A.row(t);
  }
  out.rank = t;
  out.divisors.resize(t);
  for (int i = 0; i < t; ++i) out.divisors[i] = A(i, i);
  return out;
}

std::optional<IntSolution> solve_integer(const IMat& A, const IVec& b) {
  const int n = static_cast<int>(A.cols());
  HnfResult h = hermite_normal_form(A);
  // Solve H y = b over the pivot structure (H lower-triangular on pivot rows,
  // zero columns beyond rank). Rows without a pivot must match exactly.
  IVec y = IVec::Zero(n);
  IVec acc = b;
  for (int j = 0; j < h.rank; ++j) {
    const int pr = h.pivot_rows[j];
    // Rows above this pivot (not pivot rows of earlier columns) must be zero.
    if (acc[pr] % h.H(pr, j) != 0) return std::nullopt;
    y[j] = acc[pr] / h.H(pr, j);
    for (int i = 0; i < acc.size(); ++i)
      acc[i] = checked_add(acc[i], -checked_mul(y[j], h.H(i, j)));
  }
  for (int i = 0; i < acc.size(); ++i)
    if (acc[i] != 0) return std::nullopt;

  IntSolution sol;
  sol.particular = h.U * y;
  const int k = n - h.rank;
  sol.kernel = h.U.rightCols(k);
  return sol;
}

}  // namespace slag
