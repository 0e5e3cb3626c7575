#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slag/intlattice.hpp"

#include <functional>
#include <numeric>

using namespace slag;

namespace {

IMat random_imat(Rng& rng, int m, int n, std::int64_t lo, std::int64_t hi) {
  IMat A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.uniform_int(lo, hi);
  return A;
}

// Fraction-free determinant for unimodularity checks.
std::int64_t int_det(IMat A) {
  const int n = static_cast<int>(A.rows());
  if (n == 1) return A(0, 0);
  std::int64_t det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (A(r, c) != 0) { piv = r; break; }
    if (piv < 0) return 0;
    if (piv != c) {
      A.row(piv).swap(A.row(c));
      det = -det;
    }
    // Integer-preserving elimination via Euclid on the column.
    for (int r = c + 1; r < n; ++r) {
      while (A(r, c) != 0) {
        std::int64_t q = A(c, c) / A(r, c);
        A.row(c) -= q * A.row(r);
        A.row(c).swap(A.row(r));
        det = -det;
      }
    }
    det = checked_mul(det, A(c, c));
  }
  return det;
}

std::int64_t gcd_of_minors(const IMat& A, int k) {
  // gcd of all k x k minors, brute force for tiny sizes.
  std::vector<int> rows(A.rows()), cols(A.cols());
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  std::int64_t g = 0;
  std::vector<int> rsel(k), csel(k);
  std::function<void(int, int)> pick_cols = [&](int start, int depth) {
    if (depth == k) {
      IMat M(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) M(i, j) = A(rsel[i], csel[j]);
      g = std::gcd(g, std::abs(int_det(M)));
      return;
    }
    for (int c = start; c < A.cols(); ++c) {
      csel[depth] = c;
      pick_cols(c + 1, depth + 1);
    }
  };
  std::function<void(int, int)> pick_rows = [&](int start, int depth) {
    if (depth == k) {
      pick_cols(0, 0);
      return;
    }
    for (int r = start; r < A.rows(); ++r) {
      rsel[depth] = r;
      pick_rows(r + 1, depth + 1);
    }
  };
  pick_rows(0, 0);
  return g;
}

}  // namespace

TEST_CASE("hermite normal form reconstructs A*U = H with unimodular U") {
  Rng rng(20240511);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = static_cast<int>(rng.uniform_int(1, 4));
    const int n = static_cast<int>(rng.uniform_int(1, 5));
    const IMat A = random_imat(rng, m, n, -5, 5);
    const HnfResult h = hermite_normal_form(A);
    CHECK((A * h.U - h.H).cwiseAbs().maxCoeff() == 0);
    CHECK(std::abs(int_det(h.U)) == 1);
    // Lower-triangular structure on the pivot profile.
    for (int j = 0; j < h.rank; ++j) {
      CHECK(h.H(h.pivot_rows[j], j) > 0);
      for (int i = 0; i < h.pivot_rows[j]; ++i) CHECK(h.H(i, j) == 0);
    }
    for (int j = h.rank; j < n; ++j) CHECK(h.H.col(j).isZero());
  }
}

TEST_CASE("smith normal form matches gcd-of-minors invariants") {
  Rng rng(777);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = static_cast<int>(rng.uniform_int(1, 3));
    const int n = static_cast<int>(rng.uniform_int(1, 4));
    const IMat A = random_imat(rng, m, n, -4, 4);
    const SmithResult s = smith_normal_form(A);
    // d_1 ... d_k == gcd of k x k minors.
    std::int64_t prod = 1;
    for (int k = 1; k <= s.rank; ++k) {
      prod = checked_mul(prod, s.divisors[k - 1]);
      CHECK(prod == gcd_of_minors(A, k));
    }
    if (s.rank < std::min(m, n)) CHECK(gcd_of_minors(A, s.rank + 1) == 0);
    for (int k = 1; k < s.rank; ++k) CHECK(s.divisors[k] % s.divisors[k - 1] == 0);
  }
}

TEST_CASE("solve_integer finds solutions exactly when they exist") {
  Rng rng(31337);
  int solvable = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = static_cast<int>(rng.uniform_int(1, 3));
    const int n = static_cast<int>(rng.uniform_int(1, 4));
    const IMat A = random_imat(rng, m, n, -4, 4);
    // Half the time construct a guaranteed-solvable rhs.
    IVec b(m);
    if (trial % 2 == 0) {
      IVec x = random_imat(rng, n, 1, -3, 3).col(0);
      b = A * x;
    } else {
      b = random_imat(rng, m, 1, -6, 6).col(0);
    }
    auto sol = solve_integer(A, b);
    // Brute-force reference over a box.
    bool brute_found = false;
    std::vector<std::int64_t> x(n, -6);
    while (true) {
      IVec xv(n);
      for (int i = 0; i < n; ++i) xv[i] = x[i];
      if ((A * xv - b).isZero()) { brute_found = true; break; }
      int i = 0;
      for (; i < n; ++i) {
        if (++x[i] <= 6) break;
        x[i] = -6;
      }
      if (i == n) break;
    }
    if (brute_found) {
      REQUIRE(sol.has_value());
      ++solvable;
    }
    if (sol) {
      CHECK((A * sol->particular - b).isZero());
      for (int j = 0; j < sol->kernel.cols(); ++j)
        CHECK((A * sol->kernel.col(j)).isZero());
    }
  }
  CHECK(solvable > 50);
}
