#pragma once

#include "slag/core.hpp"

#include <optional>
#include <vector>

namespace slag {

/// Exact integer linear algebra on 64-bit entries. Every arithmetic step is
/// overflow-checked; the sizes in play (character systems, weight matrices)
/// are tiny, so a throw here signals corrupted input rather than scale.

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

/// Column-style Hermite normal form: A * U = H with U unimodular,
/// H lower-triangular with positive pivots on the rank profile and zero
/// columns at the right.
struct HnfResult {
  IMat H;
  IMat U;
  int rank = 0;
  std::vector<int> pivot_rows;  // row of the pivot of column j, j < rank
};

HnfResult hermite_normal_form(const IMat& A);

/// Diagonal d_1 | d_2 | ... | d_r (positive), r = rank.
struct SmithResult {
  IVec divisors;
  int rank = 0;
};

SmithResult smith_normal_form(IMat A);

/// Solve A x = b over the integers. Returns a particular solution and a basis
/// of the integer kernel, or nullopt when b is outside the column lattice.
struct IntSolution {
  IVec particular;
  IMat kernel;  // columns form a lattice basis of ker A
};

std::optional<IntSolution> solve_integer(const IMat& A, const IVec& b);

}  // namespace slag
