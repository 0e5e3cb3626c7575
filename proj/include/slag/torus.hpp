#pragma once

#include "slag/core.hpp"
#include "slag/varieties.hpp"

#include <map>
#include <optional>
#include <vector>

namespace slag {

/// Integer weights of an s-torus acting diagonally on homogeneous coordinates:
/// row j holds the weights of the j-th circle.
struct WeightMatrix {
  IMat W;

  WeightMatrix() = default;
  explicit WeightMatrix(IMat w);
  static WeightMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);
  /// Rank-0 torus (no circles) on `coords` homogeneous coordinates.
  static WeightMatrix trivial(int coords);

  int rank() const { return static_cast<int>(W.rows()); }
  int coords() const { return static_cast<int>(W.cols()); }
};

/// Torus element exp(i theta . W) applied to homogeneous coordinates.
CVec apply_torus(const WeightMatrix& W, const RVec& theta, const CVec& z);

/// Flow field X_j at p, as a chart vector: the chart components are
/// i (w_{ji} - w_{jc}) u_i.
CVec flow_field(const WeightMatrix& W, int j, const AmbientPoint& p);
CMat flow_frame(const WeightMatrix& W, const AmbientPoint& p);

/// mu_j = sum_k w_{jk} |z_k|^2 / sum_k |z_k|^2.
RVec moment_map(const WeightMatrix& W, const AmbientPoint& p);

/// Complex gradient row vectors: d mu_j (v) = 2 Re <row_j, v> on chart vectors.
CMat moment_gradients(const WeightMatrix& W, const AmbientPoint& p);

/// Consistency of the Hamiltonian pairing d mu_j = omega(., X_j), probed by
/// central differences along random tangent directions.
double hamiltonian_residual(const WeightMatrix& W, const AmbientSpace& space,
                            const AmbientPoint& p, Rng& rng, int probes = 6);

/// Integer solution of sum_i a_i xi_i = phi, minimal in (sum |a_i|, lex).
struct InvariantRatio {
  IVec a;
  std::map<int, std::int64_t> positive;  // index -> a_i > 0
  std::map<int, std::int64_t> negative;  // index -> -a_i for a_i < 0
};

InvariantRatio solve_invariant_ratio(const std::vector<IVec>& xi, const IVec& phi);

/// Generic stabilizer of the torus action. In the projective model the
/// stabilizer is computed on projective classes (weight differences against a
/// reference coordinate); in the affine model the weights act on fixed
/// coordinates as given.
struct StabilizerReport {
  bool finite = false;
  std::int64_t order = 0;  // valid when finite
  bool effective = false;
};

StabilizerReport stabilizer_order(const WeightMatrix& W, bool projective = true);

}  // namespace slag
