#pragma once

#include "slag/core.hpp"
#include "slag/poly.hpp"

#include <optional>
#include <vector>

namespace slag {

enum class SpaceKind { Projective, QuadricP5 };

/// Ambient projective space CP^n, or the 4-fold quadric
/// {z0 z1 + z2 z3 + z4 z5 = 0} in CP^5.
struct AmbientSpace {
  SpaceKind kind = SpaceKind::Projective;
  int dim = 0;  // complex dimension of the variety
  std::optional<HomogeneousPoly> defining;

  static AmbientSpace projective(int n);
  static AmbientSpace quadric();

  int homog_coords() const { return kind == SpaceKind::Projective ? dim + 1 : 6; }
  int chart_dim() const { return homog_coords() - 1; }  // affine chart of the ambient CP
  int anticanonical_degree() const { return kind == SpaceKind::Projective ? dim + 1 : 4; }
  bool is_hypersurface() const { return kind == SpaceKind::QuadricP5; }
};

/// Point of CP^N in a fixed affine chart: homogeneous coordinates with
/// z[chart] == 1 exactly.
struct AmbientPoint {
  CVec z;
  int chart = 0;
};

/// Chart of largest modulus (first index on ties); the chart coordinate is
/// rescaled to exactly 1, removing scale and phase.
AmbientPoint normalize(const CVec& z);
/// Same phase/scale removal with the chart chosen by the caller.
AmbientPoint in_chart(const CVec& z, int chart);

/// Affine coordinates: the homogeneous entries with the chart slot removed.
CVec affine(const AmbientPoint& p);
/// Inverse of `affine`.
AmbientPoint from_affine(const CVec& u, int chart);

/// Rewrite a tangent vector given in the chart of `p` into the chart `to`.
/// Vectors are chart vectors: d/dt of the affine coordinates.
CVec transfer_vector(const AmbientPoint& p, const CVec& v, int to);
AmbientPoint to_chart(const AmbientPoint& p, int to);

/// Velocity of a homogeneous curve through p, expressed in p's chart.
CVec homogeneous_velocity_to_chart(const AmbientPoint& p, const CVec& zdot);

Cx eval_poly(const HomogeneousPoly& poly, const AmbientPoint& p);
/// Gradient of the affine restriction (chart slot removed).
CVec affine_gradient(const HomogeneousPoly& poly, const AmbientPoint& p);

/// |p(z)| / ||z||^deg, scale invariant.
double poly_residual(const HomogeneousPoly& poly, const CVec& z);
double on_variety_residual(const AmbientSpace& space, const AmbientPoint& p);

/// Fubini-Study data in the chart of p, from the potential log sum |z_i|^2.
/// h is the Hermitian form, omega = -2 Im h, g = 2 Re h.
CMat fs_hermitian(const AmbientPoint& p);
Cx fs_h(const AmbientPoint& p, const CVec& u, const CVec& v);
double fs_omega(const AmbientPoint& p, const CVec& u, const CVec& v);
double fs_metric(const AmbientPoint& p, const CVec& u, const CVec& v);

struct TangentFrame {
  AmbientPoint base;
  CMat vectors;  // chart vectors as columns
};

/// Basis of the holomorphic tangent space of the variety at p (all of the
/// chart for projective space, ker dQ for the quadric).
CMat tangent_basis(const AmbientSpace& space, const AmbientPoint& p);
TangentFrame make_frame(const AmbientSpace& space, const AmbientPoint& p, const CMat& vectors,
                        double tol = 1e-8);

/// omega evaluated pairwise on the frame columns (antisymmetric matrix).
RMat induced_kahler(const AmbientSpace& space, const TangentFrame& frame);

struct ProjectOptions {
  double tol = 1e-12;       // |p| / ||z||^deg target
  int max_iters = 50;
  double basin_radius = 0.1;
};

/// Newton projection onto {poly = 0} along the conjugate-gradient direction.
AmbientPoint project_to_variety(const HomogeneousPoly& poly, const AmbientPoint& seed,
                                const ProjectOptions& opts = {},
                                std::vector<double>* residual_log = nullptr);

/// Joint Newton projection onto the common zero set of several polynomials.
AmbientPoint project_to_system(const std::vector<HomogeneousPoly>& polys,
                               const AmbientPoint& seed, const ProjectOptions& opts = {});

/// Random point of the variety: Gaussian homogeneous seed, then projection.
AmbientPoint random_point(const AmbientSpace& space, Rng& rng);

}  // namespace slag
