#pragma once

#include "slag/core.hpp"
#include "slag/poly.hpp"
#include "slag/torus.hpp"
#include "slag/varieties.hpp"

#include <optional>
#include <vector>

namespace slag {

/// Meromorphic section of the canonical bundle represented through its
/// anticanonical denominator eta (and an optional polynomial numerator).
struct MeromorphicVolumeSection {
  AmbientSpace ambient;
  HomogeneousPoly eta;
  std::optional<HomogeneousPoly> numerator;

  MeromorphicVolumeSection(AmbientSpace space, HomogeneousPoly eta_,
                           std::optional<HomogeneousPoly> num = std::nullopt);

  /// Every monomial of eta (and numerator) must transform with one character.
  bool is_invariant(const WeightMatrix& W) const;
};

/// Chart evaluator for the meromorphic/holomorphic top forms in play.
/// In chart c of CP^N the reference N-form is (-1)^c wedge_{i != c} du_i; the
/// evaluated form divides by `denominator`, and takes iterated residues along
/// `residue_polys` (contracting with dual transversals normalized by the
/// Jacobian of the residue system).
struct AdjunctionForm {
  AmbientSpace ambient;
  std::vector<HomogeneousPoly> residue_polys;
  std::optional<HomogeneousPoly> denominator;
  std::optional<HomogeneousPoly> numerator;

  /// Number of frame vectors the form consumes.
  int arity() const;

  /// Value on `frame` (chart vectors at p, columns). Throws "on divisor" when
  /// the denominator vanishes and "non-transversal point" when the residue
  /// system is degenerate at p.
  Cx eval(const AmbientPoint& p, const CMat& frame) const;

  /// Dual transversal vectors w_i with dq_i(w_j) = delta_ij at p.
  CMat transversal_duals(const AmbientPoint& p) const;

  static AdjunctionForm sigma(const MeromorphicVolumeSection& s);
  static AdjunctionForm hypersurface_residue(const AmbientSpace& space,
                                             std::vector<HomogeneousPoly> polys,
                                             std::optional<HomogeneousPoly> num = std::nullopt);
};

/// sigma' = contraction of sigma by the s flow fields; a (1,0)-form on the
/// complement of the divisor.
struct ContractionForm {
  AdjunctionForm form;
  WeightMatrix weights;

  Cx operator()(const AmbientPoint& p, const CVec& v) const;
};

MeromorphicVolumeSection make_section(const AmbientSpace& space, HomogeneousPoly eta,
                                      std::optional<HomogeneousPoly> num = std::nullopt);

Cx eval_sigma(const MeromorphicVolumeSection& s, const TangentFrame& frame);
Cx contract_sigma(const ContractionForm& sp, const AmbientPoint& p, const CVec& v);

/// Scale-invariant distance proxy to the divisor {eta = 0}.
double divisor_distance(const HomogeneousPoly& eta, const CVec& z);

struct PathOptions {
  double divisor_margin = 1e-3;
  int waypoint_retries = 8;
  double quad_tol = 1e-10;
};

/// f(target) - f(base) = integral of sigma' along a divisor-avoiding
/// piecewise-linear chart path; f(base) = 0 by convention.
Cx potential_f(const ContractionForm& sp, const AmbientPoint& base, const AmbientPoint& target,
               Rng& rng, const PathOptions& opts = {});

/// Integral of sigma' over the straight affine segment from a to b in the
/// chart of a (b is rewritten into that chart).
Cx segment_integral(const ContractionForm& sp, const AmbientPoint& a, const AmbientPoint& b,
                    double tol = 1e-10);

/// Residue trivialization of the canonical bundle of the smooth divisor cut
/// out by `polys` (the quadric equation first, when applicable).
Cx residue_trivialization(const AmbientSpace& space, const std::vector<HomogeneousPoly>& polys,
                          const TangentFrame& frame);

struct PhaseAngle {
  double theta = 0.0;        // in (-pi, pi]
  std::string component;
  double dispersion = 0.0;   // relative std of the contraction values
  Cx mean_g;
};

/// Full contraction g = form(X_1, ..., X_arity) over the sample; errors when
/// g fails to be constant. theta = -arg(mean g), so Re(e^{i theta} g) > 0.
PhaseAngle phase_constant(const AdjunctionForm& form, const WeightMatrix& W,
                          const std::vector<AmbientPoint>& sample,
                          const std::string& component_tag = {},
                          double dispersion_tol = 1e-6);

/// G(2,4) pushdown: sigma'' = alpha^*(sigma') through the local inverse
/// alpha(a,b) = (a,1,b,1,-a-b,1) of beta(z) = (z0 z1, z2 z3).
struct PushdownForm {
  ContractionForm sp;

  /// Value of sigma'' at (a, b) on the tangent vector tau d/da (b fixed).
  Cx eval(Cx a, Cx b, Cx tau) const;
  /// Same value computed through a torus-translated inverse (well-definedness probe).
  Cx eval_translated(Cx a, Cx b, Cx tau, const RVec& torus_angles) const;
};

/// Period of sigma'' over a loop (a(t), b(t)), t in [0,1], by composite
/// quadrature panels.
Cx loop_period(const PushdownForm& form, const std::function<Cx(double)>& a,
               const std::function<Cx(double)>& b, int panels = 64);

}  // namespace slag
