#pragma once

#include "slag/core.hpp"
#include "slag/torus.hpp"
#include "slag/varieties.hpp"
#include "slag/volforms.hpp"

#include <string>
#include <vector>

namespace slag {

/// One-parameter family of anticanonical cuts: section i at parameter t is
/// base[i] + t * directions[i]. The base sections must be torus invariant;
/// the perturbations need not be.
struct SectionFamily {
  std::vector<HomogeneousPoly> base;
  std::vector<HomogeneousPoly> directions;

  std::vector<HomogeneousPoly> at(double t) const;
};

/// Scenario bundle for the deformation machinery: ambient space, torus, and
/// the family cutting the hypersurfaces (or complete intersections) D_t.
struct DeformContext {
  AmbientSpace space;
  WeightMatrix weights;
  SectionFamily family;

  /// All holomorphic constraints at parameter t (ambient quadric included).
  std::vector<HomogeneousPoly> constraints_at(double t) const;
  /// Residue trivialization phi'_t of the canonical bundle of D_t.
  AdjunctionForm phi_at(double t) const;
  /// Degree bookkeeping: sum of section degrees equals the anticanonical
  /// degree of the ambient space.
  bool degrees_consistent() const;
  /// Rank of the joint differential at a point (transversality probe).
  int joint_rank_at(const AmbientPoint& p, double t) const;
};

/// Discretized torus embedding: m^s nodes indexed by an s-dimensional angle
/// grid, all on one target cut, together with the phase in force.
struct TorusMesh {
  int m = 1;
  int s = 1;
  std::vector<AmbientPoint> nodes;  // row-major over (k_0, ..., k_{s-1})
  PhaseAngle phase;
  std::string tag;
  double t = 0.0;  // family parameter the nodes currently satisfy

  int node_count() const { return static_cast<int>(nodes.size()); }
  int flat_index(const std::vector<int>& k) const;
  std::vector<int> multi_index(int flat) const;
  int shifted(int flat, int axis, int delta) const;  // periodic neighbor
  double cell_weight() const { return std::pow(2.0 * kPi / m, s); }
};

/// Stabilizer of the torus action restricted to the coordinate support of a
/// point (the component through it).
StabilizerReport component_stabilizer(const WeightMatrix& W, const AmbientPoint& z0,
                                      double support_tol = 1e-12);

/// Exact orbit sample of z0 at the uniform m^s angle grid; the phase comes
/// from the contraction constant on the component.
TorusMesh initial_orbit_mesh(const DeformContext& ctx, const AmbientPoint& z0, int m,
                             const std::string& tag = {});

struct PushOptions {
  bool allow_chain = true;
  int max_depth = 10;
  ProjectOptions project;
};

/// Project every node onto the cut at parameter t (from the mesh's current
/// parameter), halving the parameter step and chaining when Newton fails.
TorusMesh push_mesh(const DeformContext& ctx, const TorusMesh& mesh, double t,
                    const PushOptions& opts = {});

/// Discrete period of phi'_t over the mesh and the phase it determines.
PhaseAngle compute_theta_p(const DeformContext& ctx, const TorusMesh& mesh);

/// Sum over nodes of the squared SLag defect:
///   sum_{i<j} |omega(e_i, e_j)|^2 + |Im(e^{i theta} phi'(e))|^2 / |phi'(e)|^2
/// weighted by (2 pi / m)^s; e_i are tangent-projected central differences.
double slag_energy(const DeformContext& ctx, const TorusMesh& mesh);

/// Integral of omega over each coordinate 2-subtorus through index 0.
RVec omega_class_integrals(const DeformContext& ctx, const TorusMesh& mesh);

struct RelaxOptions {
  int max_iters = 200;
  double tol_per_node = 1e-6;
  double fd_step = 1e-6;
  double initial_step = 1.0;
  double grad_floor = 1e-14;
};

struct RelaxReport {
  TorusMesh mesh;
  double energy = 0.0;
  double initial_energy = 0.0;
  int iters = 0;
  int effective_steps = 0;
  bool converged = false;
};

/// Projected gradient descent on node positions constrained to the cut, with
/// Armijo backtracking; monotone in the energy.
RelaxReport relax(const DeformContext& ctx, const TorusMesh& mesh, const RelaxOptions& opts = {});

struct ClassConsistency {
  double theta_a = 0.0;
  double theta_b = 0.0;
  double folded_difference = 0.0;  // min over the sign ambiguity, mod 2 pi
  double magnitude_a = 0.0;
  double magnitude_b = 0.0;
};

ClassConsistency class_consistency(const DeformContext& ctx, const TorusMesh& a,
                                   const TorusMesh& b);

/// Relabel node indices by a periodic shift (the discrete torus action on
/// meshes); equivariance probes compare relax(shift) with shift(relax).
TorusMesh shift_mesh(const TorusMesh& mesh, const std::vector<int>& delta);

}  // namespace slag
