#pragma once

#include "slag/core.hpp"
#include "slag/torus.hpp"
#include "slag/varieties.hpp"
#include "slag/volforms.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace slag {

/// Point of the space a fibration lives on, in a working chart. For
/// projective scenarios x holds normalized homogeneous coordinates; for the
/// canonical-bundle model x = (z, xi).
struct GeoPoint {
  CVec x;
  int chart = 0;
};

/// Geometry hooks the fiber solver needs: moment map, flows, the contraction
/// 1-form, the Kahler pairing, and optional holomorphic constraints cutting
/// the space out of its chart.
class FiberGeometry {
 public:
  virtual ~FiberGeometry() = default;

  virtual int chart_dim() const = 0;  // complex dimension of the chart
  virtual int rank() const = 0;       // torus rank s
  virtual int n_constraints() const { return 0; }

  virtual RVec moment(const GeoPoint& p) const = 0;
  /// Rows gamma_j with d mu_j(v) = 2 Re(gamma_j . conj-pairing v).
  virtual CMat moment_rows(const GeoPoint& p) const = 0;
  virtual CMat flows(const GeoPoint& p) const = 0;  // d x s columns
  virtual Cx sigma1(const GeoPoint& p, const CVec& v) const = 0;
  /// Coefficients c with sigma'(v) = c . v (plain dot).
  virtual CVec sigma1_coeffs(const GeoPoint& p) const;
  virtual double omega(const GeoPoint& p, const CVec& u, const CVec& v) const = 0;
  virtual double metric(const GeoPoint& p, const CVec& u, const CVec& v) const = 0;

  virtual CVec constraints(const GeoPoint&) const { return CVec(0); }
  virtual CMat constraint_rows(const GeoPoint&) const { return CMat(0, chart_dim()); }

  virtual GeoPoint displace(const GeoPoint& p, const CVec& dv) const = 0;
  /// Re-chart if useful; default keeps the chart.
  virtual GeoPoint renormalize(const GeoPoint& p) const { return p; }
  virtual CVec transfer(const GeoPoint& from, const GeoPoint& to, const CVec& v) const;

  /// Integral of sigma' over the straight chart segment p -> q (same chart).
  virtual Cx potential_increment(const GeoPoint& p, const GeoPoint& q) const;
  /// Closed-form potential when the geometry has one (the tracer then skips
  /// incremental integration entirely).
  virtual std::optional<Cx> potential_closed_form(const GeoPoint&) const { return std::nullopt; }

  virtual double divisor_distance(const GeoPoint& p) const = 0;
  /// (distance to the divisor, moment gap at the nearest divisor point).
  virtual std::pair<double, double> boundary_gap(const GeoPoint& p, const RVec& nu) const;
};

/// Level (nu, t) of alpha = (mu, Im f).
struct FiberSpec {
  RVec nu;
  double t = 0.0;
};

struct FiberSolveOptions {
  double tol = 1e-10;
  int max_iters = 30;
};

struct FiberPointState {
  GeoPoint p;
  Cx f = 0.0;
  int iters = 0;
};

/// Regularity probe: flow fields independent and the level-set kernel of the
/// expected dimension s + 1.
struct RegularityReport {
  bool flows_independent = false;
  int kernel_dim = 0;
  bool regular = false;
};

RegularityReport regularity(const FiberGeometry& geo, const GeoPoint& p);

/// Newton solve of {mu = nu, Im f = t, constraints = 0} from a seed carrying
/// its cached potential value.
FiberPointState solve_fiber_point(const FiberGeometry& geo, const FiberSpec& spec,
                                  const GeoPoint& seed, Cx f_seed = 0.0,
                                  const FiberSolveOptions& opts = {});

struct TracePoint {
  GeoPoint p;
  double arc = 0.0;
  Cx f = 0.0;
  double res_moment = 0.0;
  double res_imf = 0.0;
  double res_omega = 0.0;
  double res_phase = 0.0;
  bool flagged = false;
};

struct FiberSample {
  FiberSpec spec;
  std::vector<TracePoint> points;
  bool hit_nonregular = false;
  int halvings = 0;
  RVec last_direction;  // real-embedded chart direction at the final point
  std::string note;
};

struct TraceOptions {
  int steps = 200;
  double h = 1e-2;
  double h_floor = 1e-5;
  double theta = 0.0;          // phase used for the per-point residuals
  int reanchor_every = 50;
  FiberSolveOptions solve;
  std::optional<RVec> initial_direction;  // real-embedded; defaults to an SVD pick
};

/// Predictor-corrector trace of the fiber through `seed` (which must already
/// satisfy the spec). The transverse direction is the kernel component
/// g-orthogonal to the orbit directions; RK4 predictor, Newton corrector.
FiberSample trace_fiber(const FiberGeometry& geo, const FiberSpec& spec, const GeoPoint& seed,
                        const TraceOptions& opts = {});

/// (max |omega(e_i, e_j)| over the normalized fiber frame,
///  |Im(e^{i theta} sigma'(v))| / |sigma'(v)| on the transverse direction).
std::pair<double, double> slag_residual(const FiberGeometry& geo, const GeoPoint& p, double theta);

struct BoundaryProbe {
  std::vector<double> divisor_distance;  // per trace point
  std::vector<double> dnu_distance;      // combined distance to D_nu
  double inf_distance = 0.0;
};

BoundaryProbe boundary_probe(const FiberGeometry& geo, const FiberSpec& spec,
                             const FiberSample& sample);

/// Projective realization: CP^n or the quadric, a weight matrix, and a
/// meromorphic section providing sigma'.
class ProjectiveFiberGeometry : public FiberGeometry {
 public:
  ProjectiveFiberGeometry(AmbientSpace space, WeightMatrix weights,
                          MeromorphicVolumeSection sigma);

  int chart_dim() const override { return space_.chart_dim(); }
  int rank() const override { return weights_.rank(); }
  int n_constraints() const override { return space_.defining ? 1 : 0; }

  RVec moment(const GeoPoint& p) const override;
  CMat moment_rows(const GeoPoint& p) const override;
  CMat flows(const GeoPoint& p) const override;
  Cx sigma1(const GeoPoint& p, const CVec& v) const override;
  double omega(const GeoPoint& p, const CVec& u, const CVec& v) const override;
  double metric(const GeoPoint& p, const CVec& u, const CVec& v) const override;
  CVec constraints(const GeoPoint& p) const override;
  CMat constraint_rows(const GeoPoint& p) const override;
  GeoPoint displace(const GeoPoint& p, const CVec& dv) const override;
  GeoPoint renormalize(const GeoPoint& p) const override;
  CVec transfer(const GeoPoint& from, const GeoPoint& to, const CVec& v) const override;
  Cx potential_increment(const GeoPoint& p, const GeoPoint& q) const override;
  double divisor_distance(const GeoPoint& p) const override;
  std::pair<double, double> boundary_gap(const GeoPoint& p, const RVec& nu) const override;

  GeoPoint lift(const AmbientPoint& p) const { return GeoPoint{p.z, p.chart}; }
  AmbientPoint drop(const GeoPoint& p) const { return AmbientPoint{p.x, p.chart}; }
  const ContractionForm& contraction() const { return sp_; }
  const WeightMatrix& weights() const { return weights_; }
  const AmbientSpace& space() const { return space_; }

 private:
  AmbientSpace space_;
  WeightMatrix weights_;
  MeromorphicVolumeSection sigma_;
  ContractionForm sp_;
};

}  // namespace slag
