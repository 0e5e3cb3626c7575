#include "slag/fibration.hpp"

#include "slag/quadrature.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace slag {

CVec FiberGeometry::sigma1_coeffs(const GeoPoint& p) const {
  const int d = chart_dim();
  CVec c(d);
  for (int k = 0; k < d; ++k) {
    CVec e = CVec::Zero(d);
    e[k] = 1.0;
    c[k] = sigma1(p, e);
  }
  return c;
}

CVec FiberGeometry::transfer(const GeoPoint&, const GeoPoint&, const CVec& v) const { return v; }

Cx FiberGeometry::potential_increment(const GeoPoint& p, const GeoPoint& q) const {
  if (auto cf = potential_closed_form(p)) {
    return *potential_closed_form(q) - *cf;
  }
  throw SolverError("potential_increment: geometry provides no default");
}

std::pair<double, double> FiberGeometry::boundary_gap(const GeoPoint& p, const RVec& nu) const {
  return {divisor_distance(p), (moment(p) - nu).norm()};
}

namespace {

/// Real-linear rows of the level-set system at p: [d mu; d Im f; Re dq; Im dq].
RMat system_rows(const FiberGeometry& geo, const GeoPoint& p) {
  const int d = geo.chart_dim();
  const int s = geo.rank();
  const int k = geo.n_constraints();
  RMat J(s + 1 + 2 * k, 2 * d);
  const CMat mg = geo.moment_rows(p);
  for (int j = 0; j < s; ++j) {
    // d mu_j(v) = 2 Re(conj(gamma) . v)
    J.row(j).head(d) = 2.0 * mg.row(j).real();
    J.row(j).tail(d) = 2.0 * mg.row(j).imag();
  }
  const CVec c = geo.sigma1_coeffs(p);
  // d Im f (v) = Im(c . v)
  J.row(s).head(d) = c.imag();
  J.row(s).tail(d) = c.real();
  if (k > 0) {
    const CMat q = geo.constraint_rows(p);
    for (int i = 0; i < k; ++i) {
      J.row(s + 1 + 2 * i).head(d) = q.row(i).real();
      J.row(s + 1 + 2 * i).tail(d) = -q.row(i).imag();
      J.row(s + 2 + 2 * i).head(d) = q.row(i).imag();
      J.row(s + 2 + 2 * i).tail(d) = q.row(i).real();
    }
  }
  return J;
}

RVec residual_vector(const FiberGeometry& geo, const FiberSpec& spec, const GeoPoint& p, Cx f) {
  const int s = geo.rank();
  const int k = geo.n_constraints();
  RVec r(s + 1 + 2 * k);
  r.head(s) = geo.moment(p) - spec.nu;
  r[s] = std::imag(f) - spec.t;
  if (k > 0) {
    const CVec q = geo.constraints(p);
    for (int i = 0; i < k; ++i) {
      r[s + 1 + 2 * i] = std::real(q[i]);
      r[s + 2 + 2 * i] = std::imag(q[i]);
    }
  }
  return r;
}

/// g-inner product on real-embedded chart vectors.
double metric_real(const FiberGeometry& geo, const GeoPoint& p, const RVec& a, const RVec& b) {
  return geo.metric(p, cx_extract(a), cx_extract(b));
}

struct KernelSplit {
  RMat kernel;      // 2d x m
  RVec transverse;  // unit (g) vector, g-orthogonal to the orbit directions
  int kernel_dim = 0;
  bool ok = false;
};

KernelSplit kernel_split(const FiberGeometry& geo, const GeoPoint& p) {
  KernelSplit out;
  const RMat J = system_rows(geo, p);
  Eigen::JacobiSVD<RMat> svd(J, Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-8 * std::max(1.0, smax)) ++rank;
  const int m = static_cast<int>(J.cols()) - rank;
  out.kernel_dim = m;
  if (m != geo.rank() + 1) return out;  // non-regular point
  out.kernel = svd.matrixV().rightCols(m);

  // Orthonormalize the orbit directions in g, then strip them from the kernel.
  const CMat X = geo.flows(p);
  std::vector<RVec> basis;
  for (int j = 0; j < X.cols(); ++j) {
    RVec b = real_embed(X.col(j));
    for (const RVec& e : basis) b -= metric_real(geo, p, e, b) * e;
    const double n = std::sqrt(std::max(metric_real(geo, p, b, b), 0.0));
    if (n < 1e-12) return out;  // flows dependent: non-regular
    basis.push_back(b / n);
  }
  RMat resid(J.cols(), m);
  for (int i = 0; i < m; ++i) {
    RVec r = out.kernel.col(i);
    for (const RVec& e : basis) r -= metric_real(geo, p, e, r) * e;
    resid.col(i) = r;
  }
  Eigen::JacobiSVD<RMat> rsvd(resid, Eigen::ComputeFullU);
  RVec v = rsvd.matrixU().col(0);
  const double nv = std::sqrt(std::max(metric_real(geo, p, v, v), 0.0));
  if (nv < 1e-12) return out;
  out.transverse = v / nv;
  out.ok = true;
  return out;
}

}  // namespace

RegularityReport regularity(const FiberGeometry& geo, const GeoPoint& p) {
  RegularityReport rep;
  const CMat X = geo.flows(p);
  RMat Xr(2 * geo.chart_dim(), X.cols());
  for (int j = 0; j < X.cols(); ++j) Xr.col(j) = real_embed(X.col(j));
  Eigen::JacobiSVD<RMat> svd(Xr);
  const auto& sv = svd.singularValues();
  rep.flows_independent = sv.size() > 0 && sv[sv.size() - 1] > 1e-8 * std::max(1.0, sv[0]);
  try {
    const KernelSplit ks = kernel_split(geo, p);
    rep.kernel_dim = ks.kernel_dim;
    rep.regular = rep.flows_independent && ks.ok;
  } catch (const SolverError&) {
    rep.kernel_dim = -1;  // sigma' unavailable (divisor); certainly not regular
    rep.regular = false;
  }
  return rep;
}

FiberPointState solve_fiber_point(const FiberGeometry& geo, const FiberSpec& spec,
                                  const GeoPoint& seed, Cx f_seed, const FiberSolveOptions& opts) {
  if (spec.nu.size() != geo.rank()) throw ConfigError("fiber spec rank mismatch");
  FiberPointState st;
  st.p = seed;
  st.f = geo.potential_closed_form(seed).value_or(f_seed);
  for (int it = 0; it <= opts.max_iters; ++it) {
    const RVec r = residual_vector(geo, spec, st.p, st.f);
    if (r.cwiseAbs().maxCoeff() < opts.tol) {
      st.iters = it;
      return st;
    }
    if (it == opts.max_iters) break;
    RMat J = system_rows(geo, st.p);
    // Row equilibration keeps mixed scales (tiny moment gradients near a
    // compactified divisor) solvable.
    RVec rr = r;
    for (int i = 0; i < J.rows(); ++i) {
      const double n = std::max(J.row(i).norm(), 1e-14);
      J.row(i) /= n;
      rr[i] /= n;
    }
    const RVec du = J.completeOrthogonalDecomposition().solve(-rr);
    if (!du.allFinite()) throw SolverError("fiber Newton produced non-finite step");
    const GeoPoint next = geo.displace(st.p, cx_extract(du));
    st.f = st.f + geo.potential_increment(st.p, next);
    st.p = next;
  }
  throw SolverError("fiber Newton did not converge");
}

std::pair<double, double> slag_residual(const FiberGeometry& geo, const GeoPoint& p,
                                        double theta) {
  const KernelSplit ks = kernel_split(geo, p);
  if (!ks.ok) throw SolverError("slag_residual: non-regular point");
  const CMat X = geo.flows(p);
  const int s = static_cast<int>(X.cols());
  std::vector<CVec> frame;
  for (int j = 0; j < s; ++j) {
    const CVec xj = X.col(j);
    const double n = std::sqrt(std::max(geo.metric(p, xj, xj), 1e-300));
    frame.push_back(xj / n);
  }
  frame.push_back(cx_extract(ks.transverse));
  double worst = 0.0;
  for (size_t i = 0; i < frame.size(); ++i)
    for (size_t j = i + 1; j < frame.size(); ++j)
      worst = std::max(worst, std::abs(geo.omega(p, frame[i], frame[j])));
  const Cx sv = geo.sigma1(p, frame.back());
  const double phase_res = std::abs(std::imag(std::polar(1.0, theta) * sv)) /
                           std::max(std::abs(sv), 1e-300);
  return {worst, phase_res};
}

namespace {

RVec tangent_direction(const FiberGeometry& geo, const GeoPoint& p, const RVec& align) {
  const KernelSplit ks = kernel_split(geo, p);
  if (!ks.ok) throw SolverError("trace: non-regular point (kernel dimension)");
  // g-unit transverse vector: stepping in metric arc length keeps the
  // parametrization chart independent, which is what makes traces reversible.
  RVec v = ks.transverse;
  if (align.size() == v.size() && align.dot(v) < 0.0) v = -v;
  return v;
}

}  // namespace

FiberSample trace_fiber(const FiberGeometry& geo, const FiberSpec& spec, const GeoPoint& seed,
                        const TraceOptions& opts) {
  FiberSample out;
  out.spec = spec;
  FiberPointState st = solve_fiber_point(geo, spec, seed, 0.0, opts.solve);

  RVec dir;
  if (opts.initial_direction) {
    dir = *opts.initial_direction;
    dir /= dir.norm();
  } else {
    dir = tangent_direction(geo, st.p, RVec());
  }

  auto record = [&](double arc) {
    TracePoint tp;
    tp.p = st.p;
    tp.arc = arc;
    tp.f = st.f;
    const RVec r = residual_vector(geo, spec, st.p, st.f);
    tp.res_moment = r.head(geo.rank()).cwiseAbs().maxCoeff();
    tp.res_imf = std::abs(r[geo.rank()]);
    try {
      const auto [w, ph] = slag_residual(geo, st.p, opts.theta);
      tp.res_omega = w;
      tp.res_phase = ph;
    } catch (const SolverError&) {
      tp.flagged = true;
      out.hit_nonregular = true;
    }
    out.points.push_back(tp);
  };

  double arc = 0.0;
  record(arc);
  double h = opts.h;
  int anchor_index = 0;

  for (int step = 0; step < opts.steps;) {
    const GeoPoint p0 = st.p;
    const Cx f0 = st.f;
    bool advanced = false;
    try {
      const RVec k1 = tangent_direction(geo, p0, dir);
      auto stage = [&](const RVec& k, double frac) {
        const GeoPoint q = geo.displace(p0, cx_extract((frac * h * k).eval()));
        return tangent_direction(geo, q, k1);
      };
      const RVec k2 = stage(k1, 0.5);
      const RVec k3 = stage(k2, 0.5);
      const RVec k4 = stage(k3, 1.0);
      const RVec dv = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const GeoPoint pred = geo.displace(p0, cx_extract(dv));
      const Cx f_pred = f0 + geo.potential_increment(p0, pred);
      FiberPointState corrected = solve_fiber_point(geo, spec, pred, f_pred, opts.solve);
      const double ds = (corrected.p.x - p0.x).norm();
      arc += ds;
      st = corrected;
      dir = dv / dv.norm();
      advanced = true;
    } catch (const SolverError&) {
      if (h * 0.5 < opts.h_floor) {
        out.note = "step floor reached";
        break;
      }
      h *= 0.5;
      ++out.halvings;
      continue;
    }
    if (advanced) {
      ++step;
      h = std::min(1.5 * h, opts.h);  // recover after divisor-driven halvings
      // Re-chart and carry the direction across.
      const GeoPoint rn = geo.renormalize(st.p);
      if (rn.chart != st.p.chart) {
        const CVec moved = geo.transfer(st.p, rn, cx_extract(dir));
        dir = real_embed(moved);
        dir /= dir.norm();
        st.p = rn;
      }
      record(arc);
      if (out.hit_nonregular) break;
      if (opts.reanchor_every > 0 &&
          static_cast<int>(out.points.size()) - anchor_index > opts.reanchor_every &&
          !geo.potential_closed_form(st.p)) {
        // Refine the accumulated potential along the stored trace polyline.
        Cx f = out.points[anchor_index].f;
        for (size_t i = anchor_index; i + 1 < out.points.size(); ++i) {
          const GeoPoint& a = out.points[i].p;
          GeoPoint b = out.points[i + 1].p;
          if (b.chart != a.chart) {
            // Segment was integrated in a's chart before renormalization;
            // rebuild the same-chart endpoint.
            b = GeoPoint{in_chart(b.x, a.chart).z, a.chart};
          }
          f += geo.potential_increment(a, b);
        }
        st.f = f;
        anchor_index = static_cast<int>(out.points.size()) - 1;
      }
    }
  }
  out.last_direction = dir;
  return out;
}

BoundaryProbe boundary_probe(const FiberGeometry& geo, const FiberSpec& spec,
                             const FiberSample& sample) {
  BoundaryProbe out;
  double inf = 1e300;
  for (const auto& tp : sample.points) {
    const auto [dd, gap] = geo.boundary_gap(tp.p, spec.nu);
    out.divisor_distance.push_back(dd);
    const double combined = std::hypot(dd, gap);
    out.dnu_distance.push_back(combined);
    inf = std::min(inf, combined);
  }
  out.inf_distance = inf;
  return out;
}

// ---------------------------------------------------------------------------
// Projective realization

ProjectiveFiberGeometry::ProjectiveFiberGeometry(AmbientSpace space, WeightMatrix weights,
                                                 MeromorphicVolumeSection sigma)
    : space_(space),
      weights_(std::move(weights)),
      sigma_(std::move(sigma)),
      sp_{AdjunctionForm::sigma(sigma_), weights_} {
  if (weights_.coords() != space_.homog_coords())
    throw ConfigError("fiber geometry: weight matrix does not match the ambient space");
}

RVec ProjectiveFiberGeometry::moment(const GeoPoint& p) const {
  return moment_map(weights_, drop(p));
}

CMat ProjectiveFiberGeometry::moment_rows(const GeoPoint& p) const {
  return moment_gradients(weights_, drop(p));
}

CMat ProjectiveFiberGeometry::flows(const GeoPoint& p) const {
  return flow_frame(weights_, drop(p));
}

Cx ProjectiveFiberGeometry::sigma1(const GeoPoint& p, const CVec& v) const {
  return sp_(drop(p), v);
}

double ProjectiveFiberGeometry::omega(const GeoPoint& p, const CVec& u, const CVec& v) const {
  return fs_omega(drop(p), u, v);
}

double ProjectiveFiberGeometry::metric(const GeoPoint& p, const CVec& u, const CVec& v) const {
  return fs_metric(drop(p), u, v);
}

CVec ProjectiveFiberGeometry::constraints(const GeoPoint& p) const {
  if (!space_.defining) return CVec(0);
  CVec q(1);
  q[0] = space_.defining->eval(p.x);
  return q;
}

CMat ProjectiveFiberGeometry::constraint_rows(const GeoPoint& p) const {
  if (!space_.defining) return CMat(0, chart_dim());
  CMat J(1, chart_dim());
  J.row(0) = affine_gradient(*space_.defining, drop(p)).transpose();
  return J;
}

GeoPoint ProjectiveFiberGeometry::displace(const GeoPoint& p, const CVec& dv) const {
  const AmbientPoint moved = from_affine((affine(drop(p)) + dv).eval(), p.chart);
  return lift(moved);
}

GeoPoint ProjectiveFiberGeometry::renormalize(const GeoPoint& p) const {
  return lift(normalize(p.x));
}

CVec ProjectiveFiberGeometry::transfer(const GeoPoint& from, const GeoPoint& to,
                                       const CVec& v) const {
  return transfer_vector(drop(from), v, to.chart);
}

double ProjectiveFiberGeometry::divisor_distance(const GeoPoint& p) const {
  return slag::divisor_distance(sigma_.eta, p.x);
}

std::pair<double, double> ProjectiveFiberGeometry::boundary_gap(const GeoPoint& p,
                                                                const RVec& nu) const {
  const double dd = divisor_distance(p);
  // Project onto the divisor for the moment gap when the point is close.
  try {
    ProjectOptions opts;
    opts.basin_radius = 0.25;
    const AmbientPoint on_d = project_to_variety(sigma_.eta, drop(p), opts);
    return {dd, (moment_map(weights_, on_d) - nu).norm()};
  } catch (const SolverError&) {
    return {dd, (moment(p) - nu).norm()};
  }
}

Cx ProjectiveFiberGeometry::potential_increment(const GeoPoint& p, const GeoPoint& q) const {
  return segment_integral(sp_, drop(p), drop(q), 1e-11);
}

}  // namespace slag
