#include "slag/volforms.hpp"

#include "slag/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace slag {

MeromorphicVolumeSection::MeromorphicVolumeSection(AmbientSpace space, HomogeneousPoly eta_,
                                                   std::optional<HomogeneousPoly> num)
    : ambient(space), eta(std::move(eta_)), numerator(std::move(num)) {
  const int want = ambient.anticanonical_degree();
  const int num_deg = numerator ? numerator->degree() : 0;
  if (eta.degree() - num_deg != want)
    throw ConfigError("meromorphic section: eta degree minus numerator degree must equal "
                      "the anticanonical degree");
  if (eta.nvars() != ambient.homog_coords())
    throw ConfigError("meromorphic section: variable count mismatch");
}

bool MeromorphicVolumeSection::is_invariant(const WeightMatrix& W) const {
  bool ok = true;
  eta.character(W.W, &ok);
  if (!ok) return false;
  if (numerator) {
    bool ok2 = true;
    numerator->character(W.W, &ok2);
    if (!ok2) return false;
  }
  return true;
}

MeromorphicVolumeSection make_section(const AmbientSpace& space, HomogeneousPoly eta,
                                      std::optional<HomogeneousPoly> num) {
  return MeromorphicVolumeSection(space, std::move(eta), std::move(num));
}

int AdjunctionForm::arity() const {
  return ambient.homog_coords() - 1 - static_cast<int>(residue_polys.size());
}

AdjunctionForm AdjunctionForm::sigma(const MeromorphicVolumeSection& s) {
  AdjunctionForm f;
  f.ambient = s.ambient;
  f.denominator = s.eta;
  f.numerator = s.numerator;
  if (s.ambient.defining) f.residue_polys.push_back(*s.ambient.defining);
  return f;
}

AdjunctionForm AdjunctionForm::hypersurface_residue(const AmbientSpace& space,
                                                    std::vector<HomogeneousPoly> polys,
                                                    std::optional<HomogeneousPoly> num) {
  AdjunctionForm f;
  f.ambient = space;
  if (space.defining) f.residue_polys.push_back(*space.defining);
  for (auto& p : polys) f.residue_polys.push_back(std::move(p));
  f.numerator = std::move(num);
  return f;
}

CMat AdjunctionForm::transversal_duals(const AmbientPoint& p) const {
  const int k = static_cast<int>(residue_polys.size());
  const int d = static_cast<int>(p.z.size()) - 1;
  CMat J(k, d);
  for (int i = 0; i < k; ++i) {
    const CVec g = affine_gradient(residue_polys[i], p);
    const double scale = std::pow(p.z.norm(), residue_polys[i].degree() - 1);
    if (g.norm() < 1e-8 * scale) throw SolverError("non-transversal point");
    J.row(i) = g.transpose();
  }
  // w = J^H (J J^H)^{-1}: columns satisfy dq_i(w_j) = delta_ij.
  const CMat JJh = J * J.adjoint();
  Eigen::FullPivLU<CMat> lu(JJh);
  if (!lu.isInvertible()) throw SolverError("non-transversal point");
  return J.adjoint() * lu.inverse();
}

Cx AdjunctionForm::eval(const AmbientPoint& p, const CMat& frame) const {
  const int d = static_cast<int>(p.z.size()) - 1;
  const int k = static_cast<int>(residue_polys.size());
  if (frame.cols() != d - k) throw ConfigError("adjunction form: wrong frame arity");
  if (denominator) {
    const double dist = divisor_distance(*denominator, p.z);
    if (dist < 1e-10) throw SolverError("on divisor");
  }
  CMat M(d, d);
  if (k > 0) M.leftCols(k) = transversal_duals(p);
  M.rightCols(d - k) = frame;
  Cx val = M.determinant();
  if (p.chart % 2 == 1) val = -val;
  if (numerator) val *= numerator->eval(p.z);
  if (denominator) val /= denominator->eval(p.z);
  return val;
}

Cx ContractionForm::operator()(const AmbientPoint& p, const CVec& v) const {
  const int s = weights.rank();
  const int arity = form.arity();
  if (arity != s + 1) throw ConfigError("contraction: weights rank must be arity - 1");
  CMat frame(v.size(), s + 1);
  for (int j = 0; j < s; ++j) frame.col(j) = flow_field(weights, j, p);
  frame.col(s) = v;
  return form.eval(p, frame);
}

Cx eval_sigma(const MeromorphicVolumeSection& s, const TangentFrame& frame) {
  return AdjunctionForm::sigma(s).eval(frame.base, frame.vectors);
}

Cx contract_sigma(const ContractionForm& sp, const AmbientPoint& p, const CVec& v) {
  return sp(p, v);
}

double divisor_distance(const HomogeneousPoly& eta, const CVec& z) {
  return poly_residual(eta, z);
}

Cx segment_integral(const ContractionForm& sp, const AmbientPoint& a, const AmbientPoint& b,
                    double tol) {
  const AmbientPoint bb = to_chart(b, a.chart);
  const CVec ua = affine(a);
  const CVec du = affine(bb) - ua;
  if (du.norm() == 0.0) return 0.0;
  auto integrand = [&](double t) {
    const AmbientPoint q = from_affine((ua + t * du).eval(), a.chart);
    return sp(q, du);
  };
  return adaptive_integrate01(integrand, tol);
}

namespace {

double path_clearance(const ContractionForm& sp, const AmbientPoint& a, const AmbientPoint& b) {
  // Minimum divisor distance over samples of the straight chart segment.
  if (!sp.form.denominator) return 1.0;
  const HomogeneousPoly& eta = *sp.form.denominator;
  const AmbientPoint bb = to_chart(b, a.chart);
  const CVec ua = affine(a);
  const CVec du = affine(bb) - ua;
  double worst = 1e300;
  for (int i = 0; i <= 32; ++i) {
    const double t = i / 32.0;
    const AmbientPoint q = from_affine((ua + t * du).eval(), a.chart);
    worst = std::min(worst, divisor_distance(eta, q.z));
    if (affine(q).norm() > 1e4) return 0.0;  // leave badly conditioned charts to a retry
  }
  return worst;
}

bool chart_reachable(const AmbientPoint& a, const AmbientPoint& b) {
  return std::abs(b.z[a.chart]) > 1e-8;
}

}  // namespace

Cx potential_f(const ContractionForm& sp, const AmbientPoint& base, const AmbientPoint& target,
               Rng& rng, const PathOptions& opts) {
  for (int attempt = 0; attempt <= opts.waypoint_retries; ++attempt) {
    std::vector<AmbientPoint> pts;
    pts.push_back(base);
    if (attempt > 0 && chart_reachable(base, target)) {
      const int nmid = 1 + (attempt % 2);
      const CVec ua = affine(base);
      const CVec ub = affine(to_chart(target, base.chart));
      for (int m = 1; m <= nmid; ++m) {
        const double t = static_cast<double>(m) / (nmid + 1);
        CVec mid = ua + t * (ub - ua);
        mid += 0.35 * (ub - ua).norm() * rng.cgauss_vec(static_cast<int>(mid.size()));
        pts.push_back(normalize(from_affine(mid, base.chart).z));
      }
    }
    pts.push_back(target);

    bool ok = true;
    for (size_t i = 0; i + 1 < pts.size() && ok; ++i) {
      if (!chart_reachable(pts[i], pts[i + 1]) ||
          path_clearance(sp, pts[i], pts[i + 1]) < opts.divisor_margin)
        ok = false;
    }
    if (!ok) continue;
    Cx acc = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
      acc += segment_integral(sp, pts[i], pts[i + 1], opts.quad_tol);
    return acc;
  }
  throw SolverError("potential_f: no divisor-avoiding path found");
}

Cx residue_trivialization(const AmbientSpace& space, const std::vector<HomogeneousPoly>& polys,
                          const TangentFrame& frame) {
  const AdjunctionForm f = AdjunctionForm::hypersurface_residue(space, polys);
  return f.eval(frame.base, frame.vectors);
}

PhaseAngle phase_constant(const AdjunctionForm& form, const WeightMatrix& W,
                          const std::vector<AmbientPoint>& sample, const std::string& tag,
                          double dispersion_tol) {
  if (W.rank() != form.arity())
    throw ConfigError("phase_constant: torus rank must equal form arity");
  if (sample.empty()) throw ConfigError("phase_constant: empty sample");
  std::vector<Cx> gs;
  gs.reserve(sample.size());
  Cx mean = 0.0;
  for (const auto& p : sample) {
    const Cx g = form.eval(p, flow_frame(W, p));
    gs.push_back(g);
    mean += g;
  }
  mean /= static_cast<double>(gs.size());
  double var = 0.0;
  for (const Cx& g : gs) var += std::norm(g - mean);
  var /= static_cast<double>(gs.size());
  const double rel = std::sqrt(var) / std::abs(mean);
  if (rel > dispersion_tol) throw SolverError("g not constant");
  PhaseAngle out;
  out.theta = wrap_angle(-std::arg(mean));
  out.component = tag;
  out.dispersion = rel;
  out.mean_g = mean;
  return out;
}

namespace {

CVec alpha_map(Cx a, Cx b) {
  CVec z(6);
  z << a, Cx(1), b, Cx(1), -a - b, Cx(1);
  return z;
}

CVec chart_velocity_raw(const CVec& z, const CVec& zdot, int chart) {
  const Cx zc = z[chart];
  const Cx dc = zdot[chart];
  CVec v(z.size() - 1);
  int k = 0;
  for (int i = 0; i < z.size(); ++i) {
    if (i == chart) continue;
    v[k++] = (zdot[i] * zc - z[i] * dc) / (zc * zc);
  }
  return v;
}

}  // namespace

Cx PushdownForm::eval(Cx a, Cx b, Cx tau) const {
  // Curve t -> alpha(a + t tau, b); the excluded points of the base are
  // (1,0) and (0,1).
  if (std::abs(a) < 1e-12 || std::abs(b) < 1e-12)
    throw ConfigError("pushdown: point excluded from C'");
  const CVec z = alpha_map(a, b);
  CVec zdot(6);
  zdot << tau, Cx(0), Cx(0), Cx(0), -tau, Cx(0);
  const AmbientPoint p = normalize(z);
  const CVec v = chart_velocity_raw(z, zdot, p.chart);
  return sp(p, v);
}

Cx PushdownForm::eval_translated(Cx a, Cx b, Cx tau, const RVec& torus_angles) const {
  const CVec z0 = alpha_map(a, b);
  CVec zdot(6);
  zdot << tau, Cx(0), Cx(0), Cx(0), -tau, Cx(0);
  const CVec z = apply_torus(sp.weights, torus_angles, z0);
  CVec zd(6);
  for (int i = 0; i < 6; ++i) {
    const Cx phase = (z0[i] == Cx(0)) ? Cx(1) : z[i] / z0[i];
    zd[i] = zdot[i] * phase;
  }
  const AmbientPoint p = normalize(z);
  const CVec v = chart_velocity_raw(z, zd, p.chart);
  return sp(p, v);
}

Cx loop_period(const PushdownForm& form, const std::function<Cx(double)>& a,
               const std::function<Cx(double)>& b, int panels) {
  const double h = 1e-7;
  Cx acc = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = static_cast<double>(k) / panels;
    const double len = 1.0 / panels;
    auto integrand = [&](double s) {
      const double t = lo + len * s;
      const Cx at = a(t);
      const Cx bt = b(t);
      const Cx ad = (a(t + h) - a(t - h)) / (2 * h);
      const Cx bd = (b(t + h) - b(t - h)) / (2 * h);
      // Pull the path into the slice b = 1 through the quotient coordinate
      // w = a/b (the form lives on the base, so this is exact).
      const Cx w = at / bt;
      const Cx wd = (ad * bt - at * bd) / (bt * bt);
      return form.eval(w, Cx(1), wd) * len;
    };
    acc += gl_integrate01(integrand, 16);
  }
  return acc;
}

}  // namespace slag
