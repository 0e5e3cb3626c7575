#include "slag/varieties.hpp"

#include <Eigen/SVD>

namespace slag {

AmbientSpace AmbientSpace::projective(int n) {
  AmbientSpace s;
  s.kind = SpaceKind::Projective;
  s.dim = n;
  return s;
}

AmbientSpace AmbientSpace::quadric() {
  AmbientSpace s;
  s.kind = SpaceKind::QuadricP5;
  s.dim = 4;
  std::vector<HomogeneousPoly::Term> terms;
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXi e = Eigen::VectorXi::Zero(6);
    e[2 * k] = 1;
    e[2 * k + 1] = 1;
    terms.push_back({Cx(1.0), e});
  }
  s.defining = HomogeneousPoly(2, 6, terms);
  return s;
}

AmbientPoint normalize(const CVec& z) {
  if (z.size() == 0 || z.norm() == 0.0) throw ConfigError("not a projective point");
  int c = 0;
  double best = std::abs(z[0]);
  for (int i = 1; i < z.size(); ++i) {
    const double m = std::abs(z[i]);
    if (m > best) { best = m; c = i; }
  }
  return in_chart(z, c);
}

AmbientPoint in_chart(const CVec& z, int chart) {
  if (chart < 0 || chart >= z.size()) throw ConfigError("chart index out of range");
  const Cx pivot = z[chart];
  if (pivot == Cx(0.0)) throw ConfigError("chart coordinate vanishes");
  AmbientPoint p;
  p.chart = chart;
  if (pivot == Cx(1.0)) {
    p.z = z;  // keep bitwise identity for already-normalized input
  } else {
    p.z = z / pivot;
    p.z[chart] = 1.0;
  }
  return p;
}

CVec affine(const AmbientPoint& p) {
  const int n = static_cast<int>(p.z.size()) - 1;
  CVec u(n);
  int k = 0;
  for (int i = 0; i <= n; ++i)
    if (i != p.chart) u[k++] = p.z[i];
  return u;
}

AmbientPoint from_affine(const CVec& u, int chart) {
  const int n = static_cast<int>(u.size());
  CVec z(n + 1);
  int k = 0;
  for (int i = 0; i <= n; ++i)
    z[i] = (i == chart) ? Cx(1.0) : u[k++];
  AmbientPoint p;
  p.z = z;
  p.chart = chart;
  return p;
}

AmbientPoint to_chart(const AmbientPoint& p, int to) { return in_chart(p.z, to); }

CVec homogeneous_velocity_to_chart(const AmbientPoint& p, const CVec& zdot) {
  // u_i = z_i / z_c  =>  u_i' = (z_i' z_c - z_i z_c') / z_c^2, with z_c == 1.
  const int c = p.chart;
  const Cx pc = zdot[c];
  const int n = static_cast<int>(p.z.size()) - 1;
  CVec v(n);
  int k = 0;
  for (int i = 0; i <= n; ++i) {
    if (i == c) continue;
    v[k++] = zdot[i] - p.z[i] * pc;
  }
  return v;
}

CVec transfer_vector(const AmbientPoint& p, const CVec& v, int to) {
  // Lift the chart vector to a homogeneous velocity with zero chart slot,
  // then push into the target chart.
  const int N = static_cast<int>(p.z.size());
  CVec zdot = CVec::Zero(N);
  int k = 0;
  for (int i = 0; i < N; ++i) {
    if (i == p.chart) continue;
    zdot[i] = v[k++];
  }
  // The curve z(t) = p.z + t zdot, rescaled into chart `to`:
  // w_i(t) = z_i(t)/z_to(t); w_i' = (zdot_i z_to - z_i zdot_to)/z_to^2.
  const Cx zto = p.z[to];
  if (zto == Cx(0.0)) throw ConfigError("vector transfer into a vanishing chart");
  const Cx dto = zdot[to];
  CVec w(N - 1);
  k = 0;
  for (int i = 0; i < N; ++i) {
    if (i == to) continue;
    w[k++] = (zdot[i] * zto - p.z[i] * dto) / (zto * zto);
  }
  return w;
}

Cx eval_poly(const HomogeneousPoly& poly, const AmbientPoint& p) { return poly.eval(p.z); }

CVec affine_gradient(const HomogeneousPoly& poly, const AmbientPoint& p) {
  const CVec g = poly.gradient(p.z);
  const int n = static_cast<int>(p.z.size()) - 1;
  CVec out(n);
  int k = 0;
  for (int i = 0; i <= n; ++i)
    if (i != p.chart) out[k++] = g[i];
  return out;
}

double poly_residual(const HomogeneousPoly& poly, const CVec& z) {
  const double nz = z.norm();
  return std::abs(poly.eval(z)) / std::pow(nz, poly.degree());
}

double on_variety_residual(const AmbientSpace& space, const AmbientPoint& p) {
  if (!space.defining) return 0.0;
  return poly_residual(*space.defining, p.z);
}

CMat fs_hermitian(const AmbientPoint& p) {
  const CVec u = affine(p);
  const int n = static_cast<int>(u.size());
  const double D = 1.0 + u.squaredNorm();
  CMat G = CMat::Identity(n, n) / D;
  G.noalias() -= (u.conjugate() * u.transpose()) / (D * D);
  return G;
}

Cx fs_h(const AmbientPoint& p, const CVec& u, const CVec& v) {
  const CMat G = fs_hermitian(p);
  return (u.transpose() * G * v.conjugate())(0, 0);
}

double fs_omega(const AmbientPoint& p, const CVec& u, const CVec& v) {
  return -2.0 * std::imag(fs_h(p, u, v));
}

double fs_metric(const AmbientPoint& p, const CVec& u, const CVec& v) {
  return 2.0 * std::real(fs_h(p, u, v));
}

CMat tangent_basis(const AmbientSpace& space, const AmbientPoint& p) {
  const int d = space.chart_dim();
  if (!space.defining) return CMat::Identity(d, d);
  const CVec g = affine_gradient(*space.defining, p);
  Eigen::JacobiSVD<CMat> svd(g.transpose(), Eigen::ComputeFullV);
  return svd.matrixV().rightCols(d - 1);
}

TangentFrame make_frame(const AmbientSpace& space, const AmbientPoint& p, const CMat& vectors,
                        double tol) {
  if (space.defining) {
    const CVec g = affine_gradient(*space.defining, p);
    const double gn = g.norm();
    for (int j = 0; j < vectors.cols(); ++j) {
      const double r = std::abs(g.dot(vectors.col(j).conjugate())) /
                       (gn * vectors.col(j).norm() + 1e-300);
      if (r > tol) throw SolverError("frame vector not tangent to the variety");
    }
  }
  return TangentFrame{p, vectors};
}

RMat induced_kahler(const AmbientSpace& space, const TangentFrame& frame) {
  if (space.defining) make_frame(space, frame.base, frame.vectors);  // tangency guard
  const int m = static_cast<int>(frame.vectors.cols());
  const CMat G = fs_hermitian(frame.base);
  RMat out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Cx h = (frame.vectors.col(i).transpose() * G * frame.vectors.col(j).conjugate())(0, 0);
      out(i, j) = -2.0 * std::imag(h);
    }
  return out;
}

AmbientPoint project_to_variety(const HomogeneousPoly& poly, const AmbientPoint& seed,
                                const ProjectOptions& opts, std::vector<double>* residual_log) {
  AmbientPoint p = seed;
  double r0 = poly_residual(poly, p.z);
  if (residual_log) residual_log->push_back(r0);
  if (r0 > opts.basin_radius)
    throw SolverError("projection seed outside Newton basin");
  for (int it = 0; it < opts.max_iters; ++it) {
    const double r = poly_residual(poly, p.z);
    if (r < opts.tol) return p;
    const Cx val = poly.eval(p.z);
    const CVec grad = affine_gradient(poly, p);
    const double g2 = grad.squaredNorm();
    if (g2 < 1e-300) throw SolverError("projection: vanishing gradient");
    // Minimum-norm Newton step: du = -val * conj(grad) / |grad|^2.
    const CVec du = -(val / g2) * grad.conjugate();
    CVec u = affine(p);
    u += du;
    p = from_affine(u, p.chart);
    if (residual_log) residual_log->push_back(poly_residual(poly, p.z));
  }
  if (poly_residual(poly, p.z) < opts.tol) return p;
  throw SolverError("projection did not converge");
}

AmbientPoint project_to_system(const std::vector<HomogeneousPoly>& polys,
                               const AmbientPoint& seed, const ProjectOptions& opts) {
  if (polys.empty()) return seed;
  if (polys.size() == 1) return project_to_variety(polys[0], seed, opts);
  AmbientPoint p = seed;
  const int k = static_cast<int>(polys.size());
  for (int it = 0; it < opts.max_iters; ++it) {
    double worst = 0.0;
    CVec vals(k);
    for (int i = 0; i < k; ++i) {
      vals[i] = polys[i].eval(p.z);
      worst = std::max(worst, poly_residual(polys[i], p.z));
    }
    if (worst < opts.tol) return p;
    const int d = static_cast<int>(p.z.size()) - 1;
    CMat J(k, d);
    for (int i = 0; i < k; ++i) J.row(i) = affine_gradient(polys[i], p).transpose();
    // Minimum-norm step du = J^H (J J^H)^{-1} (-vals)
    const CMat JJh = J * J.adjoint();
    const CVec y = JJh.ldlt().solve(-vals);
    const CVec du = J.adjoint() * y;
    CVec u = affine(p);
    u += du;
    p = from_affine(u, p.chart);
  }
  double worst = 0.0;
  for (const auto& q : polys) worst = std::max(worst, poly_residual(q, p.z));
  if (worst < opts.tol) return p;
  throw SolverError("system projection did not converge");
}

AmbientPoint random_point(const AmbientSpace& space, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const CVec z = rng.cgauss_vec(space.homog_coords());
    if (z.norm() < 1e-8) continue;
    AmbientPoint p = normalize(z);
    if (!space.defining) return p;
    try {
      ProjectOptions opts;
      opts.basin_radius = 1.0;  // Gaussian seeds on the quadric behave well
      return project_to_variety(*space.defining, p, opts);
    } catch (const SolverError&) {
      continue;
    }
  }
  throw SolverError("random_point: no convergent seed");
}

}  // namespace slag
