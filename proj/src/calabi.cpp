#include "slag/calabi.hpp"

#include <cmath>

namespace slag {

double CalabiProfile::u(double y) const {
  switch (kind) {
    case Kind::RicciFlat:
      return std::sqrt(t * y + l);
    case Kind::Compactifiable:
    case Kind::Custom:
      return u_fn(y);
  }
  return 0.0;
}

double CalabiProfile::du(double y) const {
  switch (kind) {
    case Kind::RicciFlat:
      return 0.5 * t / std::sqrt(t * y + l);
    case Kind::Compactifiable:
    case Kind::Custom:
      return du_fn(y);
  }
  return 0.0;
}

CalabiProfile CalabiProfile::ricci_flat(double t, double l) {
  CalabiProfile p;
  p.kind = Kind::RicciFlat;
  p.t = t;
  p.l = l;
  return p;
}

CalabiProfile CalabiProfile::compactifiable_default(double t) {
  CalabiProfile p;
  p.kind = Kind::Compactifiable;
  p.t = t;
  p.u_fn = [](double y) { return 2.0 - 1.0 / (1.0 + y); };
  p.du_fn = [](double y) { return 1.0 / ((1.0 + y) * (1.0 + y)); };
  p.u_inf = 2.0;
  return p;
}

CalabiProfile CalabiProfile::custom(double t, std::function<double(double)> u,
                                    std::function<double(double)> du,
                                    std::optional<double> u_inf) {
  CalabiProfile p;
  p.kind = Kind::Custom;
  p.t = t;
  p.u_fn = std::move(u);
  p.du_fn = std::move(du);
  p.u_inf = u_inf;
  return p;
}

CalabiProfile CalabiProfile::scaled(double factor) const {
  CalabiProfile copy = *this;
  const CalabiProfile self = *this;
  copy.kind = Kind::Custom;
  copy.u_fn = [self, factor](double y) { return factor * self.u(y); };
  copy.du_fn = [self, factor](double y) { return factor * self.du(y); };
  if (u_inf) copy.u_inf = factor * *u_inf;
  return copy;
}

namespace {

// Base chart data for (CP^1, omega_FS): G = (1+|z|^2)^{-2} is the Hermitian
// coefficient, H = (1+|z|^2)^2 the fiber metric of the canonical bundle, and
// theta_c = 2 zbar / (1+|z|^2) the Chern connection form on dz.
double base_G(Cx z) {
  const double q = 1.0 + std::norm(z);
  return 1.0 / (q * q);
}

double fiber_H(Cx z) {
  const double q = 1.0 + std::norm(z);
  return q * q;
}

Cx chern_theta(Cx z) { return 2.0 * std::conj(z) / (1.0 + std::norm(z)); }

}  // namespace

double measure_ke_constant(Rng& rng, int samples) {
  // Ricci form of the base: -i d/dbar log det g; for CP^1 the ratio to omega
  // is constant, measured here instead of assumed.
  double acc = 0.0;
  const double h = 1e-4;
  for (int k = 0; k < samples; ++k) {
    const Cx z(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
    auto neg_log_det = [&](double dx, double dy) {
      return -std::log(base_G(z + Cx(dx, dy)));
    };
    const double dxx = (neg_log_det(h, 0) - 2 * neg_log_det(0, 0) + neg_log_det(-h, 0)) / (h * h);
    const double dyy = (neg_log_det(0, h) - 2 * neg_log_det(0, 0) + neg_log_det(0, -h)) / (h * h);
    const double ddbar = 0.25 * (dxx + dyy);  // d^2/dz dzbar of a real function
    acc += ddbar / base_G(z);
  }
  return acc / samples;
}

CMat calabi_hermitian(const CalabiProfile& p, const KNPoint& pt) {
  const double s = pt.r2();
  const double us = p.u(s);
  const double dus = p.du(s);
  const double G = base_G(pt.z);
  const double H = fiber_H(pt.z);
  const Cx th = chern_theta(pt.z);
  // h(a, b) = u G a_z conj(b_z) + t^{-1} u' H ahat conj(bhat),
  // ahat = a_xi + theta(a_z) xi.
  const Cx cz = th * pt.xi;
  CMat h(2, 2);
  const double vert = dus * H / p.t;
  h(0, 0) = us * G + vert * cz * std::conj(cz);
  h(0, 1) = vert * cz;  // pairing (e_z, e_xi): ahat = cz, bhat = 1
  h(1, 0) = vert * std::conj(cz);
  h(1, 1) = vert;
  return h;
}

double metric_eval(const CalabiProfile& p, const KNPoint& pt, const CVec& a, const CVec& b) {
  const CMat h = calabi_hermitian(p, pt);
  const Cx val = (a.transpose() * h * b.conjugate())(0, 0);
  return -2.0 * std::imag(val);
}

double calabi_metric_g(const CalabiProfile& p, const KNPoint& pt, const CVec& a, const CVec& b) {
  const CMat h = calabi_hermitian(p, pt);
  const Cx val = (a.transpose() * h * b.conjugate())(0, 0);
  return 2.0 * std::real(val);
}

double ricci_residual_general(const std::function<CMat(const KNPoint&)>& hermitian,
                              const KNPoint& pt, double h) {
  auto logdet = [&](const KNPoint& q) {
    const CMat m = hermitian(q);
    const Cx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return std::log(std::abs(det));
  };
  auto shift = [&](double a, double b, double c, double d) {
    KNPoint q = pt;
    q.z += Cx(a, b);
    q.xi += Cx(c, d);
    return logdet(q);
  };
  // Complex Hessian d^2 / dw_j dwbar_k over w = (z, xi) from second
  // differences of the four real coordinates.
  double coords[4] = {0, 0, 0, 0};
  (void)coords;
  auto second = [&](int i, int j) {
    auto at = [&](double ei, double ej) {
      double d[4] = {0, 0, 0, 0};
      d[i] += ei;
      d[j] += ej;
      return shift(d[0], d[1], d[2], d[3]);
    };
    if (i == j) return (at(h, 0) - 2 * at(0, 0) + at(-h, 0)) / (h * h);
    return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  };
  double frob = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
      const double re = 0.25 * (second(xj, xk) + second(yj, yk));
      const double im = 0.25 * (second(xj, yk) - second(yj, xk));
      frob += re * re + im * im;
    }
  return std::sqrt(frob);
}

double ricci_residual(const CalabiProfile& p, const KNPoint& pt, double h) {
  return ricci_residual_general([&](const KNPoint& q) { return calabi_hermitian(p, q); }, pt, h);
}

double closedness_residual(const CalabiProfile& p, const KNPoint& pt, const CVec& a,
                           const CVec& b, const CVec& c, double h) {
  auto om = [&](const CVec& off, const CVec& u, const CVec& v) {
    KNPoint q = pt;
    q.z += off[0];
    q.xi += off[1];
    return metric_eval(p, q, u, v);
  };
  auto deriv = [&](const CVec& dir, const CVec& u, const CVec& v) {
    return (om((h * dir).eval(), u, v) - om((-h * dir).eval(), u, v)) / (2 * h);
  };
  return std::abs(deriv(a, b, c) - deriv(b, a, c) + deriv(c, a, b));
}

double base_moment(Cx z) {
  const double n = std::norm(z);
  return (n - 1.0) / (2.0 * (1.0 + n));
}

double moment_map_K(const CalabiProfile& p, const KNPoint& pt) {
  return p.u(pt.r2()) * base_moment(pt.z);
}

ProfileValidation validate_profile(const CalabiProfile& p) {
  ProfileValidation v;
  v.u_positive = true;
  v.du_positive = true;
  for (int k = 0; k <= 240; ++k) {
    const double y = std::pow(10.0, -6.0 + 12.0 * k / 240.0);
    if (!(p.u(y) > 0.0)) v.u_positive = false;
    if (!(p.du(y) > 0.0)) v.du_positive = false;
  }
  v.ok = v.u_positive && v.du_positive;
  if (p.kind == CalabiProfile::Kind::RicciFlat) return v;

  // w(x) = x^{-2} u'(1/x) on a log grid over [1e-6, 1]; positivity, a
  // positive infimum, and a Cauchy tail near x = 0.
  const int n = 160;
  std::vector<double> w(n + 1);
  v.w_positive = true;
  double inf = 1e300;
  for (int k = 0; k <= n; ++k) {
    const double x = std::pow(10.0, -6.0 + 6.0 * k / n);
    w[k] = p.du(1.0 / x) / (x * x);
    if (!(w[k] > 0.0)) v.w_positive = false;
    inf = std::min(inf, w[k]);
  }
  v.w_infimum = inf;
  double tail = 0.0;
  for (int k = 0; k < 20; ++k) tail = std::max(tail, std::abs(w[k + 1] - w[k]));
  v.w_cauchy_tail = tail;
  v.ok = v.ok && v.w_positive && inf > 0.0 && tail < 1e-6;
  return v;
}

SharpnessReport sharpness_scan(const CalabiProfile& p, double nu, Rng& rng, int samples) {
  if (!p.u_inf) throw ConfigError("sharpness_scan needs a compactifiable profile");
  SharpnessReport rep;
  rep.nu = nu;
  rep.nu_prime = *p.u_inf * nu;
  const double sgn = nu >= 0.0 ? 1.0 : -1.0;
  double best = -1e300;
  double best_m = 0.0, best_s = 0.0;
  for (int k = 0; k < samples; ++k) {
    // Bias the sample toward the extremes where the sup is approached.
    const double m = sgn * 0.5 * (1.0 - std::pow(10.0, -rng.uniform(0.0, 8.0)));
    const double s = std::pow(10.0, rng.uniform(-2.0, 9.0));
    const double val = sgn > 0 ? p.u(s) * m : -p.u(s) * m;
    if (val > best) {
      best = val;
      best_m = m;
      best_s = s;
    }
  }
  // Local coordinate ascent refinement.
  double step_m = 0.1 * (0.5 - std::abs(best_m)), step_s = 0.5 * best_s;
  for (int it = 0; it < 200; ++it) {
    bool improved = false;
    for (const double dm : {-step_m, step_m}) {
      const double m2 = best_m + dm;
      if (std::abs(m2) >= 0.5) continue;
      const double val = sgn * p.u(best_s) * m2;
      if (val > best) {
        best = val;
        best_m = m2;
        improved = true;
      }
    }
    for (const double ds : {-step_s, step_s}) {
      const double s2 = best_s + ds;
      if (s2 <= 0.0) continue;
      const double val = sgn * p.u(s2) * best_m;
      if (val > best) {
        best = val;
        best_s = s2;
        improved = true;
      }
    }
    if (!improved) {
      step_m *= 0.5;
      step_s *= 0.5;
      if (step_m < 1e-12 && step_s < 1e-9 * best_s) break;
    }
  }
  rep.sup_mu = sgn * best;
  rep.gap = sgn * (rep.nu_prime - rep.sup_mu);
  return rep;
}

// ---------------------------------------------------------------------------
// Fibration geometry on K(CP^1)

GeoPoint KNGeometry::lift(const KNPoint& pt) {
  GeoPoint p;
  p.x.resize(2);
  p.x << pt.z, pt.xi;
  return p;
}

KNPoint KNGeometry::drop(const GeoPoint& p) { return KNPoint{p.x[0], p.x[1]}; }

RVec KNGeometry::moment(const GeoPoint& p) const {
  RVec mu(1);
  mu[0] = moment_map_K(profile_, drop(p));
  return mu;
}

CMat KNGeometry::moment_rows(const GeoPoint& p) const {
  const KNPoint pt = drop(p);
  const double s = pt.r2();
  const double us = profile_.u(s), dus = profile_.du(s);
  const double m = base_moment(pt.z);
  const double q = 1.0 + std::norm(pt.z);
  const double H = q * q;
  // d mu'(v) = u'(s) ds(v) m + u dm(v_z), as 2 Re(conj(gamma) . v).
  const Cx gz = std::conj(Cx(dus * m * 2.0 * q * std::norm(pt.xi)) * std::conj(pt.z) +
                          Cx(us / (q * q)) * std::conj(pt.z));
  const Cx gxi = std::conj(Cx(dus * m * H) * std::conj(pt.xi));
  CMat rows(1, 2);
  rows(0, 0) = gz;
  rows(0, 1) = gxi;
  return rows;
}

CMat KNGeometry::flows(const GeoPoint& p) const {
  CMat X(2, 1);
  X(0, 0) = kI * p.x[0];
  X(1, 0) = -kI * p.x[1];
  return X;
}

Cx KNGeometry::sigma1(const GeoPoint& p, const CVec& v) const {
  return -kI * (p.x[1] * v[0] + p.x[0] * v[1]);
}

CVec KNGeometry::sigma1_coeffs(const GeoPoint& p) const {
  CVec c(2);
  c << -kI * p.x[1], -kI * p.x[0];
  return c;
}

double KNGeometry::omega(const GeoPoint& p, const CVec& u, const CVec& v) const {
  return metric_eval(profile_, drop(p), u, v);
}

double KNGeometry::metric(const GeoPoint& p, const CVec& u, const CVec& v) const {
  return calabi_metric_g(profile_, drop(p), u, v);
}

GeoPoint KNGeometry::displace(const GeoPoint& p, const CVec& dv) const {
  GeoPoint q = p;
  q.x += dv;
  return q;
}

std::optional<Cx> KNGeometry::potential_closed_form(const GeoPoint& p) const {
  return -kI * p.x[0] * p.x[1];
}

double KNGeometry::divisor_distance(const GeoPoint& p) const {
  const double s = drop(p).r2();
  return 1.0 / std::sqrt(std::max(s, 1e-12));
}

std::pair<double, double> KNGeometry::boundary_gap(const GeoPoint& p, const RVec& nu) const {
  const KNPoint pt = drop(p);
  const double dd = divisor_distance(p);
  const double mu_at_infinity =
      profile_.u_inf ? *profile_.u_inf * base_moment(pt.z) : moment_map_K(profile_, pt);
  return {dd, std::abs(mu_at_infinity - nu[0])};
}

}  // namespace slag
