#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slag/calabi.hpp"

using namespace slag;

namespace {

KNPoint random_point(Rng& rng, double r2_lo = 1e-2, double r2_hi = 1e2) {
  KNPoint pt;
  pt.z = Cx(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));
  const double target = std::pow(10.0, rng.uniform(std::log10(r2_lo), std::log10(r2_hi)));
  const double q = 1.0 + std::norm(pt.z);
  pt.xi = std::polar(std::sqrt(target) / q, rng.uniform(-kPi, kPi));
  return pt;
}

CVec horizontal_at(const KNPoint& pt, Cx vz) {
  const Cx theta = 2.0 * std::conj(pt.z) / (1.0 + std::norm(pt.z));
  CVec v(2);
  v << vz, -theta * vz * pt.xi;
  return v;
}

CVec vertical_at(Cx w) {
  CVec v(2);
  v << Cx(0), w;
  return v;
}

}  // namespace

TEST_CASE("the measured KE constant of the Fubini-Study base is 2") {
  Rng rng(71);
  const double t = measure_ke_constant(rng);
  CHECK(t == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("metric splits horizontally and vertically with the stated values") {
  Rng rng(72);
  const double t = measure_ke_constant(rng);
  const CalabiProfile prof = CalabiProfile::compactifiable_default(t);

  // Zero-section horizontal pair reduces to u(0) omega_FS.
  KNPoint pt0;
  pt0.z = Cx(0.4, -0.3);
  pt0.xi = 0.0;
  const Cx a = rng.cgauss(), b = rng.cgauss();
  const double got = metric_eval(prof, pt0, horizontal_at(pt0, a), horizontal_at(pt0, b));
  const double G = 1.0 / std::pow(1.0 + std::norm(pt0.z), 2);
  const double want = prof.u(0.0) * (-2.0 * std::imag(a * std::conj(b) * G));
  CHECK(got == doctest::Approx(want).epsilon(1e-12));

  for (int k = 0; k < 20; ++k) {
    const KNPoint pt = random_point(rng);
    // Vertical pair: t^{-1} u'(r^2) times the fiber form.
    const Cx w1 = rng.cgauss(), w2 = rng.cgauss();
    const double H = std::pow(1.0 + std::norm(pt.z), 2);
    const double vert = metric_eval(prof, pt, vertical_at(w1), vertical_at(w2));
    const double vwant = prof.du(pt.r2()) / t * (-2.0 * std::imag(w1 * std::conj(w2) * H));
    CHECK(vert == doctest::Approx(vwant).epsilon(1e-12));
    // Mixed pairs vanish.
    const double mixed = metric_eval(prof, pt, horizontal_at(pt, rng.cgauss()), vertical_at(w2));
    CHECK(std::abs(mixed) < 1e-10);
    // Positivity.
    const CVec v = rng.cgauss_vec(2);
    CHECK(metric_eval(prof, pt, v, (kI * v).eval()) > 0.0);
  }
}

TEST_CASE("ricci residual: flat for the calibrated profile, not for the bounded one") {
  Rng rng(73);
  const double t = measure_ke_constant(rng);
  const CalabiProfile flat = CalabiProfile::ricci_flat(t, 1.0);
  for (int k = 0; k < 20; ++k) {
    const KNPoint pt = random_point(rng, 1e-1, 1e1);
    CHECK(ricci_residual(flat, pt) < 1e-4);
  }

  const CalabiProfile comp = CalabiProfile::compactifiable_default(t);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const KNPoint pt = random_point(rng, 1e-1, 1e1);
    worst = std::max(worst, ricci_residual(comp, pt));
  }
  CHECK(worst > 1e-2);

  // Flat-model sanity: identity Hermitian metric has zero residual.
  const KNPoint pt = random_point(rng);
  const double r = ricci_residual_general([](const KNPoint&) { return CMat::Identity(2, 2); }, pt);
  CHECK(r < 1e-6);
}

TEST_CASE("omega_u is closed for both profile kinds") {
  Rng rng(74);
  const double t = measure_ke_constant(rng);
  for (const CalabiProfile& prof :
       {CalabiProfile::ricci_flat(t, 1.0), CalabiProfile::compactifiable_default(t)}) {
    for (int k = 0; k < 10; ++k) {
      const KNPoint pt = random_point(rng, 1e-1, 1e1);
      const CVec a = rng.cgauss_vec(2).normalized(), b = rng.cgauss_vec(2).normalized(),
                 c = rng.cgauss_vec(2).normalized();
      CHECK(closedness_residual(prof, pt, a, b, c) < 1e-5);
    }
  }
}

TEST_CASE("profile validation: monotone, positive w with a Cauchy tail") {
  const double t = 2.0;
  const auto flat = validate_profile(CalabiProfile::ricci_flat(t, 1.0));
  CHECK(flat.u_positive);
  CHECK(flat.du_positive);
  CHECK(flat.ok);

  const auto comp = validate_profile(CalabiProfile::compactifiable_default(t));
  CHECK(comp.ok);
  CHECK(comp.w_positive);
  CHECK(comp.w_infimum > 0.2);
  CHECK(comp.w_cauchy_tail < 1e-6);

  // w(x) = (1+x)^{-2} exactly for the default profile.
  const CalabiProfile prof = CalabiProfile::compactifiable_default(t);
  for (double x : {1e-6, 1e-3, 0.1, 1.0}) {
    CHECK(prof.du(1.0 / x) / (x * x) == doctest::Approx(1.0 / ((1 + x) * (1 + x))).epsilon(1e-12));
  }
}

TEST_CASE("lifted moment map: zero section, Hamiltonian pairing, limit value") {
  Rng rng(75);
  const double t = measure_ke_constant(rng);
  const CalabiProfile prof = CalabiProfile::compactifiable_default(t);
  const KNGeometry geo(prof);

  KNPoint pt0;
  pt0.z = Cx(0.7, 0.2);
  pt0.xi = 0.0;
  CHECK(moment_map_K(prof, pt0) ==
        doctest::Approx(prof.u(0.0) * base_moment(pt0.z)).epsilon(1e-14));

  // d mu' = omega_u(., X) by central differences.
  const double h = 1e-6;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const KNPoint pt = random_point(rng);
    const GeoPoint p = KNGeometry::lift(pt);
    const CVec v = rng.cgauss_vec(2).normalized();
    const GeoPoint pp = geo.displace(p, (h * v).eval());
    const GeoPoint pm = geo.displace(p, (-h * v).eval());
    const double dmu = (geo.moment(pp)[0] - geo.moment(pm)[0]) / (2 * h);
    const double pairing = geo.omega(p, v, geo.flows(p).col(0));
    worst = std::max(worst, std::abs(dmu - pairing));
    // Analytic rows agree with the finite difference too.
    const Cx gamma_z = geo.moment_rows(p)(0, 0);
    const Cx gamma_xi = geo.moment_rows(p)(0, 1);
    const double analytic =
        2.0 * std::real(std::conj(gamma_z) * v[0] + std::conj(gamma_xi) * v[1]);
    CHECK(std::abs(analytic - dmu) < 1e-6);
  }
  CHECK(worst < 1e-5);

  // r^2 -> infinity at fixed z: mu' approaches u_inf times the base moment.
  const Cx z(1.3, -0.4);
  const double q = 1.0 + std::norm(z);
  KNPoint far;
  far.z = z;
  far.xi = std::sqrt(1e6) / q;
  CHECK(std::abs(moment_map_K(prof, far) - *prof.u_inf * base_moment(z)) < 1e-3);
}

TEST_CASE("sharpness scan: positive gap at the boundary, attained inside") {
  Rng rng(76);
  const double t = measure_ke_constant(rng);
  const CalabiProfile prof = CalabiProfile::compactifiable_default(t);

  Rng r1 = rng.split("sharp-boundary");
  const auto boundary = sharpness_scan(prof, 0.5, r1);
  CHECK(boundary.gap > 0.0);
  CHECK(boundary.nu_prime == doctest::Approx(1.0));

  Rng r2 = rng.split("sharp-interior");
  const auto interior = sharpness_scan(prof, 0.2, r2);
  CHECK(interior.gap <= 0.0);

  // Doubling u doubles both nu' and sup mu'.
  Rng r3 = rng.split("sharp-boundary");
  const auto doubled = sharpness_scan(prof.scaled(2.0), 0.5, r3);
  CHECK(std::abs(doubled.nu_prime - 2.0 * boundary.nu_prime) < 1e-12);
  CHECK(std::abs(doubled.sup_mu - 2.0 * boundary.sup_mu) < 1e-8);
  CHECK(std::abs(doubled.gap - 2.0 * boundary.gap) < 1e-8);
}

TEST_CASE("fibers of (mu', Im f) trace toward the divisor and reach D_nu") {
  Rng rng(77);
  const double t = measure_ke_constant(rng);
  const CalabiProfile prof = CalabiProfile::compactifiable_default(t);
  const KNGeometry geo(prof);

  KNPoint start;
  start.z = Cx(1.8, 0.3);  // base moment ~ 0.27
  start.xi = 0.35;
  const GeoPoint seed = KNGeometry::lift(start);
  const RVec nu_seed = geo.moment(seed);
  const FiberSpec spec{nu_seed, std::imag(*geo.potential_closed_form(seed))};

  TraceOptions opts;
  opts.steps = 1400;
  opts.h = 2e-2;
  FiberSample run = trace_fiber(geo, spec, seed, opts);
  // Pick the direction that goes toward the divisor; retry flipped if needed.
  if (geo.divisor_distance(run.points.back().p) > geo.divisor_distance(seed)) {
    TraceOptions flipped = opts;
    const FiberSample probe = trace_fiber(geo, spec, seed, TraceOptions{.steps = 1, .h = 2e-2});
    flipped.initial_direction = -probe.last_direction;
    run = trace_fiber(geo, spec, seed, flipped);
  }
  for (const auto& tp : run.points) {
    CHECK(tp.res_moment + tp.res_imf < 1e-8);
    CHECK(tp.res_omega < 1e-6);
    CHECK(tp.res_phase < 1e-6);
  }
  const auto probe = boundary_probe(geo, spec, run);
  CHECK(probe.inf_distance < 1e-3);

  // Sharpness regime: along any trace, the distance to the boundary level of
  // a polytope endpoint stays bounded below.
  RVec nu_vertex(1);
  nu_vertex << *prof.u_inf * 0.5;
  double inf_vertex = 1e300;
  for (const auto& tp : run.points) {
    const auto [dd, gap] = geo.boundary_gap(tp.p, nu_vertex);
    inf_vertex = std::min(inf_vertex, std::hypot(dd, gap));
  }
  CHECK(inf_vertex > 0.05);
}
