#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "slag/fibration.hpp"

using namespace slag;

namespace {

ProjectiveFiberGeometry toric_p3_geometry() {
  const AmbientSpace P3 = AmbientSpace::projective(3);
  auto sigma = make_section(P3, HomogeneousPoly::coordinate_product(4));
  auto W = WeightMatrix::from_rows({{1, 0, -1, 0}, {0, 1, -1, 0}});
  return ProjectiveFiberGeometry(P3, W, sigma);
}

GeoPoint generic_seed(const ProjectiveFiberGeometry& geo, Rng& rng) {
  CVec z(4);
  for (int i = 0; i < 4; ++i)
    z[i] = std::polar(std::exp(0.25 * rng.gauss()), rng.uniform(-kPi, kPi));
  return geo.lift(normalize(z));
}

double chart_distance(const GeoPoint& a, const GeoPoint& b) {
  const AmbientPoint pb = in_chart(b.x, a.chart);
  return (a.x - pb.z).norm();
}

double anisotropy(const CVec& z) {
  double hi = 0.0, lo = 1e300;
  for (int i = 0; i < z.size(); ++i) {
    hi = std::max(hi, std::abs(z[i]));
    lo = std::min(lo, std::abs(z[i]));
  }
  return hi / lo;
}

}  // namespace

TEST_CASE("solve_fiber_point: fixed point, recovery, empty level") {
  const auto geo = toric_p3_geometry();
  Rng rng(21);

  for (int t = 0; t < 5; ++t) {
    const GeoPoint seed = generic_seed(geo, rng);
    const FiberSpec spec{geo.moment(seed), 0.0};

    // Already on the fiber: unchanged.
    const auto st = solve_fiber_point(geo, spec, seed);
    CHECK(st.iters == 0);
    CHECK((st.p.x - seed.x).norm() < 1e-12);

    // Perturb-and-recover within a few Newton steps.
    const CVec dv = 1e-2 * rng.cgauss_vec(3);
    const GeoPoint off = geo.displace(seed, dv);
    const Cx f_off = geo.potential_increment(seed, off);
    const auto rec = solve_fiber_point(geo, spec, off, f_off);
    CHECK(rec.iters <= 5);
    const RVec mu = geo.moment(rec.p);
    CHECK((mu - spec.nu).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(std::imag(rec.f)) < 1e-10);
  }

  // A moment level outside the polytope has an empty fiber.
  RVec big = RVec::Zero(2);
  double hi = 0.0;
  for (int t = 0; t < 200; ++t) {
    const GeoPoint q = generic_seed(geo, rng);
    hi = std::max(hi, geo.moment(q).cwiseAbs().maxCoeff());
  }
  big.setConstant(1.5 * hi);
  const GeoPoint seed = generic_seed(geo, rng);
  CHECK_THROWS_AS(solve_fiber_point(geo, {big, 0.0}, seed), SolverError);
}

TEST_CASE("regularity reports flows and kernel dimensions") {
  const auto geo = toric_p3_geometry();
  Rng rng(22);
  const GeoPoint p = generic_seed(geo, rng);
  const auto rep = regularity(geo, p);
  CHECK(rep.flows_independent);
  CHECK(rep.kernel_dim == 3);
  CHECK(rep.regular);

  // A coordinate point is fixed by part of the torus: flows degenerate.
  CVec z(4);
  z << Cx(1), Cx(0), Cx(0), Cx(1e-9);
  const auto rep2 = regularity(geo, geo.lift(in_chart(z, 0)));
  CHECK_FALSE(rep2.flows_independent);
  CHECK_FALSE(rep2.regular);
}

TEST_CASE("traced fibers hold the level set and the SLag conditions") {
  const auto geo = toric_p3_geometry();
  Rng rng(23);
  const GeoPoint seed = generic_seed(geo, rng);
  const FiberSpec spec{geo.moment(seed), 0.0};
  TraceOptions opts;
  opts.steps = 120;
  opts.h = 1e-3;
  opts.theta = 0.0;
  const FiberSample run = trace_fiber(geo, spec, seed, opts);
  REQUIRE(static_cast<int>(run.points.size()) == opts.steps + 1);
  for (const auto& tp : run.points) {
    CHECK(tp.res_moment + tp.res_imf < 1e-8);
    CHECK(tp.res_omega < 1e-6);
    CHECK(tp.res_phase < 1e-6);
  }

  // Deliberately wrong phase produces an order-one residual.
  const auto [w_ok, ph_ok] = slag_residual(geo, run.points[10].p, 0.0);
  const auto [w_bad, ph_bad] = slag_residual(geo, run.points[10].p, kPi / 2.0);
  CHECK(ph_ok < 1e-8);
  CHECK(ph_bad > 0.5);
  CHECK(w_ok == w_bad);
}

TEST_CASE("trace reverses back to the seed") {
  const auto geo = toric_p3_geometry();
  Rng rng(24);
  for (int t = 0; t < 3; ++t) {
    const GeoPoint seed = generic_seed(geo, rng);
    const FiberSpec spec{geo.moment(seed), 0.0};
    TraceOptions opts;
    opts.steps = 60;
    opts.h = 1e-3;
    const FiberSample fwd = trace_fiber(geo, spec, seed, opts);
    REQUIRE(static_cast<int>(fwd.points.size()) == opts.steps + 1);
    TraceOptions back = opts;
    back.initial_direction = -fwd.last_direction;
    const FiberSample rev = trace_fiber(geo, spec, fwd.points.back().p, back);
    REQUIRE(static_cast<int>(rev.points.size()) == opts.steps + 1);
    CHECK(chart_distance(rev.points.back().p, seed) < 1e-8);
  }
}

TEST_CASE("fibers are torus invariant") {
  const auto geo = toric_p3_geometry();
  Rng rng(25);
  const GeoPoint seed = generic_seed(geo, rng);
  const FiberSpec spec{geo.moment(seed), 0.0};
  const auto st = solve_fiber_point(geo, spec, seed);

  RVec theta(2);
  theta << rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4);
  const CVec moved = apply_torus(geo.weights(), theta, st.p.x);
  const GeoPoint q = geo.lift(normalize(moved));
  // The translated point satisfies the same moment level; Im f is unchanged
  // because sigma' annihilates the orbit path.
  CHECK((geo.moment(q) - spec.nu).cwiseAbs().maxCoeff() < 1e-12);
  Rng prng(1);
  const Cx df = potential_f(geo.contraction(), geo.drop(st.p), geo.drop(q), prng);
  CHECK(std::abs(std::imag(df)) < 1e-8);
}

TEST_CASE("long traces escape every compact set of the torus") {
  const auto geo = toric_p3_geometry();
  Rng rng(26);
  CVec z(4);
  z << Cx(1), Cx(0.9, 0.1), Cx(1.1, -0.2), Cx(0.95, 0.05);
  const GeoPoint seed = geo.lift(normalize(z));
  const FiberSpec spec{geo.moment(seed), 0.0};
  TraceOptions opts;
  opts.steps = 2500;
  opts.h = 5e-2;
  const FiberSample run = trace_fiber(geo, spec, seed, opts);
  double peak = 0.0;
  std::vector<double> ratio;
  for (const auto& tp : run.points) {
    ratio.push_back(anisotropy(tp.p.x));
    peak = std::max(peak, ratio.back());
  }
  CHECK(peak > 1e3);
  // Monotone growth over the was-past-threshold tail.
  size_t first = 0;
  while (first < ratio.size() && ratio[first] < 1e3) ++first;
  for (size_t i = first; i + 1 < ratio.size(); ++i) CHECK(ratio[i + 1] > ratio[i] * 0.98);

  // Divisor distance decreases monotonically over the tail of the trace.
  const auto probe = boundary_probe(geo, spec, run);
  const auto& dd = probe.divisor_distance;
  size_t tail = dd.size() > 40 ? dd.size() - 40 : 0;
  for (size_t i = tail; i + 1 < dd.size(); ++i) CHECK(dd[i + 1] < dd[i] * 1.02);
}
