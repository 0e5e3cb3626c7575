#include "slag/torus.hpp"

#include "slag/intlattice.hpp"

#include <algorithm>
#include <cmath>

namespace slag {

WeightMatrix::WeightMatrix(IMat w) : W(std::move(w)) {
  for (int j = 0; j < W.rows(); ++j)
    if (W.row(j).isZero()) throw ConfigError("weight matrix has an all-zero row");
}

WeightMatrix WeightMatrix::trivial(int coords) {
  WeightMatrix w;
  w.W.resize(0, coords);
  return w;
}

WeightMatrix WeightMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  if (rows.empty()) throw ConfigError("empty weight matrix");
  IMat w(rows.size(), rows[0].size());
  for (size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != rows[0].size()) throw ConfigError("ragged weight matrix");
    for (size_t k = 0; k < rows[j].size(); ++k) w(j, k) = rows[j][k];
  }
  return WeightMatrix(w);
}

CVec apply_torus(const WeightMatrix& W, const RVec& theta, const CVec& z) {
  if (theta.size() != W.rank() || z.size() != W.coords())
    throw ConfigError("apply_torus: dimension mismatch");
  CVec out(z.size());
  for (int k = 0; k < z.size(); ++k) {
    double phase = 0.0;
    for (int j = 0; j < W.rank(); ++j) phase += theta[j] * static_cast<double>(W.W(j, k));
    out[k] = z[k] * std::polar(1.0, phase);
  }
  return out;
}

CVec flow_field(const WeightMatrix& W, int j, const AmbientPoint& p) {
  if (j < 0 || j >= W.rank()) throw ConfigError("flow_field: circle index out of range");
  const int c = p.chart;
  const int n = static_cast<int>(p.z.size()) - 1;
  CVec v(n);
  int k = 0;
  for (int i = 0; i <= n; ++i) {
    if (i == c) continue;
    v[k++] = kI * static_cast<double>(W.W(j, i) - W.W(j, c)) * p.z[i];
  }
  return v;
}

CMat flow_frame(const WeightMatrix& W, const AmbientPoint& p) {
  CMat X(p.z.size() - 1, W.rank());
  for (int j = 0; j < W.rank(); ++j) X.col(j) = flow_field(W, j, p);
  return X;
}

RVec moment_map(const WeightMatrix& W, const AmbientPoint& p) {
  const double den = p.z.squaredNorm();
  RVec mu(W.rank());
  for (int j = 0; j < W.rank(); ++j) {
    double num = 0.0;
    for (int k = 0; k < p.z.size(); ++k)
      num += static_cast<double>(W.W(j, k)) * std::norm(p.z[k]);
    mu[j] = num / den;
  }
  return mu;
}

CMat moment_gradients(const WeightMatrix& W, const AmbientPoint& p) {
  // In the chart (z_c == 1): mu_j = (w_jc + sum_i w_ji |u_i|^2) / (1 + sum |u_i|^2).
  const CVec u = affine(p);
  const int n = static_cast<int>(u.size());
  const double D = 1.0 + u.squaredNorm();
  CMat rows(W.rank(), n);
  const RVec mu = moment_map(W, p);
  for (int j = 0; j < W.rank(); ++j) {
    int k = 0;
    for (int i = 0; i < W.coords(); ++i) {
      if (i == p.chart) continue;
      const double wji = static_cast<double>(W.W(j, i));
      rows(j, k) = u[k] * (wji - mu[j]) / D;
      ++k;
    }
  }
  return rows;
}

double hamiltonian_residual(const WeightMatrix& W, const AmbientSpace& space,
                            const AmbientPoint& p, Rng& rng, int probes) {
  const CMat T = tangent_basis(space, p);
  const double h = 1e-5 * (1.0 + affine(p).norm());
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    CVec v = T * rng.cgauss_vec(static_cast<int>(T.cols()));
    const double vn = v.norm();
    if (vn < 1e-12) continue;
    v /= vn;
    CVec u = affine(p);
    const AmbientPoint pp = from_affine(u + h * v, p.chart);
    const AmbientPoint pm = from_affine(u - h * v, p.chart);
    const RVec mup = moment_map(W, pp);
    const RVec mum = moment_map(W, pm);
    for (int j = 0; j < W.rank(); ++j) {
      const double dmu = (mup[j] - mum[j]) / (2.0 * h);
      const double pairing = fs_omega(p, v, flow_field(W, j, p));
      worst = std::max(worst, std::abs(dmu - pairing));
    }
  }
  return worst;
}

namespace {

// Enumerate kernel combinations around the particular solution, minimizing
// (sum |a_i|, lexicographic).
struct BestSolution {
  bool found = false;
  IVec a;
  std::int64_t cost = 0;

  void offer(const IVec& cand) {
    std::int64_t c = 0;
    for (int i = 0; i < cand.size(); ++i) c = checked_add(c, std::abs(cand[i]));
    if (!found || c < cost) {
      found = true;
      cost = c;
      a = cand;
      return;
    }
    if (c == cost) {
      for (int i = 0; i < cand.size(); ++i) {
        if (cand[i] == a[i]) continue;
        if (cand[i] < a[i]) a = cand;
        break;
      }
    }
  }
};

void enumerate(const IVec& base, const IMat& kernel, int idx, std::int64_t bound, IVec& coef,
               BestSolution& best) {
  if (idx == kernel.cols()) {
    IVec cand = base;
    for (int j = 0; j < kernel.cols(); ++j)
      for (int i = 0; i < cand.size(); ++i)
        cand[i] = checked_add(cand[i], checked_mul(coef[j], kernel(i, j)));
    best.offer(cand);
    return;
  }
  for (std::int64_t t = -bound; t <= bound; ++t) {
    coef[idx] = t;
    enumerate(base, kernel, idx + 1, bound, coef, best);
  }
}

}  // namespace

InvariantRatio solve_invariant_ratio(const std::vector<IVec>& xi, const IVec& phi) {
  if (xi.empty()) throw ConfigError("solve_invariant_ratio: empty character list");
  const int r = static_cast<int>(xi[0].size());
  const int d = static_cast<int>(xi.size());
  IMat A(r, d);
  for (int i = 0; i < d; ++i) {
    if (xi[i].size() != r) throw ConfigError("character dimension mismatch");
    A.col(i) = xi[i];
  }
  auto sol = solve_integer(A, phi);
  if (!sol) throw SolverError("not in lattice");

  // Bound the search box: any candidate with cost <= cost(a0) differs from a0
  // by K t with ||K t||_inf <= 2 sum|a0|, so ||t||_inf <= ||K^+||_inf 2 sum|a0|.
  std::int64_t m0 = 0;
  for (int i = 0; i < d; ++i) m0 = checked_add(m0, std::abs(sol->particular[i]));
  std::int64_t bound = 2;
  if (sol->kernel.cols() > 0) {
    const RMat K = sol->kernel.cast<double>();
    const RMat Kpinv = K.completeOrthogonalDecomposition().pseudoInverse();
    const double pinv_inf = Kpinv.cwiseAbs().rowwise().sum().maxCoeff();
    bound = static_cast<std::int64_t>(std::ceil(1.01 * pinv_inf * 2.0 * m0)) + 2;
    const double total = std::pow(2.0 * bound + 1.0, sol->kernel.cols());
    if (total > 5e7) throw SolverError("invariant ratio search space too large");
  }

  BestSolution best;
  best.offer(sol->particular);
  if (sol->kernel.cols() > 0) {
    IVec coef = IVec::Zero(sol->kernel.cols());
    enumerate(sol->particular, sol->kernel, 0, bound, coef, best);
  }

  InvariantRatio out;
  out.a = best.a;
  for (int i = 0; i < d; ++i) {
    if (best.a[i] > 0) out.positive[i] = best.a[i];
    if (best.a[i] < 0) out.negative[i] = -best.a[i];
  }
  // Exact verification in integer arithmetic.
  IVec check = IVec::Zero(r);
  for (int i = 0; i < d; ++i)
    for (int row = 0; row < r; ++row)
      check[row] = checked_add(check[row], checked_mul(best.a[i], xi[i][row]));
  for (int row = 0; row < r; ++row)
    if (check[row] != phi[row]) throw SolverError("invariant ratio verification failed");
  return out;
}

StabilizerReport stabilizer_order(const WeightMatrix& W, bool projective) {
  IMat M;
  if (projective) {
    // Differences against the last coordinate: the action on projective
    // classes only sees w_{jk} - w_{jl}.
    const int n = W.coords() - 1;
    M.resize(W.rank(), n);
    for (int j = 0; j < W.rank(); ++j)
      for (int k = 0; k < n; ++k) M(j, k) = W.W(j, k) - W.W(j, n);
  } else {
    M = W.W;
  }
  const SmithResult s = smith_normal_form(M);
  StabilizerReport rep;
  if (s.rank < W.rank()) {
    rep.finite = false;
    rep.effective = false;
    return rep;
  }
  rep.finite = true;
  rep.order = 1;
  for (int i = 0; i < s.rank; ++i) rep.order = checked_mul(rep.order, s.divisors[i]);
  rep.effective = (rep.order == 1);
  return rep;
}

}  // namespace slag
