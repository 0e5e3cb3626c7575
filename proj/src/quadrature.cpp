#include "slag/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace slag {

static GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

const GaussRule& gauss_legendre(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

static Cx adaptive_panel(const std::function<Cx(double)>& f, double a, double b, double tol,
                         int depth, int max_depth) {
  auto seg = [&](double x) { return f(a + (b - a) * x); };
  const Cx coarse = (b - a) * gl_integrate01(seg, 8);
  const Cx fine = (b - a) * gl_integrate01(seg, 16);
  if (std::abs(fine - coarse) < tol * (1.0 + std::abs(fine)) || depth >= max_depth) {
    if (depth >= max_depth && std::abs(fine - coarse) > 1e3 * tol * (1.0 + std::abs(fine)))
      throw SolverError("quadrature non-convergence");
    return fine;
  }
  const double m = 0.5 * (a + b);
  return adaptive_panel(f, a, m, tol, depth + 1, max_depth) +
         adaptive_panel(f, m, b, tol, depth + 1, max_depth);
}

Cx adaptive_integrate01(const std::function<Cx(double)>& f, double tol, int max_depth) {
  return adaptive_panel(f, 0.0, 1.0, tol, 0, max_depth);
}

}  // namespace slag
