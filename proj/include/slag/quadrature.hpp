#pragma once

#include "slag/core.hpp"

#include <functional>
#include <vector>

namespace slag {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  RVec nodes;
  RVec weights;
};

/// Nodes by Newton iteration on the Legendre polynomial; cached per order.
const GaussRule& gauss_legendre(int order);

/// Integrate a complex-valued function over [0,1] with a fixed-order rule.
template <class F>
Cx gl_integrate01(F&& f, int order) {
  const GaussRule& r = gauss_legendre(order);
  Cx acc = 0.0;
  for (int i = 0; i < r.nodes.size(); ++i) {
    const double x = 0.5 * (r.nodes[i] + 1.0);
    acc += r.weights[i] * f(x);
  }
  return 0.5 * acc;
}

/// Adaptive panel integration over [0,1]: a panel is accepted when the
/// order-8 and order-16 values agree to `tol`, otherwise it is bisected.
Cx adaptive_integrate01(const std::function<Cx(double)>& f, double tol = 1e-10,
                        int max_depth = 12);

}  // namespace slag
