#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace slag {

using Cx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using IVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Cx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Configuration problems (bad scenario files, malformed inputs).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failures (Newton divergence, quadrature breakdown, ...).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fold an angle into (-pi, pi].
inline double wrap_angle(double a) {
  while (a <= -kPi) a += 2.0 * kPi;
  while (a > kPi) a -= 2.0 * kPi;
  return a;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Deterministic random stream. All randomness in the project flows through
/// one seeded root generator, split by task label so results do not depend on
/// evaluation order across tasks.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double gauss() {
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  Cx cgauss() { return {gauss(), gauss()}; }

  CVec cgauss_vec(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = cgauss();
    return v;
  }

  RVec gauss_vec(int n) {
    RVec v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss();
    return v;
  }

  /// Independent child stream identified by label.
  Rng split(std::string_view label) const {
    return Rng(fnv1a64(label, state_ ^ 0x5851f42d4c957f2dull));
  }

 private:
  std::uint64_t state_;
};

/// Real <-> complex tangent-vector packing: a chart vector v in C^d is the
/// real vector (Re v, Im v) in R^{2d}.
inline RVec real_embed(const CVec& v) {
  RVec r(2 * v.size());
  r.head(v.size()) = v.real();
  r.tail(v.size()) = v.imag();
  return r;
}

inline CVec cx_extract(const RVec& r) {
  const auto d = r.size() / 2;
  CVec v(d);
  v.real() = r.head(d);
  v.imag() = r.tail(d);
  return v;
}

}  // namespace slag
