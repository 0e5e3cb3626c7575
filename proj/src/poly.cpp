#include "slag/poly.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace slag {

namespace {
std::vector<int> key_of(const Eigen::VectorXi& e) {
  return std::vector<int>(e.data(), e.data() + e.size());
}
}  // namespace

HomogeneousPoly::HomogeneousPoly(int degree, int nvars, std::vector<Term> terms)
    : degree_(degree), nvars_(nvars) {
  std::map<std::vector<int>, Cx> merged;
  for (const auto& t : terms) {
    if (t.expo.size() != nvars)
      throw ConfigError("polynomial term has wrong variable count");
    if (t.expo.sum() != degree)
      throw ConfigError("polynomial term degree mismatch");
    if ((t.expo.array() < 0).any())
      throw ConfigError("negative exponent");
    merged[key_of(t.expo)] += t.coeff;
  }
  for (auto& [k, c] : merged) {
    if (std::abs(c) == 0.0) continue;
    Term t;
    t.coeff = c;
    t.expo = Eigen::Map<const Eigen::VectorXi>(k.data(), static_cast<int>(k.size()));
    terms_.push_back(std::move(t));
  }
}

HomogeneousPoly HomogeneousPoly::monomial(Cx coeff, const Eigen::VectorXi& expo) {
  Term t{coeff, expo};
  return HomogeneousPoly(expo.sum(), static_cast<int>(expo.size()), {t});
}

HomogeneousPoly HomogeneousPoly::coordinate_product(int nvars) {
  Eigen::VectorXi e = Eigen::VectorXi::Ones(nvars);
  return monomial(1.0, e);
}

HomogeneousPoly HomogeneousPoly::coordinate_power(int nvars, int k, int degree) {
  Eigen::VectorXi e = Eigen::VectorXi::Zero(nvars);
  e[k] = degree;
  return monomial(1.0, e);
}

Cx HomogeneousPoly::eval(const CVec& z) const {
  if (z.size() != nvars_) throw ConfigError("eval_poly: dimension mismatch");
  Cx acc = 0.0;
  for (const auto& t : terms_) {
    Cx m = t.coeff;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < t.expo[i]; ++k) m *= z[i];
    acc += m;
  }
  return acc;
}

CVec HomogeneousPoly::gradient(const CVec& z) const {
  if (z.size() != nvars_) throw ConfigError("gradient: dimension mismatch");
  CVec g = CVec::Zero(nvars_);
  for (const auto& t : terms_) {
    for (int i = 0; i < nvars_; ++i) {
      if (t.expo[i] == 0) continue;
      Cx m = t.coeff * static_cast<double>(t.expo[i]);
      for (int j = 0; j < nvars_; ++j) {
        int e = t.expo[j] - (j == i ? 1 : 0);
        for (int k = 0; k < e; ++k) m *= z[j];
      }
      g[i] += m;
    }
  }
  return g;
}

IVec HomogeneousPoly::character(const IMat& W, bool* ok) const {
  if (ok) *ok = true;
  IVec chi = IVec::Zero(W.rows());
  if (terms_.empty()) return chi;
  for (int j = 0; j < W.rows(); ++j) {
    std::int64_t c = 0;
    for (int i = 0; i < nvars_; ++i) c += W(j, i) * terms_[0].expo[i];
    chi[j] = c;
  }
  for (const auto& t : terms_) {
    for (int j = 0; j < W.rows(); ++j) {
      std::int64_t c = 0;
      for (int i = 0; i < nvars_; ++i) c += W(j, i) * t.expo[i];
      if (c != chi[j] && ok) *ok = false;
    }
  }
  return chi;
}

HomogeneousPoly HomogeneousPoly::operator+(const HomogeneousPoly& other) const {
  if (degree_ != other.degree_ || nvars_ != other.nvars_)
    throw ConfigError("polynomial sum: degree/arity mismatch");
  std::vector<Term> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return HomogeneousPoly(degree_, nvars_, all);
}

HomogeneousPoly HomogeneousPoly::operator*(Cx scalar) const {
  std::vector<Term> all = terms_;
  for (auto& t : all) t.coeff *= scalar;
  return HomogeneousPoly(degree_, nvars_, all);
}

std::string HomogeneousPoly::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << t.coeff.real() << (t.coeff.imag() < 0 ? "" : "+") << t.coeff.imag() << "i)";
    for (int i = 0; i < nvars_; ++i)
      if (t.expo[i] > 0) {
        os << " z" << i;
        if (t.expo[i] > 1) os << "^" << t.expo[i];
      }
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace slag
