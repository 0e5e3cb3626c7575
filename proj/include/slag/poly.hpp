#pragma once

#include "slag/core.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace slag {

/// Homogeneous polynomial in n+1 variables, stored as a sparse term list.
/// Every exponent vector sums to `degree`; duplicate exponent vectors are
/// merged on construction.
class HomogeneousPoly {
 public:
  struct Term {
    Cx coeff;
    Eigen::VectorXi expo;
  };

  HomogeneousPoly() = default;
  HomogeneousPoly(int degree, int nvars, std::vector<Term> terms);

  static HomogeneousPoly monomial(Cx coeff, const Eigen::VectorXi& expo);
  /// prod_i z_i (degree = nvars).
  static HomogeneousPoly coordinate_product(int nvars);
  /// z_k^degree
  static HomogeneousPoly coordinate_power(int nvars, int k, int degree);

  int degree() const { return degree_; }
  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Cx eval(const CVec& z) const;
  /// Gradient with respect to the homogeneous coordinates.
  CVec gradient(const CVec& z) const;

  /// Character of the polynomial under the diagonal torus action with integer
  /// weight rows W (s x nvars): defined only when every term transforms the
  /// same way; reports failure through `ok`.
  IVec character(const IMat& W, bool* ok = nullptr) const;

  HomogeneousPoly operator+(const HomogeneousPoly& other) const;
  HomogeneousPoly operator*(Cx scalar) const;

  std::string to_string() const;

 private:
  int degree_ = 0;
  int nvars_ = 0;
  std::vector<Term> terms_;
};

inline HomogeneousPoly operator*(Cx scalar, const HomogeneousPoly& p) { return p * scalar; }

}  // namespace slag
