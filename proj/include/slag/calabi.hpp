#pragma once

#include "slag/core.hpp"
#include "slag/fibration.hpp"

#include <functional>
#include <optional>

namespace slag {

/// Radial profile u driving the ansatz metric on the canonical bundle of
/// CP^1: horizontal u(r^2) pi*(omega), vertical t^{-1} u'(r^2) on the fibers.
struct CalabiProfile {
  enum class Kind { RicciFlat, Compactifiable, Custom };
  Kind kind = Kind::RicciFlat;
  double t = 2.0;  // KE constant of the base (measured, not assumed)
  double l = 1.0;
  std::function<double(double)> u_fn;
  std::function<double(double)> du_fn;
  std::optional<double> u_inf;

  double u(double y) const;
  double du(double y) const;

  /// u(y) = (t y + l)^{1/2} — the Ricci-flat branch for a 1-dimensional base.
  static CalabiProfile ricci_flat(double t, double l);
  /// u(y) = 2 - 1/(1+y): u' = (1+y)^{-2}, w(x) = (1+x)^{-2}, u_inf = 2.
  static CalabiProfile compactifiable_default(double t);
  static CalabiProfile custom(double t, std::function<double(double)> u,
                              std::function<double(double)> du,
                              std::optional<double> u_inf = std::nullopt);

  CalabiProfile scaled(double factor) const;  // pointwise multiple of u
};

/// Point of K(CP^1) over the chart z, fiber coordinate xi in the dz
/// trivialization. The fiber norm comes from |xi dz|^2 = |xi|^2 (1+|z|^2)^2.
struct KNPoint {
  Cx z;
  Cx xi;
  double r2() const {
    const double q = 1.0 + std::norm(z);
    return std::norm(xi) * q * q;
  }
};

/// Measured Kahler-Einstein constant of (CP^1, omega_FS): the ratio of the
/// Ricci form to omega, by nested central differences.
double measure_ke_constant(Rng& rng, int samples = 5);

/// Hermitian matrix of the ansatz metric on the (z, xi) chart basis.
CMat calabi_hermitian(const CalabiProfile& p, const KNPoint& pt);

/// omega_u on total-space tangent vectors (vz, vxi).
double metric_eval(const CalabiProfile& p, const KNPoint& pt, const CVec& a, const CVec& b);
double calabi_metric_g(const CalabiProfile& p, const KNPoint& pt, const CVec& a, const CVec& b);

/// ||d/dbar log det h_u|| (Frobenius) by nested central differences.
double ricci_residual(const CalabiProfile& p, const KNPoint& pt, double h = 1e-3);

/// Same oracle against an arbitrary chart Hermitian metric (test hook).
double ricci_residual_general(const std::function<CMat(const KNPoint&)>& hermitian,
                              const KNPoint& pt, double h = 1e-3);

/// |d omega_u(a,b,c)| by central differences on constant extensions.
double closedness_residual(const CalabiProfile& p, const KNPoint& pt, const CVec& a,
                           const CVec& b, const CVec& c, double h = 1e-4);

/// Balanced base moment map: (|z|^2 - 1) / (2 (1+|z|^2)), range (-1/2, 1/2);
/// the additive constant is pinned by the canonical lift of the rotation.
double base_moment(Cx z);

/// mu' = u(r^2) * base_moment(z).
double moment_map_K(const CalabiProfile& p, const KNPoint& pt);

struct ProfileValidation {
  bool u_positive = false;
  bool du_positive = false;
  bool w_positive = false;       // compactifiable only
  double w_infimum = 0.0;
  double w_cauchy_tail = 0.0;    // max consecutive variation near x = 0
  bool ok = false;
};

ProfileValidation validate_profile(const CalabiProfile& p);

struct SharpnessReport {
  double nu = 0.0;
  double nu_prime = 0.0;
  double sup_mu = 0.0;  // over samples + local ascent
  double gap = 0.0;     // nu_prime - sup_mu
};

/// Scan sup mu' against nu' = u_inf nu. Boundary nu (+-1/2) leaves a strictly
/// positive gap; interior nu is attained (gap <= 0).
SharpnessReport sharpness_scan(const CalabiProfile& p, double nu, Rng& rng, int samples = 4000);

/// Fibration geometry of K(CP^1) with the ansatz metric: circle action
/// z -> e^{i theta} z with the canonical lift xi -> e^{-i theta} xi,
/// f = -i z xi (so sigma' = -i d(z xi)), divisor at r = infinity.
class KNGeometry : public FiberGeometry {
 public:
  explicit KNGeometry(CalabiProfile profile) : profile_(std::move(profile)) {}

  int chart_dim() const override { return 2; }
  int rank() const override { return 1; }

  RVec moment(const GeoPoint& p) const override;
  CMat moment_rows(const GeoPoint& p) const override;
  CMat flows(const GeoPoint& p) const override;
  Cx sigma1(const GeoPoint& p, const CVec& v) const override;
  CVec sigma1_coeffs(const GeoPoint& p) const override;
  double omega(const GeoPoint& p, const CVec& u, const CVec& v) const override;
  double metric(const GeoPoint& p, const CVec& u, const CVec& v) const override;
  GeoPoint displace(const GeoPoint& p, const CVec& dv) const override;
  std::optional<Cx> potential_closed_form(const GeoPoint& p) const override;
  double divisor_distance(const GeoPoint& p) const override;
  std::pair<double, double> boundary_gap(const GeoPoint& p, const RVec& nu) const override;

  static GeoPoint lift(const KNPoint& pt);
  static KNPoint drop(const GeoPoint& p);
  const CalabiProfile& profile() const { return profile_; }

 private:
  CalabiProfile profile_;
};

}  // namespace slag
