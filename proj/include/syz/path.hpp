#pragma once

// Admissible paths h -> (|z(h)|, theta(h), q(h)) written as comma-separated
// assignments in the variable h, for instance "t=h,q=h^2" or
// "r=h,q=h,theta=0.3". Exactly one of t (hybrid radius) or r (= |f|) must be
// given; q defaults to 1 and theta, when absent, keeps the fiber's own angle.

#include <optional>
#include <string>

#include "syz/expr.hpp"

namespace syz {

class AdmissiblePath {
 public:
  static AdmissiblePath parse(const std::string& spec);
  static AdmissiblePath constant_q(double q);  // t = h, q = const

  const std::string& spec() const { return spec_; }
  double t(double h) const;
  double dt_dh(double h) const;
  double q(double h) const;
  bool has_theta() const { return theta_.has_value(); }
  double theta(double h) const;
  double dtheta_dh(double h) const;
  // Inverse of the (increasing) map h -> t(h) on (0, h_max].
  double h_of_t(double t, double h_max = 1.0) const;

  // |z(0)| = q(0) = 0 with both positive for small h > 0.
  bool admissible() const;
  // q is C^2 at 0 with q'(0) = 0 (checked on the symbolic derivative).
  bool tame() const;

 private:
  std::string spec_;
  bool radius_form_ = false;  // r = |f| given instead of t
  Expr radius_;               // t(h) or r(h)
  Expr q_;
  std::optional<Expr> theta_;
  Expr dradius_, dq_, ddq_;
  std::optional<Expr> dtheta_;
};

}  // namespace syz
