#include "syz/path.hpp"

#include <cmath>
#include <sstream>

#include "syz/errors.hpp"

namespace syz {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double at(const Expr& e, double h) { return e.eval({{"h", h}}); }

// One-sided limit at h = 0 for expressions such as h*log(h) that are not
// defined exactly at the origin.
double at_zero(const Expr& e) {
  const double v = at(e, 0.0);
  if (std::isfinite(v)) return v;
  return at(e, 1e-12);
}

}  // namespace

AdmissiblePath AdmissiblePath::parse(const std::string& spec) {
  AdmissiblePath p;
  p.spec_ = spec;
  bool have_radius = false, have_q = false;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parse, "fibration_flow", "path", "expected name=expression, got '" + item + "'");
    const std::string name = trim(item.substr(0, eq));
    Expr e = Expr::parse(trim(item.substr(eq + 1)));
    if (name == "t" || name == "r") {
      if (have_radius) throw Error(ErrorKind::Parse, "fibration_flow", "path", "give exactly one of t= or r=");
      have_radius = true;
      p.radius_form_ = (name == "r");
      p.radius_ = e;
    } else if (name == "q") {
      have_q = true;
      p.q_ = e;
    } else if (name == "theta") {
      p.theta_ = e;
    } else {
      throw Error(ErrorKind::Parse, "fibration_flow", "path", "unknown path component '" + name + "'");
    }
  }
  if (!have_radius) throw Error(ErrorKind::Parse, "fibration_flow", "path", "missing t= or r= component");
  if (!have_q) p.q_ = Expr::constant(1.0);
  p.dradius_ = p.radius_.diff("h");
  p.dq_ = p.q_.diff("h");
  p.ddq_ = p.dq_.diff("h");
  if (p.theta_) p.dtheta_ = p.theta_->diff("h");
  return p;
}

AdmissiblePath AdmissiblePath::constant_q(double q) {
  std::ostringstream os;
  os.precision(17);
  os << "t=h,q=" << q;
  return parse(os.str());
}

double AdmissiblePath::t(double h) const {
  if (!radius_form_) return at(radius_, h);
  if (h == 0.0) return 0.0;
  const double r = at(radius_, h);
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::Range, "fibration_flow", "path", "|f| outside (0,1) on the path");
  return -1.0 / std::log(r);
}

double AdmissiblePath::dt_dh(double h) const {
  if (!radius_form_) return at(dradius_, h);
  const double r = at(radius_, h);
  const double L = std::log(r);
  return at(dradius_, h) / (r * L * L);
}

double AdmissiblePath::q(double h) const { return at(q_, h); }

double AdmissiblePath::theta(double h) const { return theta_ ? at(*theta_, h) : 0.0; }

double AdmissiblePath::dtheta_dh(double h) const { return dtheta_ ? at(*dtheta_, h) : 0.0; }

double AdmissiblePath::h_of_t(double target, double h_max) const {
  if (target <= 0.0) return 0.0;
  double lo = 0.0, hi = h_max;
  if (t(hi) < target) throw Error(ErrorKind::Range, "fibration_flow", "path", "t beyond the path domain");
  for (int it = 0; it < 200 && hi - lo > 1e-17 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (t(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool AdmissiblePath::admissible() const {
  const double r0 = radius_form_ ? at_zero(radius_) : 0.0;
  const double t0 = radius_form_ ? 0.0 : at_zero(radius_);
  const double q0 = at_zero(q_);
  if (std::abs(r0) > 1e-12 || std::abs(t0) > 1e-12 || std::abs(q0) > 1e-12) return false;
  for (double h : {1e-6, 1e-4, 1e-2}) {
    if (!(t(h) > 0.0) || !(q(h) > 0.0)) return false;
  }
  return true;
}

bool AdmissiblePath::tame() const {
  if (!admissible()) return false;
  // q'(0) = 0 and q'' bounded near 0
  const double d0 = at_zero(dq_);
  if (!std::isfinite(d0) || std::abs(d0) > 1e-12) return false;
  for (double h : {1e-12, 1e-8, 1e-4}) {
    const double dd = at(ddq_, h);
    if (!std::isfinite(dd) || std::abs(dd) > 1e6) return false;
  }
  return true;
}

}  // namespace syz
