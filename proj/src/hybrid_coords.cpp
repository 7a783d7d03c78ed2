#include "syz/hybrid_coords.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "syz/dual_complex.hpp"
#include "syz/errors.hpp"
#include "syz/expr.hpp"

namespace syz {

using cplx = std::complex<double>;

double wrap_angle(double a) {
  double r = std::fmod(a, 2.0 * M_PI);
  if (r < 0) r += 2.0 * M_PI;
  return r;
}

namespace {

ModelChart make_maximal_chart(int id, const std::string& model_id, const IndexSet& S, const std::vector<int>& m,
                              const std::vector<int>& nu, const std::vector<bool>& essential) {
  ModelChart c;
  c.id = id;
  c.model_id = model_id;
  c.kind = ChartKind::Maximal;
  c.S = S;
  c.m = m;
  c.nu = nu;
  c.essential = essential;
  return c;
}

}  // namespace

Model Model::from_file(const ModelFile& file) {
  Model model;
  model.file_ = file;
  const auto& d = file.degeneration;
  if (!d.components.empty()) {
    // kappa = min nu/m, used to normalize the volume section
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : d.components) best = std::min(best, static_cast<double>(c.nu) / c.m);
    model.kappa_ = best;
  }
  const std::string id = file.name.empty() ? to_string(file.type) : file.name;
  if (file.type == ModelType::LocalSnc) {
    IndexSet S = d.ids();
    IndexSet ess = essential_set(d);
    std::vector<bool> essential;
    for (int i : S) essential.push_back(std::binary_search(ess.begin(), ess.end(), i));
    ModelChart c = make_maximal_chart(0, id, S, file.m, file.nu, essential);
    Expr unit = Expr::parse(file.unit);
    const int N = c.N();
    for (int k = 1; k <= N; ++k) (void)k;
    c.unit = [unit, N](const Eigen::VectorXcd& z) {
      std::map<std::string, cplx> vars;
      for (int k = 0; k < N; ++k) vars["z" + std::to_string(k + 1)] = z(k);
      return unit.eval_complex(vars);
    };
    // fail early on unknown variables
    c.unit(Eigen::VectorXcd::Zero(N));
    model.charts_.push_back(c);
  } else if (file.type == ModelType::Hesse) {
    for (int k = 0; k < 3; ++k) {
      int a = k + 1, b = (k + 1) % 3 + 1;
      ModelChart c = make_maximal_chart(k, id, {a, b}, {1, 1}, {1, 1}, {true, true});
      c.hesse_index = k;
      c.unit = [](const Eigen::VectorXcd& z) { return hesse_unit(z(0), z(1)); };
      model.charts_.push_back(c);
    }
    for (int k = 0; k < 3; ++k) {
      int b = (k + 1) % 3 + 1;
      ModelChart c;
      c.id = 3 + k;
      c.model_id = id;
      c.kind = ChartKind::HesseEdge;
      c.S = {b};
      c.m = {1};
      c.nu = {1};
      c.essential = {true};
      c.hesse_index = b;
      model.charts_.push_back(c);
    }
  }
  return model;
}

Model Model::local_snc(int n, const std::vector<int>& m, const std::vector<int>& nu, const std::string& unit) {
  ModelFile f;
  f.name = "local_snc";
  f.type = ModelType::LocalSnc;
  f.m = m;
  f.nu = nu;
  f.unit = unit;
  f.degeneration = local_snc_degeneration(n, m, nu);
  return from_file(f);
}

Model Model::hesse() {
  ModelFile f;
  f.name = "hesse";
  f.type = ModelType::Hesse;
  f.degeneration = hesse_degeneration();
  f.m = {1, 1};
  f.nu = {1, 1};
  return from_file(f);
}

const ModelChart& Model::chart(int id) const {
  if (id < 0 || id >= static_cast<int>(charts_.size()))
    throw Error(ErrorKind::Domain, "hybrid_coords", "chart", "unknown chart id " + std::to_string(id));
  return charts_[static_cast<size_t>(id)];
}

int Model::chart_of_face(const IndexSet& J) const {
  for (const auto& c : charts_) {
    if (c.kind != ChartKind::Maximal) continue;
    IndexSet s = c.S;
    std::sort(s.begin(), s.end());
    if (s == J) return c.id;
  }
  return -1;
}

std::complex<double> Model::c0(int chart_id) const {
  const ModelChart& c = chart(chart_id);
  double prod_m = 1.0;
  for (int mk : c.m) prod_m *= mk;
  return c.unit(Eigen::VectorXcd::Zero(c.N())) / prod_m;
}

Eigen::VectorXcd Model::to_z(const HybridPoint& p) const {
  const ModelChart& c = chart(p.chart);
  if (c.kind != ChartKind::Maximal)
    throw Error(ErrorKind::Domain, "hybrid_coords", "to_z", "edge charts carry y and theta, not z");
  if (!(p.t > 0.0)) throw Error(ErrorKind::Domain, "hybrid_coords", "to_z", "t = 0: the radius-zero branch must be used");
  Eigen::VectorXcd z(c.N());
  for (int k = 0; k < c.N(); ++k) z(k) = std::polar(std::exp(-p.w(k) / (c.m[static_cast<size_t>(k)] * p.t)), p.th(k));
  return z;
}

HybridPoint Model::from_z(int chart_id, const Eigen::VectorXcd& z) const {
  const ModelChart& c = chart(chart_id);
  if (c.kind != ChartKind::Maximal || z.size() != c.N())
    throw Error(ErrorKind::Domain, "hybrid_coords", "from_z", "expected maximal-chart coordinates");
  double logf = 0.0;
  for (int k = 0; k < c.N(); ++k) logf += c.m[static_cast<size_t>(k)] * std::log(std::abs(z(k)));
  if (!(logf < 0.0)) throw Error(ErrorKind::Domain, "hybrid_coords", "from_z", "|f| must be < 1");
  HybridPoint p;
  p.chart = chart_id;
  p.t = -1.0 / logf;
  p.w.resize(c.N());
  p.th.resize(c.N());
  double rest = 0.0, theta = 0.0;
  for (int k = 0; k < c.N(); ++k) {
    p.th(k) = std::arg(z(k));
    theta += c.m[static_cast<size_t>(k)] * p.th(k);
    if (k > 0) {
      p.w(k) = c.m[static_cast<size_t>(k)] * std::log(std::abs(z(k))) / logf;
      rest += p.w(k);
    }
  }
  p.w(0) = 1.0 - rest;
  p.theta = wrap_angle(theta);
  return p;
}

bool Model::in_domain(const HybridPoint& p) const {
  const ModelChart& c = chart(p.chart);
  if (c.kind == ChartKind::HesseEdge) {
    if (p.residual.empty()) return false;
    double ay = std::abs(p.residual[0]);
    if (!(ay > 0.0 && ay < 1.0)) return false;
    if (p.t == 0.0) return true;
    cplx f = std::polar(std::exp(-1.0 / p.t), p.theta);
    return std::abs(hesse_small_root(p.residual[0], f)) < c.radius;
  }
  for (int k = 0; k < c.N(); ++k) {
    if (p.w(k) < -1e-15 || p.w(k) > 1.0 + 1e-15) return false;
    if (p.t > 0.0) {
      if (std::exp(-p.w(k) / (c.m[static_cast<size_t>(k)] * p.t)) >= c.radius) return false;
    } else if (p.w(k) == 0.0) {
      // on a lower stratum at radius zero the residual coordinate decides
      if (p.residual.empty() || std::abs(p.residual[0]) >= c.radius) return false;
    }
  }
  return true;
}

BasicFunctionRecord basic_functions(const Model& model, const HybridPoint& p) {
  if (!(p.t > 0.0)) throw Error(ErrorKind::Domain, "hybrid_coords", "basic_functions", "t = 0: the radius-zero branch must be used");
  const ModelChart& c = model.chart(p.chart);
  if (c.kind != ChartKind::Maximal) throw Error(ErrorKind::Domain, "hybrid_coords", "basic_functions", "maximal chart required");
  const int N = c.N();
  BasicFunctionRecord r;
  r.t = p.t;
  r.g = -1.0 / p.t;
  r.r.resize(N);
  r.s.resize(N);
  r.ti.resize(N);
  r.w = p.w;
  r.u.resize(N);
  r.v.resize(N);
  r.sigma.resize(N);
  const double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < N; ++k) {
    const double mk = c.m[static_cast<size_t>(k)];
    const double wk = p.w(k);
    r.s(k) = -wk / (mk * p.t);
    r.r(k) = std::exp(r.s(k));
    r.ti(k) = wk > 0.0 ? p.t / wk : inf;
    r.u(k) = eta(std::max(wk, 0.0));
    r.v(k) = r.ti(k) - r.u(k);
    r.sigma(k) = r.ti(k) * r.ti(k) + r.ti(k) * r.u(k) * r.u(k);
  }
  return r;
}

HybridPoint radius_zero_point(const Model& model, int chart_id, const Eigen::VectorXd& w, double theta,
                              const Eigen::VectorXd& th_rest) {
  const ModelChart& c = model.chart(chart_id);
  if (c.kind != ChartKind::Maximal || w.size() != c.N() || th_rest.size() != c.N() - 1)
    throw Error(ErrorKind::Domain, "hybrid_coords", "radius_zero_point", "dimension mismatch");
  HybridPoint p;
  p.chart = chart_id;
  p.t = 0.0;
  p.theta = wrap_angle(theta);
  p.w = w;
  p.th.resize(c.N());
  double rest = 0.0;
  for (int k = 1; k < c.N(); ++k) {
    p.th(k) = th_rest(k - 1);
    rest += c.m[static_cast<size_t>(k)] * th_rest(k - 1);
  }
  p.th(0) = (theta - rest) / c.m[0];
  return p;
}

HybridPoint from_radius_zero(const Model& model, const HybridPoint& p, double t) {
  const ModelChart& c = model.chart(p.chart);
  if (c.kind != ChartKind::Maximal) throw Error(ErrorKind::Domain, "hybrid_coords", "from_radius_zero", "maximal chart required");
  if (!(t > 0.0)) throw Error(ErrorKind::Range, "hybrid_coords", "from_radius_zero", "target t must be positive");
  HybridPoint q = p;
  q.t = t;
  q.residual.clear();
  for (int k = 0; k < c.N(); ++k) {
    double r = std::exp(-p.w(k) / (c.m[static_cast<size_t>(k)] * t));
    if (r >= c.radius)
      throw Error(ErrorKind::ChartBoundary, "hybrid_coords", "from_radius_zero",
                  "r_" + std::to_string(c.S[static_cast<size_t>(k)]) + " = " + std::to_string(r) +
                      " leaves the chart polydisk (radius " + std::to_string(c.radius) + ")");
  }
  return q;
}

cplx hesse_xa(cplx za, cplx zb) {
  // x = za (x^3 + zb^3 + 1); Newton from the first-order guess
  const cplx zb3 = zb * zb * zb;
  cplx x = za * (1.0 + zb3);
  for (int it = 0; it < 60; ++it) {
    cplx g = x - za * (x * x * x + zb3 + 1.0);
    cplx dg = 1.0 - 3.0 * za * x * x;
    cplx step = g / dg;
    x -= step;
    if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

cplx hesse_small_root(cplx y, cplx f) {
  // f x^3 - y x + f (y^3 + 1) = 0, root near f (y^3 + 1)/y
  if (f == 0.0) return 0.0;
  const cplx c0 = f * (y * y * y + 1.0);
  cplx x = c0 / y;
  for (int it = 0; it < 60; ++it) {
    cplx F = f * x * x * x - y * x + c0;
    cplx dF = 3.0 * f * x * x - y;
    cplx step = F / dF;
    x -= step;
    if (std::abs(step) <= 1e-17 * std::max(std::abs(x), 1e-300)) break;
  }
  return x;
}

cplx hesse_unit(cplx za, cplx zb) {
  cplx xa = hesse_xa(za, zb);
  cplx xa3 = xa * xa * xa;
  cplx P = xa3 + zb * zb * zb + 1.0;
  return P / (P - 3.0 * xa3);
}

HybridPoint hesse_chart_transition(const Model& model, const HybridPoint& p) {
  const ModelChart& c = model.chart(p.chart);
  auto outside = [](const std::string& why) {
    throw Error(ErrorKind::Domain, "hybrid_coords", "hesse_chart_transition", "point outside overlap: " + why);
  };
  if (model.type() != ModelType::Hesse || c.kind != ChartKind::Maximal)
    throw Error(ErrorKind::Domain, "hybrid_coords", "hesse_chart_transition", "expects a Hesse vertex-chart point");
  if (!(p.w(0) < 1.0 / 3.0)) outside("w_a >= 1/3");
  cplx y;
  if (p.t > 0.0) {
    Eigen::VectorXcd z = model.to_z(p);
    if (std::abs(z(1)) >= c.radius) outside("|x_b| beyond the chart radius");
    y = hesse_xa(z(0), z(1));
  } else {
    if (p.w(0) != 0.0 || p.residual.empty()) outside("radius-zero point must lie on the stratum with a residual z_a");
    y = hesse_xa(p.residual[0], 0.0);
  }
  if (!(std::abs(y) > 0.0 && std::abs(y) < 1.0)) outside("stratum coordinate |y| must lie in (0,1)");
  HybridPoint q;
  q.chart = 3 + c.hesse_index;
  q.t = p.t;
  q.theta = p.theta;
  q.w = Eigen::VectorXd::Ones(1);
  q.th = Eigen::VectorXd::Constant(1, p.theta);
  q.residual = {y};
  return q;
}

HybridPoint hesse_chart_transition_inverse(const Model& model, const HybridPoint& q) {
  const ModelChart& e = model.chart(q.chart);
  if (model.type() != ModelType::Hesse || e.kind != ChartKind::HesseEdge || q.residual.empty())
    throw Error(ErrorKind::Domain, "hybrid_coords", "hesse_chart_transition", "expects a Hesse edge-chart point");
  const int k = q.chart - 3;
  const cplx y = q.residual[0];
  if (q.t > 0.0) {
    cplx f = std::polar(std::exp(-1.0 / q.t), q.theta);
    cplx xb = hesse_small_root(y, f);
    cplx P = y * y * y + xb * xb * xb + 1.0;
    Eigen::VectorXcd z(2);
    z << y / P, xb;
    HybridPoint p = model.from_z(k, z);
    // keep the total angle of the edge point rather than its recomputation
    p.theta = q.theta;
    p.th(1) = q.theta - p.th(0);
    return p;
  }
  cplx za = y / (y * y * y + 1.0);
  HybridPoint p;
  p.chart = k;
  p.t = 0.0;
  p.theta = q.theta;
  p.w = Eigen::Vector2d(0.0, 1.0);
  p.th = Eigen::Vector2d(std::arg(za), q.theta - std::arg(za));
  p.residual = {za};
  return p;
}

double hesse_p_coordinate(const Model& model, const HybridPoint& q) {
  const ModelChart& e = model.chart(q.chart);
  if (e.kind != ChartKind::HesseEdge || q.residual.empty())
    throw Error(ErrorKind::Domain, "hybrid_coords", "hesse_p_coordinate", "expects an edge-chart point");
  return -1.0 / (1.0 * std::log(std::abs(q.residual[0])));
}

}  // namespace syz
