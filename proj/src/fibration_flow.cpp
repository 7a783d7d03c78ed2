#include "syz/fibration_flow.hpp"

#include <algorithm>
#include <cmath>

#include "syz/errors.hpp"
#include "syz/transfer.hpp"

namespace syz {

namespace {

bool inside(const ModelChart& c, const HybridPoint& p) {
  for (int k = 0; k < c.N(); ++k) {
    if (!(p.w(k) > 0.0 && p.w(k) < 1.0)) return false;
    if (p.t > 0.0 && std::exp(-p.w(k) / (c.m[static_cast<size_t>(k)] * p.t)) >= c.radius) return false;
  }
  return true;
}

}  // namespace

BasePoint fibration_map(const Model& model, const ExpandedSkeleton& E, const HybridPoint& p) {
  const ModelChart& c = model.chart(p.chart);
  auto uncovered = [](const std::string& why) {
    throw Error(ErrorKind::Domain, "fibration_flow", "fibration_map", "point outside covered region: " + why);
  };
  auto submaximal = [&](const IndexSet& face, const Eigen::VectorXd& v, double reeb, double glue) {
    auto cells = E.cells_of_submaximal(face);
    if (cells.empty()) uncovered("no submaximal cell for the stratum");
    BasePoint b;
    b.cell = cells.front();
    const IvyGraph& g = E.ivies.at(face);
    for (int id : cells) {
      const auto& edge = g.edges[static_cast<size_t>(E.cells[static_cast<size_t>(id)].ivy_edge)];
      if (reeb >= edge.lo && reeb <= edge.hi) b.cell = id;
    }
    b.v = v;
    b.p = reeb;
    b.glue_p = glue;
    return b;
  };

  if (c.kind == ChartKind::HesseEdge) {
    if (p.residual.empty()) uncovered("edge chart point without a stratum coordinate");
    const double y = std::abs(p.residual[0]);
    return submaximal(c.S, Eigen::VectorXd::Constant(1, -eta(1.0)), y, hesse_p_coordinate(model, p));
  }

  IndexSet zero;
  for (int k = 0; k < c.N(); ++k)
    if (!(p.w(k) > 0.0)) zero.push_back(k);
  if (zero.empty()) {
    IndexSet J = c.S;
    std::sort(J.begin(), J.end());
    const int cell = E.cell_of_maximal(J);
    if (cell < 0) uncovered("maximal face not in the skeleton");
    // rounded coordinates, ordered as the sorted face
    BasePoint b;
    b.cell = cell;
    b.v.resize(c.N());
    for (int a = 0; a < c.N(); ++a) {
      const int k = static_cast<int>(std::find(c.S.begin(), c.S.end(), J[static_cast<size_t>(a)]) - c.S.begin());
      b.v(a) = -eta(p.w(k));
    }
    return b;
  }
  if (zero.size() > 1 || p.t > 0.0 || p.residual.empty()) uncovered("lower stratum");
  const int k0 = zero.front();
  IndexSet I;
  for (int k = 0; k < c.N(); ++k)
    if (k != k0) I.push_back(c.S[static_cast<size_t>(k)]);
  std::vector<std::pair<int, int>> order;
  for (int k = 0; k < c.N(); ++k)
    if (k != k0) order.push_back({c.S[static_cast<size_t>(k)], k});
  std::sort(order.begin(), order.end());
  std::sort(I.begin(), I.end());
  Eigen::VectorXd v(static_cast<Eigen::Index>(I.size()));
  for (size_t a = 0; a < order.size(); ++a) v(static_cast<Eigen::Index>(a)) = -eta(p.w(order[a].second));
  const double r = std::abs(p.residual[0]);
  return submaximal(I, v, r, -1.0 / (c.m[static_cast<size_t>(k0)] * std::log(r)));
}

Lift symplectic_lift(const Model& model, const HybridPoint& p, const FormParams& fp, double dt, double dtheta,
                     double max_condition) {
  const ModelChart& c = model.chart(p.chart);
  const Eigen::MatrixXd W = omega_q(model, p, fp).matrix;
  const Eigen::MatrixXd B = fiber_basis(c);
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(hybrid_dim(c));
  v0(hybrid_t_index()) = dt;
  v0(hybrid_th_index(c, 0)) = dtheta / c.m[0];
  const Eigen::MatrixXd A = B.transpose() * W * B;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  Lift out;
  out.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(out.condition <= max_condition))
    throw Error(ErrorKind::DegenerateForm, "fibration_flow", "symplectic_lift",
                "fiberwise form is degenerate (condition number above threshold)");
  const Eigen::VectorXd x = A.partialPivLu().solve(-B.transpose() * W * v0);
  out.v = v0 + B * x;
  return out;
}

Eigen::VectorXd monodromy_field(const Model& model, const HybridPoint& p) {
  const ModelChart& c = model.chart(p.chart);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(hybrid_dim(c));
  double denom = 0.0;
  for (int k = 0; k < c.N(); ++k) denom += c.m[static_cast<size_t>(k)] * zeta(eta(p.w(k)));
  for (int k = 0; k < c.N(); ++k) v(hybrid_th_index(c, k)) = zeta(eta(p.w(k))) / denom;
  return v;
}

int TorusFiber::index(const std::vector<int>& lat) const {
  int idx = 0;
  for (int a = 0; a < n; ++a) idx = idx * resolution + ((lat[static_cast<size_t>(a)] % resolution) + resolution) % resolution;
  return idx;
}

std::vector<int> TorusFiber::lattice(int idx) const {
  std::vector<int> lat(static_cast<size_t>(n));
  for (int a = n - 1; a >= 0; --a) {
    lat[static_cast<size_t>(a)] = idx % resolution;
    idx /= resolution;
  }
  return lat;
}

TorusFiber radius_zero_torus(const Model& model, int chart, const Eigen::VectorXd& w, double theta, int resolution) {
  const ModelChart& c = model.chart(chart);
  if (resolution < 1) throw Error(ErrorKind::Range, "fibration_flow", "torus", "resolution must be positive");
  TorusFiber F;
  F.chart = chart;
  F.w0 = w;
  F.theta0 = theta;
  F.resolution = resolution;
  F.n = c.N() - 1;
  int count = 1;
  for (int a = 0; a < F.n; ++a) count *= resolution;
  for (int i = 0; i < count; ++i) {
    auto lat = F.lattice(i);
    Eigen::VectorXd th(F.n);
    for (int a = 0; a < F.n; ++a) th(a) = 2.0 * M_PI * lat[static_cast<size_t>(a)] / resolution;
    F.samples.push_back(radius_zero_point(model, chart, w, theta, th));
  }
  return F;
}

TorusFiber transport(const Model& model, const TorusFiber& fiber, const AdmissiblePath& path, double h_target,
                     const TransportOptions& opt) {
  if (h_target < 0.0) throw Error(ErrorKind::Range, "fibration_flow", "transport", "h_target must be >= 0");
  if (opt.steps < 1) throw Error(ErrorKind::Range, "fibration_flow", "transport", "steps must be positive");
  TorusFiber out = fiber;
  if (h_target == 0.0) return out;
  const ModelChart& c = model.chart(fiber.chart);
  const double t_end = path.t(h_target);
  const double dt = t_end / opt.steps;

  // path data at every RK4 stage time, shared by all samples
  const double q_fixed = path.q(h_target);
  auto stage = [&](double t) {
    const double h = path.h_of_t(t, std::max(1.0, 2.0 * h_target));
    FormParams fp{opt.eps, opt.mode == QMode::Fixed ? q_fixed : path.q(h)};
    double dtheta = 0.0;
    if (path.has_theta() && h > 0.0) dtheta = path.dtheta_dh(h) / path.dt_dh(h);
    return std::tuple{h, fp, dtheta};
  };
  std::vector<std::tuple<double, FormParams, double>> stages;
  for (int s = 0; s < opt.steps; ++s) {
    const double t0 = s * dt;
    stages.push_back(stage(t0));
    stages.push_back(stage(t0 + 0.5 * dt));
    stages.push_back(stage(t0 + dt));
  }

  out.trajectories.clear();
  for (auto& sample : out.samples) {
    Trajectory traj;
    traj.step = dt;
    HybridPoint x = sample;
    x.t = 0.0;
    if (opt.record) traj.states.push_back({0.0, x});
    auto F = [&](const HybridPoint& y, const std::tuple<double, FormParams, double>& st) {
      return symplectic_lift(model, y, std::get<1>(st), 1.0, std::get<2>(st)).v;
    };
    for (int s = 0; s < opt.steps; ++s) {
      const auto& s0 = stages[static_cast<size_t>(3 * s)];
      const auto& sh = stages[static_cast<size_t>(3 * s + 1)];
      const auto& s1 = stages[static_cast<size_t>(3 * s + 2)];
      HybridPoint next;
      try {
        const Eigen::VectorXd k1 = F(x, s0);
        const HybridPoint x2 = hybrid_shift(c, x, 0.5 * dt * k1);
        if (!inside(c, x2)) throw Error(ErrorKind::ChartBoundary, "fibration_flow", "transport", "stage left the chart");
        const Eigen::VectorXd k2 = F(x2, sh);
        const HybridPoint x3 = hybrid_shift(c, x, 0.5 * dt * k2);
        if (!inside(c, x3)) throw Error(ErrorKind::ChartBoundary, "fibration_flow", "transport", "stage left the chart");
        const Eigen::VectorXd k3 = F(x3, sh);
        const HybridPoint x4 = hybrid_shift(c, x, dt * k3);
        if (!inside(c, x4)) throw Error(ErrorKind::ChartBoundary, "fibration_flow", "transport", "stage left the chart");
        const Eigen::VectorXd k4 = F(x4, s1);
        next = hybrid_shift(c, x, dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
        next.t = (s + 1) * dt;  // t is the integration variable
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ChartBoundary) throw;
        traj.escaped = true;
        break;
      }
      if (!inside(c, next)) {
        traj.escaped = true;
        break;
      }
      for (int k = 0; k < next.w.size(); ++k)
        if (!std::isfinite(next.w(k)))
          throw Error(ErrorKind::Integrator, "fibration_flow", "transport", "integrator blow-up");
      x = next;
      if (opt.record) traj.states.push_back({std::get<0>(s1), x});
    }
    out.escaped = out.escaped || traj.escaped;
    sample = x;
    if (opt.record) out.trajectories.push_back(std::move(traj));
  }
  out.h = h_target;
  out.t = t_end;
  out.q = opt.mode == QMode::Fixed ? q_fixed : path.q(h_target);
  return out;
}

Eigen::VectorXd lattice_tangent(const ModelChart& c, const TorusFiber& fiber, int sample, int direction) {
  auto lat = fiber.lattice(sample);
  auto plus = lat, minus = lat;
  plus[static_cast<size_t>(direction)] += 1;
  minus[static_cast<size_t>(direction)] -= 1;
  const HybridPoint& a = fiber.samples[static_cast<size_t>(fiber.index(plus))];
  const HybridPoint& b = fiber.samples[static_cast<size_t>(fiber.index(minus))];
  const double step = 2.0 * (2.0 * M_PI / fiber.resolution);
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(hybrid_dim(c));
  tau(hybrid_t_index()) = (a.t - b.t) / step;
  for (int j = 1; j < c.N(); ++j) tau(hybrid_w_index(j)) = (a.w(j) - b.w(j)) / step;
  for (int k = 0; k < c.N(); ++k)
    tau(hybrid_th_index(c, k)) = std::remainder(a.th(k) - b.th(k), 2.0 * M_PI) / step;
  return tau;
}

double lagrangian_residual(const Model& model, const TorusFiber& fiber, const FormParams& fp) {
  if (fiber.resolution < 8)
    throw Error(ErrorKind::Range, "fibration_flow", "lagrangian_residual", "grid too coarse: fewer than 8 samples per circle");
  const ModelChart& c = model.chart(fiber.chart);
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(fiber.samples.size()); ++i) {
    if (fiber.n < 2) break;
    const Eigen::MatrixXd W = omega_q(model, fiber.samples[static_cast<size_t>(i)], fp).matrix;
    std::vector<Eigen::VectorXd> tau;
    for (int a = 0; a < fiber.n; ++a) tau.push_back(lattice_tangent(c, fiber, i, a));
    for (int a = 0; a < fiber.n; ++a)
      for (int b = a + 1; b < fiber.n; ++b)
        worst = std::max(worst, std::abs(tau[static_cast<size_t>(a)].dot(W * tau[static_cast<size_t>(b)])));
  }
  return worst;
}

}  // namespace syz
