#include <cmath>
#include <complex>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "syz/dual_complex.hpp"
#include "syz/errors.hpp"
#include "syz/expanded_skeleton.hpp"
#include "syz/fibration_flow.hpp"
#include "syz/kahler_family.hpp"
#include "syz/transfer.hpp"

using namespace syz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExpandedSkeleton expanded(const char* name) {
  const ModelFile mf = test::model_file(name);
  return build_expanded(build_skeleton(mf.degeneration, essential_set(mf.degeneration)), mf.ivies);
}

HybridPoint rz(const Model& m, const Eigen::VectorXd& w, double theta = 0.4) {
  Eigen::VectorXd rest(w.size() - 1);
  for (int k = 0; k < rest.size(); ++k) rest(k) = 1.1 * (k + 1);
  return radius_zero_point(m, 0, w, theta, rest);
}

// |f| recomputed from the chart coordinates, relative to exp(-1/t).
double f_rel_error(const Model& m, const HybridPoint& p, double t) {
  const ModelChart& c = m.chart(p.chart);
  const Eigen::VectorXcd z = m.to_z(p);
  double logf = 0.0;
  for (int k = 0; k < c.N(); ++k) logf += c.m[static_cast<size_t>(k)] * std::log(std::abs(z(k)));
  return std::abs(std::expm1(logf + 1.0 / t));
}

double constraint_error(const Model& m, const HybridPoint& p, double theta) {
  const ModelChart& c = m.chart(p.chart);
  double total = 0.0;
  for (int k = 0; k < c.N(); ++k) total += c.m[static_cast<size_t>(k)] * p.th(k);
  return std::abs(std::remainder(total - theta, 2.0 * M_PI));
}

// Hybrid-coordinate distance between two points of one chart, angles mod 2 pi.
double drift(const HybridPoint& a, const HybridPoint& b) {
  double d = (a.w - b.w).cwiseAbs().maxCoeff();
  for (int k = 0; k < a.th.size(); ++k) d = std::max(d, std::abs(std::remainder(a.th(k) - b.th(k), 2.0 * M_PI)));
  return d;
}

Eigen::VectorXcd dz(const Model& m, const HybridPoint& p, const Eigen::VectorXd& X, double h = 1e-7) {
  const ModelChart& c = m.chart(p.chart);
  return (m.to_z(hybrid_shift(c, p, h * X)) - m.to_z(hybrid_shift(c, p, -h * X))) / (2.0 * h);
}

}  // namespace

TEST_CASE("fibration map on a maximal cell at radius zero", "[fibration_flow]") {
  const Model m = test::model("local_snc_n1.json");
  const ExpandedSkeleton E = expanded("local_snc_n1.json");
  const BasePoint b = fibration_map(m, E, rz(m, Eigen::Vector2d(0.5, 0.5)));
  CHECK(b.cell == E.cell_of_maximal({1, 2}));
  REQUIRE(b.v.size() == 2);
  CHECK(b.v(0) == -eta(0.5));
  CHECK(b.v(1) == -eta(0.5));
  CHECK(std::isnan(b.p));
}

TEST_CASE("fibration map ignores the torus directions", "[fibration_flow][property]") {
  const Model m = test::model("local_snc_n2.json");
  const ExpandedSkeleton E = expanded("local_snc_n2.json");
  auto g = test::rng(31);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd w = test::interior_w(g, 3, 0.05);
    const Eigen::VectorXd a = test::angles(g, 4), b = test::angles(g, 4);
    const BasePoint pa = fibration_map(m, E, radius_zero_point(m, 0, w, a(0), a.tail(2)));
    const BasePoint pb = fibration_map(m, E, radius_zero_point(m, 0, w, b(0), b.tail(2)));
    REQUIRE(pa.cell == pb.cell);
    REQUIRE(pa.v == pb.v);
    // At positive radius the same holds for points sharing (t, w).
    const BasePoint qa = fibration_map(m, E, from_radius_zero(m, radius_zero_point(m, 0, w, a(0), a.tail(2)), 0.03));
    const BasePoint qb = fibration_map(m, E, from_radius_zero(m, radius_zero_point(m, 0, w, b(0), b.tail(2)), 0.03));
    REQUIRE(qa.v == qb.v);
  }
}

TEST_CASE("Hesse stratum point lands on a submaximal cell", "[fibration_flow]") {
  const Model m = test::model("hesse.json");
  const ExpandedSkeleton E = expanded("hesse.json");
  const ModelChart& c = m.chart(0);
  HybridPoint p;
  p.chart = 0;
  p.w = Eigen::Vector2d(0.0, 1.0);
  const std::complex<double> za = std::polar(std::exp(-3.0), 1.3);
  p.residual = {za};
  p.th = Eigen::Vector2d(std::arg(za), 0.5 - std::arg(za));
  p.theta = 0.5;
  const BasePoint b = fibration_map(m, E, p);
  const Cell& cell = E.cells.at(static_cast<size_t>(b.cell));
  CHECK(cell.kind == CellKind::Submaximal);
  CHECK(cell.face == IndexSet{c.S[1]});
  CHECK_THAT(b.p, WithinRel(std::exp(-3.0), 1e-15));
  CHECK_THAT(b.glue_p, WithinRel(1.0 / 3.0, 1e-15));
  CHECK(classify_base_point(E, b) == BaseClass::Interior);

  // The same point seen from the edge chart of that line.
  const BasePoint e = fibration_map(m, E, hesse_chart_transition(m, p));
  CHECK(E.cells.at(static_cast<size_t>(e.cell)).face == cell.face);
  CHECK_THAT(e.glue_p, WithinAbs(b.glue_p, 1e-4));
}

TEST_CASE("fibration map rejects uncovered points", "[fibration_flow]") {
  const Model m = test::model("local_snc_n2.json");
  const ExpandedSkeleton E = expanded("local_snc_n2.json");
  HybridPoint p = rz(m, Eigen::Vector3d(0.0, 0.0, 1.0));
  try {
    fibration_map(m, E, p);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("q = 1 lift at radius zero is the monodromy field", "[fibration_flow][property]") {
  for (const char* name : {"local_snc_n1.json", "local_snc_n2.json", "local_snc_mult.json", "hesse.json"}) {
    const Model m = test::model(name);
    const int N = m.chart(0).N();
    auto g = test::rng(32);
    for (int i = 0; i < 40; ++i) {
      const HybridPoint p = rz(m, test::interior_w(g, N, 0.05), test::angles(g, 1)(0));
      const Eigen::VectorXd v = symplectic_lift(m, p, {0.1, 1.0}, 0.0, 1.0).v;
      // closed form, written out against the hybrid layout
      Eigen::VectorXd ref = Eigen::VectorXd::Zero(2 * N);
      double denom = 0.0;
      for (int k = 0; k < N; ++k) denom += m.chart(0).m[static_cast<size_t>(k)] * zeta(eta(p.w(k)));
      for (int k = 0; k < N; ++k) ref(N + k) = zeta(eta(p.w(k))) / denom;
      REQUIRE((v - ref).cwiseAbs().maxCoeff() < 1e-10);
      REQUIRE((monodromy_field(m, p) - ref).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("q = 0 lift at radius zero solves the hand 2x2 system", "[fibration_flow]") {
  // n = 1, t = 0: omega_0 = -eps dw_2 ^ (m_2 dtheta_2 - m_1 dtheta_1). The angular
  // lift v = b1 d/dtheta_1 + a d/dw_2 + b e_2 with m_1 b1 = 1 forces a = 0 and
  // b = 1/(2 m_2), so v = d/dtheta_1 / (2 m_1) + d/dtheta_2 / (2 m_2).
  for (const char* name : {"local_snc_n1.json", "local_snc_mult.json"}) {
    const Model m = test::model(name);
    const ModelChart& c = m.chart(0);
    for (double w2 : {0.2, 0.35, 0.7}) {
      const HybridPoint p = rz(m, Eigen::Vector2d(1.0 - w2, w2));
      const Eigen::VectorXd v = symplectic_lift(m, p, {0.1, 0.0}, 0.0, 1.0).v;
      CHECK_THAT(v(0), WithinAbs(0.0, 1e-15));
      CHECK_THAT(v(1), WithinAbs(0.0, 1e-14));
      CHECK_THAT(v(2), WithinAbs(0.5 / c.m[0], 1e-14));
      CHECK_THAT(v(3), WithinAbs(0.5 / c.m[1], 1e-14));
      // the radial lift is d/dt itself
      const Eigen::VectorXd r = symplectic_lift(m, p, {0.1, 0.0}).v;
      CHECK((r - Eigen::Vector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("eps = 0 lift is euclidean-orthogonal to the fiber", "[fibration_flow]") {
  const Model m = test::model("local_snc_mult.json");
  const ModelChart& c = m.chart(0);
  const Eigen::MatrixXd B = fiber_basis(c);
  auto g = test::rng(33);
  for (int i = 0; i < 20; ++i) {
    const HybridPoint p = from_radius_zero(m, rz(m, test::interior_w(g, 2, 0.25)), 0.05 + 0.05 * i / 20.0);
    const Eigen::VectorXd v = symplectic_lift(m, p, {0.0, 0.5}).v;
    const Eigen::VectorXcd dv = dz(m, p, v);
    for (int a = 0; a < B.cols(); ++a) {
      const Eigen::VectorXcd du = dz(m, p, B.col(a));
      const double inner = std::real(dv.dot(du));  // conj(dv) . du
      REQUIRE(std::abs(inner) < 1e-6 * dv.norm() * du.norm());
    }
  }
}

TEST_CASE("lift reports a degenerate fiberwise form", "[fibration_flow]") {
  const Model m = test::model("local_snc_n1.json");
  const HybridPoint p = rz(m, Eigen::Vector2d(0.4, 0.6));
  try {
    symplectic_lift(m, p, {0.1, 1.0}, 1.0, 0.0, 1.0 - 1e-9);
    FAIL("expected a degenerate-form error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateForm);
  }
  CHECK_THROWS_AS(symplectic_lift(m, p, {0.0, 1.0}), Error);  // nothing on the fiber at t = 0
}

TEST_CASE("radius-zero torus samples", "[fibration_flow]") {
  const Model m = test::model("local_snc_n2.json");
  const Eigen::Vector3d w(0.2, 0.3, 0.5);
  const TorusFiber F = radius_zero_torus(m, 0, w, 0.9, 12);
  REQUIRE(F.n == 2);
  REQUIRE(F.samples.size() == 144);
  for (int i = 0; i < 144; ++i) {
    const HybridPoint& p = F.samples[static_cast<size_t>(i)];
    REQUIRE(p.w == F.samples[0].w);
    REQUIRE(constraint_error(m, p, 0.9) < 1e-12);
    REQUIRE(F.index(F.lattice(i)) == i);
  }
  CHECK(F.index({13, -1}) == F.index({1, 11}));
  CHECK_THROWS_AS(radius_zero_torus(m, 0, w, 0.9, 0), Error);
}

TEST_CASE("transport to h = 0 is the identity", "[fibration_flow]") {
  const Model m = test::model("local_snc_n2.json");
  const TorusFiber F = radius_zero_torus(m, 0, Eigen::Vector3d(0.3, 0.3, 0.4), 0.2, 8);
  const TorusFiber G = transport(m, F, AdmissiblePath::parse("t=h,q=h^2"), 0.0);
  REQUIRE(G.samples.size() == F.samples.size());
  for (size_t i = 0; i < F.samples.size(); ++i) {
    CHECK(G.samples[i].w == F.samples[i].w);
    CHECK(G.samples[i].th == F.samples[i].th);
    CHECK(G.samples[i].t == 0.0);
  }
  CHECK_THROWS_AS(transport(m, F, AdmissiblePath::parse("t=h"), -0.1), Error);
}

TEST_CASE("transport converges at fourth order", "[fibration_flow]") {
  // Endpoint drift against a fine reference run; RK4 error ratio under step
  // halving tends to 2^4.
  const Model m = test::model("local_snc_mult.json");
  const AdmissiblePath path = AdmissiblePath::parse("t=h,q=h^2");
  const TorusFiber F = radius_zero_torus(m, 0, Eigen::Vector2d(0.45, 0.55), 0.3, 8);
  auto run = [&](int steps) {
    TransportOptions o;
    o.steps = steps;
    return transport(m, F, path, 0.08, o);
  };
  const TorusFiber ref = run(512);
  double prev = 0.0;
  for (int steps : {4, 8, 16}) {
    const TorusFiber G = run(steps);
    double e = 0.0;
    for (size_t i = 0; i < G.samples.size(); ++i) e = std::max(e, drift(G.samples[i], ref.samples[i]));
    INFO("steps " << steps << " drift " << e);
    if (prev > 0.0) {
      CHECK(prev / e > 12.0);
      CHECK(prev / e < 22.0);
    }
    prev = e;
  }
}

TEST_CASE("transport at q = 1 keeps |f| on target", "[fibration_flow]") {
  const Model m = test::model("local_snc_n1.json");
  const AdmissiblePath path = AdmissiblePath::constant_q(1.0);
  const TorusFiber F = radius_zero_torus(m, 0, Eigen::Vector2d(0.5, 0.5), 0.0, 32);
  TransportOptions o;
  o.record = true;
  const TorusFiber G = transport(m, F, path, 0.05, o);
  REQUIRE_FALSE(G.escaped);
  CHECK(G.t == 0.05);
  REQUIRE(G.trajectories.size() == 32);
  for (const auto& traj : G.trajectories) {
    REQUIRE(traj.states.size() == 65);
    for (size_t s = 1; s < traj.states.size(); ++s) {
      const HybridPoint& p = traj.states[s].point;
      REQUIRE(f_rel_error(m, p, p.t) < 1e-8);
      REQUIRE(constraint_error(m, p, 0.0) < 1e-12);
    }
  }
}

TEST_CASE("fixed and instantaneous q agree on a constant path", "[fibration_flow]") {
  const Model m = test::model("local_snc_n2.json");
  const AdmissiblePath path = AdmissiblePath::constant_q(0.6);
  const TorusFiber F = radius_zero_torus(m, 0, Eigen::Vector3d(0.25, 0.35, 0.4), 0.1, 8);
  TransportOptions a, b;
  a.steps = b.steps = 16;
  b.mode = QMode::Fixed;
  const TorusFiber Ga = transport(m, F, path, 0.04, a), Gb = transport(m, F, path, 0.04, b);
  for (size_t i = 0; i < Ga.samples.size(); ++i) REQUIRE(drift(Ga.samples[i], Gb.samples[i]) == 0.0);
  // on a varying path the two modes differ
  const AdmissiblePath varying = AdmissiblePath::parse("t=h,q=h^2");
  const TorusFiber Va = transport(m, F, varying, 0.04, a), Vb = transport(m, F, varying, 0.04, b);
  double d = 0.0;
  for (size_t i = 0; i < Va.samples.size(); ++i) d = std::max(d, drift(Va.samples[i], Vb.samples[i]));
  CHECK(d > 0.0);
  CHECK(Vb.q == varying.q(0.04));
}

TEST_CASE("Lagrangian residual at radius zero", "[fibration_flow]") {
  for (const char* name : {"local_snc_n2.json", "local_snc_n1.json"}) {
    const Model m = test::model(name);
    const int N = m.chart(0).N();
    auto g = test::rng(34);
    for (int i = 0; i < 5; ++i) {
      const TorusFiber F = radius_zero_torus(m, 0, test::interior_w(g, N, 0.1), test::angles(g, 1)(0), 16);
      for (double q : {0.0, 0.5, 1.0}) CHECK(lagrangian_residual(m, F, {0.1, q}) < 1e-12);
    }
  }
}

TEST_CASE("Lagrangian residual after transport", "[fibration_flow]") {
  const Model m = test::model("local_snc_n2.json");
  const AdmissiblePath path = AdmissiblePath::parse("t=h,q=h^2");
  const TorusFiber F = radius_zero_torus(m, 0, Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3), 0.0, 32);
  TransportOptions o;
  o.steps = 64;
  const TorusFiber G = transport(m, F, path, 0.05, o);
  REQUIRE_FALSE(G.escaped);
  const FormParams fp{0.1, path.q(0.05)};
  CHECK(lagrangian_residual(m, G, fp) < 1e-5);
  for (const auto& p : G.samples) {
    REQUIRE(f_rel_error(m, p, 0.05) < 1e-8);
    REQUIRE(constraint_error(m, p, 0.0) < 1e-12);
  }

  // Detector sanity: one sample pushed off the level set.
  TorusFiber bad = G;
  auto& s = bad.samples[static_cast<size_t>(bad.index({5, 9}))];
  s.w(1) += 1e-2;
  s.w(0) -= 1e-2;
  CHECK(lagrangian_residual(m, bad, fp) > 1e-4);
}

TEST_CASE("Lagrangian residual needs eight samples per circle", "[fibration_flow]") {
  const Model m = test::model("local_snc_n2.json");
  const TorusFiber F = radius_zero_torus(m, 0, Eigen::Vector3d(0.3, 0.3, 0.4), 0.0, 7);
  try {
    lagrangian_residual(m, F, {0.1, 1.0});
    FAIL("expected a range error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Range);
  }
  CHECK_NOTHROW(lagrangian_residual(m, radius_zero_torus(m, 0, Eigen::Vector3d(0.3, 0.3, 0.4), 0.0, 8), {0.1, 1.0}));
}

TEST_CASE("transported lattices do not fold over", "[fibration_flow][property]") {
  for (const char* name : {"local_snc_n1.json", "local_snc_n2.json", "local_snc_mult.json"}) {
    const Model m = test::model(name);
    const ModelChart& c = m.chart(0);
    const int N = c.N();
    auto g = test::rng(35);
    const int res = N == 2 ? 32 : 12;
    const TorusFiber F = radius_zero_torus(m, 0, test::interior_w(g, N, 0.2), 0.7, res);
    TransportOptions o;
    o.steps = 16;
    const TorusFiber G = transport(m, F, AdmissiblePath::parse("t=h,q=h^2"), 0.05, o);
    REQUIRE_FALSE(G.escaped);
    // Each lattice step keeps advancing its own angle theta_{a+2} by a
    // positive amount below half a turn.
    for (int i = 0; i < static_cast<int>(G.samples.size()); ++i)
      for (int a = 0; a < G.n; ++a) {
        auto lat = G.lattice(i);
        lat[static_cast<size_t>(a)] += 1;
        const HybridPoint& p = G.samples[static_cast<size_t>(i)];
        const HybridPoint& q = G.samples[static_cast<size_t>(G.index(lat))];
        const double d = std::remainder(q.th(a + 1) - p.th(a + 1), 2.0 * M_PI);
        REQUIRE(d > 0.0);
        REQUIRE(d < M_PI);
      }
  }
}

TEST_CASE("transport flags samples that leave the chart", "[fibration_flow]") {
  const Model m = test::model("local_snc_n1.json");
  // The flow pushes w inward, but |z_k| = exp(-w_k/t) still reaches the
  // polydisk radius once t is large.
  const TorusFiber F = radius_zero_torus(m, 0, Eigen::Vector2d(0.9, 0.1), 0.0, 8);
  TransportOptions o;
  o.steps = 32;
  o.record = true;
  const TorusFiber G = transport(m, F, AdmissiblePath::constant_q(1.0), 0.6, o);
  CHECK(G.escaped);
  bool any = false;
  for (const auto& traj : G.trajectories) {
    any = any || traj.escaped;
    if (traj.escaped) CHECK(traj.states.size() < 33);
  }
  CHECK(any);
  for (const auto& p : G.samples) {
    CHECK(p.t < 0.6);
    CHECK(m.in_domain(p));
  }
}
