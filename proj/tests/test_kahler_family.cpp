#include <cmath>
#include <complex>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "syz/errors.hpp"
#include "syz/kahler_family.hpp"
#include "syz/transfer.hpp"

using namespace syz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using cplx = std::complex<double>;

HybridPoint at(const Model& m, const Eigen::VectorXd& w, double t, double theta = 0.3) {
  const int N = static_cast<int>(w.size());
  Eigen::VectorXd rest(N - 1);
  for (int k = 0; k < N - 1; ++k) rest(k) = 0.7 * (k + 1);
  const HybridPoint p0 = radius_zero_point(m, 0, w, theta, rest);
  return t > 0.0 ? from_radius_zero(m, p0, t) : p0;
}

// Complex tangent dz(X) by central differences of the chart map.
Eigen::VectorXcd dz(const Model& m, const HybridPoint& p, const Eigen::VectorXd& X, double h = 1e-6) {
  const ModelChart& c = m.chart(p.chart);
  return (m.to_z(hybrid_shift(c, p, h * X)) - m.to_z(hybrid_shift(c, p, -h * X))) / (2.0 * h);
}

// t * Theta/df on fiber vectors of an n = 1 local snc chart, with
// Theta = c(z) z^(nu - 1) dz_1 ^ dz_2.
cplx omega_new_oracle(const Model& m, const HybridPoint& p, const Eigen::VectorXd& X) {
  const ModelChart& c = m.chart(p.chart);
  const Eigen::VectorXcd z = m.to_z(p);
  cplx unit = c.unit(z);
  for (int k = 0; k < 2; ++k) unit *= std::pow(z(k), c.nu[static_cast<size_t>(k)] - 1);
  const cplx df1 = static_cast<double>(c.m[0]) * std::pow(z(0), c.m[0] - 1) * std::pow(z(1), c.m[1]);
  const cplx f = std::pow(z(0), c.m[0]) * std::pow(z(1), c.m[1]);
  return p.t * -unit * dz(m, p, X)(1) / df1 * std::pow(f, 1.0 - m.kappa());
}

double eta_prime_oracle(double x) { return 1.0 / (x * std::pow(1.0 - std::log(x), 2)); }

}  // namespace

TEST_CASE("omega_sharp at the barycenter of the edge", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  const HybridPoint p = at(m, Eigen::Vector2d(0.5, 0.5), 0.0);
  const ModelChart& c = m.chart(0);
  const Eigen::MatrixXd B = fiber_basis(c);
  const Eigen::MatrixXd F = restrict_form(omega_sharp(m, p).matrix, B);
  // -eta'(1/2) dw_2 ^ (dtheta_2 - dtheta_1) on (d/dw_2, d/dtheta_2 - d/dtheta_1)
  CHECK_THAT(F(0, 1), WithinRel(-2.0 * eta_prime_oracle(0.5), 1e-14));
  // no dv components on the angle directions
  const Eigen::MatrixXd W = omega_sharp(m, p).matrix;
  CHECK(W(hybrid_th_index(c, 0), hybrid_th_index(c, 1)) == 0.0);
}

TEST_CASE("omega_flat sign and value", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  const HybridPoint p = at(m, Eigen::Vector2d(0.4, 0.6), 0.0);
  const Eigen::MatrixXd F = restrict_form(omega_flat(m, p).matrix, fiber_basis(m.chart(0)));
  // -(dw_1 ^ dtheta_1 + dw_2 ^ dtheta_2) with dw_1 = -dw_2, e_2 = d/dtheta_2 - d/dtheta_1
  CHECK(F(0, 1) == -2.0);
  // the positive choice: g_flat is positive at small t
  const MetricReport g = metric_g(m, at(m, Eigen::Vector2d(0.4, 0.6), 0.01), {0.1, 0.0});
  CHECK(g.positive);
}

TEST_CASE("omega_q at radius zero is the epsilon part", "[kahler_family]") {
  const Model m = test::model("local_snc_n2.json");
  const HybridPoint p = at(m, Eigen::Vector3d(0.2, 0.3, 0.5), 0.0);
  CHECK(omega_X(m, p).matrix.cwiseAbs().maxCoeff() == 0.0);
  for (double q : {0.0, 0.25, 1.0}) {
    const Eigen::MatrixXd expect = 0.1 * (q * omega_sharp(m, p).matrix + (1.0 - q) * omega_flat(m, p).matrix);
    CHECK((omega_q(m, p, {0.1, q}).matrix - expect).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK_THROWS_AS(omega_sharp(m, at(m, Eigen::Vector3d(0.0, 0.5, 0.5), 0.0)), Error);
}

TEST_CASE("forms are antisymmetric", "[kahler_family][property]") {
  auto g = test::rng(7);
  const Model m = test::model("local_snc_n2.json");
  for (int k = 0; k < 20; ++k) {
    const HybridPoint p = at(m, test::interior_w(g, 3, 0.25), 0.01 * k / 2.0);
    const Eigen::MatrixXd W = omega_q(m, p, {0.1, 0.5}).matrix;
    REQUIRE((W + W.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pairing identity against a hand expansion", "[kahler_family]") {
  auto g = test::rng(8);
  for (const char* name : {"local_snc_n1.json", "local_snc_n2.json", "local_snc_mult.json"}) {
    const Model m = test::model(name);
    const ModelChart& c = m.chart(0);
    const int N = c.N();
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd w = test::interior_w(g, N, 0.05);
      const HybridPoint p = at(m, w, 0.0);
      for (double q : {0.0, 0.3, 1.0}) {
        const double eps = 0.1;
        const Eigen::MatrixXd W = omega_q(m, p, {eps, q}).matrix;
        for (int i = 0; i < N; ++i) {
          const double ci = q + (1.0 - q) * c.m[static_cast<size_t>(i)] * zeta(eta(w(i)));
          // d v_i = -eta'(w_i) dw_i on the boundary, dw_1 = -sum_{j>1} dw_j
          for (int j = 1; j < N; ++j) {
            const double dvi = -eta_prime_oracle(w(i)) * ((i == j) - (i == 0));
            REQUIRE_THAT(W(hybrid_w_index(j), hybrid_th_index(c, i)), WithinAbs(eps * ci * dvi, 1e-12));
          }
          for (int k = 0; k < N; ++k) REQUIRE(W(hybrid_th_index(c, k), hybrid_th_index(c, i)) == 0.0);
        }
        REQUIRE(pairing_check(m, p, {eps, q}).residual < 1e-12);
      }
    }
  }
}

TEST_CASE("pairing constants", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  const PairingReport r1 = pairing_check(m, at(m, Eigen::Vector2d(0.3, 0.7), 0.0), {0.1, 1.0});
  CHECK(r1.c == std::vector<double>{1.0, 1.0});
  const PairingReport r0 = pairing_check(m, at(m, Eigen::Vector2d(0.5, 0.5), 0.0), {0.1, 0.0});
  CHECK(r0.residual < 1e-12);
  CHECK_THAT(r0.c[0], WithinRel(zeta(1.0 / (1.0 + std::log(2.0))), 1e-14));
  CHECK(r0.c[0] > 0.0);
  CHECK_FALSE(r0.degenerate);
  const PairingReport rb = pairing_check(m, at(m, Eigen::Vector2d(1.0, 0.0), 0.0), {0.1, 0.0});
  CHECK(rb.c[1] == 0.0);
  CHECK(rb.degenerate);
}

TEST_CASE("radius-zero torus pullback is exactly zero", "[kahler_family][property]") {
  auto g = test::rng(9);
  for (const char* name : {"local_snc_n1.json", "local_snc_n2.json", "local_snc_mult.json", "hesse.json"}) {
    const Model m = test::model(name);
    const ModelChart& c = m.chart(0);
    const Eigen::MatrixXd T = torus_basis(c);
    for (int k = 0; k < 30; ++k) {
      const HybridPoint p = at(m, test::interior_w(g, c.N(), 0.02), 0.0, test::angles(g, 1)(0));
      for (int j = 0; j <= 10; ++j) REQUIRE(restrict_form(omega_q(m, p, {0.1, j / 10.0}).matrix, T).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("the metric at epsilon = 0 is the euclidean metric on the fiber", "[kahler_family]") {
  const Model m = test::model("local_snc_n2.json");
  const HybridPoint p = at(m, Eigen::Vector3d(0.3, 0.3, 0.4), 0.1);
  const Eigen::MatrixXd B = fiber_basis(m.chart(0));
  const MetricReport g = metric_g(m, p, {0.0, 1.0});
  for (int a = 0; a < B.cols(); ++a)
    for (int b = 0; b < B.cols(); ++b) {
      const double euclid = (dz(m, p, B.col(a)).conjugate().cwiseProduct(dz(m, p, B.col(b)))).sum().real();
      REQUIRE_THAT(g.fiber(a, b), WithinAbs(euclid, 1e-8 * std::max(1.0, std::abs(euclid))));
    }
  CHECK(g.positive);
}

TEST_CASE("J-compatibility and positivity on interior samples", "[kahler_family][property]") {
  auto g = test::rng(10);
  for (const char* name : {"local_snc_n1.json", "local_snc_n2.json", "local_snc_mult.json"}) {
    const Model m = test::model(name);
    for (int k = 0; k < 15; ++k) {
      const Eigen::VectorXd w = test::interior_w(g, m.chart(0).N(), 0.2);
      for (double t : {1e-3, 1e-2, 0.05, 0.1}) {
        const HybridPoint p = at(m, w, t);
        for (int j = 0; j <= 10; ++j) {
          const FormParams fp{0.1, j / 10.0};
          REQUIRE(j_compatibility_residual(m, p, fp) < 1e-10);
          const MetricReport r = metric_g(m, p, fp);
          REQUIRE(r.asymmetry < 1e-10);
          REQUIRE(r.positive);
        }
      }
    }
  }
}

TEST_CASE("large epsilon is reported, not rejected", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  const HybridPoint p = at(m, Eigen::Vector2d(0.97, 0.03), 0.003);
  MetricReport r;
  REQUIRE_NOTHROW(r = metric_g(m, p, {1e6, 0.0}));
  CHECK(r.eigenvalues.size() == 2);
  CHECK(r.min_eigenvalue == r.eigenvalues.minCoeff());
}

TEST_CASE("omega_q is closed", "[kahler_family][property]") {
  auto g = test::rng(11);
  for (const char* name : {"local_snc_n2.json", "local_snc_mult.json"}) {
    const Model m = test::model(name);
    for (int k = 0; k < 6; ++k) {
      const HybridPoint p = at(m, test::interior_w(g, m.chart(0).N(), 0.25), 0.05 + 0.01 * k);
      for (double q : {0.0, 0.5, 1.0}) REQUIRE(closedness_residual(m, p, {0.1, q}, 1e-4) < 1e-6);
    }
  }
}

TEST_CASE("sharp potential", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  auto g = test::rng(12);
  for (int k = 0; k < 6; ++k) {
    const HybridPoint p = at(m, test::interior_w(g, 2, 0.3), 0.05 + 0.01 * k);
    const SharpPotentialCheck r = potential_sharp_check(m, p);
    REQUIRE(r.dc_residual < 1e-6);
    REQUIRE(r.ddc_residual < 1e-5);
  }
  // s_i = -w_i/(m_i t) = -1 for every i empties every integral. The point
  // r_i = 1/e lies outside the polydisk, but the potential only reads (t, w).
  HybridPoint q;
  q.chart = 0;
  q.t = 0.5;
  q.w = Eigen::Vector2d(0.5, 0.5);
  q.th = Eigen::Vector2d::Zero();
  CHECK_THAT(potential_sharp(m, q), WithinAbs(0.0, 1e-15));
}

TEST_CASE("flat potential", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  const HybridPoint p = at(m, Eigen::Vector2d(0.5, 0.5), 0.25);
  CHECK_THAT(potential_flat(m, p).value, WithinAbs(-1.0, 1e-15));
  auto g = test::rng(13);
  for (const char* name : {"local_snc_n1.json", "local_snc_n2.json"}) {
    const Model mm = test::model(name);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd w = test::interior_w(g, mm.chart(0).N(), 0.25);
      const FlatPotential f = potential_flat(mm, at(mm, w, 0.05 + 0.005 * k));
      REQUIRE(f.residual < 1e-6);
    }
  }
  // t phi_flat is the constant -sum w^2 / 2 along fixed w
  for (double t : {0.1, 0.01, 0.001})
    CHECK_THAT(t * potential_flat(m, at(m, Eigen::Vector2d(0.3, 0.7), t)).value, WithinAbs(-0.5 * (0.09 + 0.49), 1e-14));
}

TEST_CASE("volume forms at radius zero", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  const HybridPoint p = at(m, Eigen::Vector2d(0.5, 0.5), 0.0);
  const VolumeValue v = volume_forms(m, p, Eigen::Matrix2d::Identity());
  CHECK(std::abs(v.omega - cplx(1.0, 0.0)) < 1e-15);
  CHECK(v.coefficient == 1.0);
  CHECK(std::abs(std::abs(v.vol) - 1.0) < 1e-15);
  Eigen::Matrix2d swapped;
  swapped << 0, 1, 1, 0;
  CHECK(volume_forms(m, p, swapped).vol == -v.vol);
  CHECK_THROWS_AS(volume_forms(m, p, Eigen::Matrix2d::Zero()), Error);
}

TEST_CASE("Omega_new agrees with t Theta/df from the complex coordinates", "[kahler_family][property]") {
  auto g = test::rng(14);
  for (const char* name : {"local_snc_n1.json", "local_snc_mult.json"}) {
    const Model m = test::model(name);
    const ModelChart& c = m.chart(0);
    const Eigen::MatrixXd B = fiber_basis(c);
    for (int k = 0; k < 20; ++k) {
      const double t = 0.01 + 0.09 * k / 19.0;
      const HybridPoint p = at(m, test::interior_w(g, 2, 0.3), t, test::angles(g, 1)(0));
      for (int col = 0; col < 2; ++col) {
        Eigen::Matrix2d frame = Eigen::Matrix2d::Identity();
        if (col == 1) frame << 0, 1, 1, 0;
        const cplx value = volume_forms(m, p, frame).omega;
        const cplx oracle = omega_new_oracle(m, p, B.col(col));
        REQUIRE(std::abs(value - oracle) < 1e-7 * std::max(1.0, std::abs(oracle)));
      }
    }
  }
  const Model m = test::model("local_snc_n1.json");
  for (double t : {0.01, 0.03, 0.05})
    CHECK(std::abs(volume_forms(m, at(m, Eigen::Vector2d(0.4, 0.6), t), Eigen::Matrix2d::Identity()).omega - 1.0) < 0.2);
}

TEST_CASE("vol_new decreases toward a non-essential component", "[kahler_family]") {
  const Model m = Model::local_snc(1, {1, 1}, {1, 2});
  double last = std::numeric_limits<double>::infinity();
  for (double w2 : {0.2, 0.4, 0.6, 0.8, 0.9}) {
    const VolumeValue v = volume_forms(m, at(m, Eigen::Vector2d(1.0 - w2, w2), 0.05), Eigen::Matrix2d::Identity());
    CHECK(v.coefficient < last);
    last = v.coefficient;
  }
  CHECK(volume_coefficient(m, at(m, Eigen::Vector2d(0.5, 0.5), 0.0)) == cplx(0.0, 0.0));
  CHECK_THROWS_AS(cplus(m, at(m, Eigen::Vector2d(0.5, 0.5), 0.0), {0.1, 0.0}), Error);
}

TEST_CASE("c+ at radius zero", "[kahler_family]") {
  const double eps = 0.1;
  const Model m1 = test::model("local_snc_n1.json");
  const Model m2 = test::model("local_snc_n2.json");
  CHECK_THAT(cplus(m1, at(m1, Eigen::Vector2d(0.4, 0.6), 0.0), {eps, 0.0}), WithinAbs(2.0 * eps, 1e-15));
  CHECK_THAT(cplus(m2, at(m2, Eigen::Vector3d(0.2, 0.3, 0.5), 0.0), {eps, 0.0}), WithinAbs(3.0 * eps * eps, 1e-15));
  CHECK(cplus_limit(m1, 0, eps) == 2.0 * eps);
  CHECK_THAT(cplus_limit(m2, 0, eps), WithinRel(3.0 * eps * eps, 1e-15));
  try {
    cplus(m1, at(m1, Eigen::Vector2d(1.0, 0.0), 0.0), {eps, 0.0});
    FAIL("expected a non-generic-point error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonGenericPoint);
  }
}

TEST_CASE("c+ is constant on a 20x20 interior grid at radius zero", "[kahler_family][property]") {
  const Model m = test::model("local_snc_n2.json");
  const double eps = 0.2, target = 3.0 * eps * eps;
  double lo = 1e300, hi = -1e300;
  for (int a = 1; a <= 20; ++a)
    for (int b = 1; b <= 20 - a; ++b) {
      const double w1 = a / 21.0, w2 = b / 21.0;
      const double v = cplus(m, at(m, Eigen::Vector3d(w1, w2, 1.0 - w1 - w2), 0.0), {eps, 0.0});
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  CHECK(hi - lo < 1e-10);
  CHECK_THAT(lo, WithinAbs(target, 1e-10));
}

TEST_CASE("c+ at positive radius is omega over vol_new", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  const Eigen::MatrixXd B = fiber_basis(m.chart(0));
  for (double t : {0.01, 0.05}) {
    const HybridPoint p = at(m, Eigen::Vector2d(0.45, 0.55), t);
    const FormParams fp{0.1, 1.0};
    const double w = restrict_form(omega_q(m, p, fp).matrix, B)(0, 1);
    const cplx a = omega_new_oracle(m, p, B.col(0)), b = omega_new_oracle(m, p, B.col(1));
    const double vol = -std::imag(a * std::conj(b)) / t;
    CHECK_THAT(cplus(m, p, fp), WithinRel(w / vol, 1e-6));
  }
}

TEST_CASE("epsilon calibration scan", "[kahler_family]") {
  const Model m = test::model("local_snc_n1.json");
  std::vector<HybridPoint> samples;
  for (double w : {0.1, 0.5, 0.9})
    for (double t : {1e-3, 0.05}) samples.push_back(at(m, Eigen::Vector2d(w, 1.0 - w), t));
  const EpsCalibration cal = calibrate_eps0(m, samples, {0.0, 0.5, 1.0}, 1e-3, 1e3);
  CHECK(cal.scanned > 0);
  CHECK(cal.eps0 > 0.0);
  if (!cal.failure_found) CHECK(cal.eps0 == 1e3);
  CHECK(cal.min_eigenvalue > 0.0);
}
