#include <cmath>
#include <complex>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "syz/diagnostics.hpp"
#include "syz/errors.hpp"
#include "syz/kahler_family.hpp"

using namespace syz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SweepConfig n1_config(const std::string& path, const std::string& schedule, int grid = 32) {
  SweepConfig cfg;
  cfg.path = AdmissiblePath::parse(path);
  cfg.schedule = parse_schedule(schedule);
  cfg.grid = grid;
  cfg.levels = segment_levels(0.2, 0.8, 13);
  return cfg;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Parse;
}

}  // namespace

TEST_CASE("schedule parsing", "[diagnostics]") {
  const auto g = parse_schedule("geometric:1e-1,1e-4,4");
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 0.1);
  CHECK_THAT(g[1], WithinRel(1e-2, 1e-12));
  CHECK_THAT(g[2], WithinRel(1e-3, 1e-12));
  CHECK(g[3] == 1e-4);
  CHECK(parse_schedule("list:0.3,0.2,0") == std::vector<double>{0.3, 0.2, 0.0});
  for (const char* bad : {"list:0.2,0.3", "list:0.2,0.2", "list:-0.1", "geometric:1e-4,1e-1,4", "geometric:1,0.1,1",
                          "geometric:1,0.1", "geometric:1,0.1,2.5", "cubic:1,2", "list:0.1,x", "list:0.1x", "0.1"})
    CHECK(kind_of([&] { parse_schedule(bad); }) == ErrorKind::Parse);
}

TEST_CASE("torus levels", "[diagnostics]") {
  const auto seg = segment_levels(0.2, 0.8, 4);
  REQUIRE(seg.size() == 4);
  CHECK(seg.front() == Eigen::Vector2d(0.8, 0.2));
  CHECK_THAT(seg[1](1), WithinAbs(0.4, 1e-15));
  const auto sx = simplex_levels(3, 4);
  CHECK(sx.size() == 6);  // k_1 + k_2 + k_3 = 5 with every k_i >= 1
  for (const auto& w : sx) {
    CHECK_THAT(w.sum(), WithinAbs(1.0, 1e-15));
    CHECK(w.minCoeff() >= 0.2 - 1e-15);
  }
  CHECK(simplex_levels(2, 1) == std::vector<Eigen::VectorXd>{Eigen::Vector2d(0.5, 0.5)});
  SweepConfig empty;
  empty.schedule = {0.1};
  CHECK(kind_of([&] { run_sweep(test::model("local_snc_n1.json"), empty); }) == ErrorKind::Range);
}

TEST_CASE("limit metric", "[diagnostics]") {
  const Model m = test::model("local_snc_n2.json");
  const ModelChart& c = m.chart(0);
  const Eigen::MatrixXd L = limit_metric(c, 0.1);
  // d/dw_j moves w_j and w_1 oppositely: eps ((dw_1)^2 + (dw_j)^2) = 2 eps,
  // and the two w directions share w_1: eps.
  CHECK_THAT(L(0, 0), WithinAbs(0.2, 1e-15));
  CHECK_THAT(L(2, 2), WithinAbs(0.2, 1e-15));
  CHECK_THAT(L(0, 2), WithinAbs(0.1, 1e-15));
  for (int a = 0; a < 4; ++a) {
    CHECK(L(1, a) == 0.0);
    CHECK(L(3, a) == 0.0);
  }
  CHECK(limit_metric(c, 0.2) == 2.0 * L);
}

TEST_CASE("metric limit along a sweep", "[diagnostics]") {
  const Model m = test::model("local_snc_n1.json");
  SweepConfig cfg = n1_config("t=h,q=h", "geometric:1e-1,1e-4,4", 16);
  cfg.levels = segment_levels(0.3, 0.7, 3);
  const auto recs = metric_limit_check(m, run_sweep(m, cfg));
  REQUIRE(recs.size() == 4);
  for (size_t k = 1; k < recs.size(); ++k) {
    CHECK(recs[k].residual < recs[k - 1].residual);
    CHECK(recs[k].theta_length < recs[k - 1].theta_length);
  }
  CHECK(recs.back().residual < 1e-3);
  CHECK(recs.back().theta_length < 0.05);
}

TEST_CASE("GH distortion along q = h", "[diagnostics]") {
  const Model m = test::model("local_snc_n1.json");
  const PathSweep S = run_sweep(m, n1_config("t=h,q=h", "geometric:1e-1,1e-3,5"));
  const GHReport rep = gh_distortion(m, S);
  REQUIRE(rep.records.size() == 5);
  CHECK(rep.monotone);
  CHECK(rep.band_ok);
  for (const auto& r : rep.records) {
    INFO("h " << r.h << " distortion " << r.distortion);
    CHECK(r.distortion >= 0.0);
    CHECK(r.max_fiber_pair <= r.torus_diameter + 1e-15);  // d_std = 0 inside one fiber
    CHECK(r.pairs == 416u * 415u / 2u);
  }
  CHECK(rep.records.back().distortion < 0.05);
}

TEST_CASE("GH distortion at radius zero with q = 0", "[diagnostics]") {
  // The limit metric is euclidean on the w-segment, so the lower bound of the
  // band is attained between tori.
  const Model m = test::model("local_snc_n1.json");
  const GHReport rep = gh_distortion(m, run_sweep(m, n1_config("t=h,q=0", "list:0", 16)));
  const GHRecord& r = rep.records.front();
  CHECK(r.torus_diameter == 0.0);
  CHECK(r.band_ok);
  CHECK(r.distortion < 1e-12);
  CHECK(r.lower_violation > -1e-12);
  CHECK(kind_of([&] {
          SweepConfig cfg = n1_config("t=h", "list:0", 8);
          cfg.levels = simplex_levels(3, 2);
          const Model m2 = test::model("local_snc_n2.json");
          gh_distortion(m2, run_sweep(m2, cfg));
        }) == ErrorKind::Domain);
}

TEST_CASE("Hesse volume fraction", "[diagnostics]") {
  const Model m = Model::hesse();
  CHECK(volume_fraction(m, 0.0).ratio == 1.0);
  const auto recs = volume_fraction_sweep(m, AdmissiblePath::parse("t=h"), parse_schedule("geometric:1e-1,1e-2,3"));
  for (size_t k = 1; k < recs.size(); ++k) CHECK(recs[k].ratio >= recs[k - 1].ratio - 1e-3);
  for (const auto& r : recs) {
    CHECK(r.ratio > 0.0);
    CHECK(r.ratio < 1.0);
    CHECK(r.error_estimate < 1e-3);
  }
  CHECK(recs.back().ratio > 0.95);
  // a smaller generic window strictly lowers the numerator
  VolumeOptions narrow;
  narrow.window = 0.2;
  const auto wide = volume_fraction(m, 0.05), small = volume_fraction(m, 0.05, narrow);
  CHECK(small.numerator < wide.numerator);
  CHECK(small.denominator == wide.denominator);
  CHECK(kind_of([&] { volume_fraction(test::model("local_snc_n1.json"), 0.05); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { volume_fraction(m, 1e-3); }) == ErrorKind::Range);
}

TEST_CASE("c+ trend", "[diagnostics]") {
  const Model m = test::model("local_snc_n1.json");
  SweepConfig cfg = n1_config("t=h,q=h^2", "list:0", 16);
  const auto at0 = ricci_flat_trend(m, run_sweep(m, cfg)).front();
  CHECK(at0.spread < 1e-10);
  CHECK(at0.limit == 2 * 0.1);
  CHECK_THAT(at0.mean, WithinAbs(0.2, 1e-10));
  CHECK(at0.excluded == 0u);

  // a level on the boundary of the face is outside the generic region
  cfg.levels.push_back(Eigen::Vector2d(1.0, 0.0));
  const auto with_edge = ricci_flat_trend(m, run_sweep(m, cfg)).front();
  CHECK(with_edge.excluded == 16u);
  CHECK(with_edge.used == at0.used);

  const Model m2 = test::model("local_snc_n2.json");
  SweepConfig c2 = n1_config("t=h,q=h^2", "list:0", 8);
  c2.levels = simplex_levels(3, 3);
  const auto n2 = ricci_flat_trend(m2, run_sweep(m2, c2)).front();
  CHECK(n2.spread < 1e-10);
  CHECK_THAT(n2.mean, WithinAbs(3 * 0.01, 1e-12));

  cfg.levels = segment_levels(0.3, 0.7, 5);
  cfg.schedule = parse_schedule("geometric:1e-1,1e-3,3");
  const auto trend = ricci_flat_trend(m, run_sweep(m, cfg));
  for (size_t k = 1; k < trend.size(); ++k) CHECK(trend[k].spread < trend[k - 1].spread);
  CHECK(std::abs(trend.back().mean - 0.2) < std::abs(trend.front().mean - 0.2));
}

TEST_CASE("winding numbers of unit loops", "[diagnostics]") {
  auto loop = [](int turns, int samples) {
    std::vector<std::complex<double>> out;
    for (int j = 0; j < samples; ++j) out.push_back(std::polar(1.0, 2.0 * M_PI * turns * j / samples + 0.3));
    return out;
  };
  CHECK(winding_number(loop(0, 8)) == 0);
  CHECK(winding_number(loop(1, 8)) == 1);
  CHECK(winding_number(loop(-1, 8)) == -1);
  CHECK(winding_number(loop(2, 16)) == 2);
  CHECK(winding_number(loop(-3, 32)) == -3);
}

TEST_CASE("phase along the tame path", "[diagnostics]") {
  // The unit 1 + z_1/4 breaks the torus symmetry, so the phase is not
  // constant on transported circles at positive radius.
  const Model m = test::model("local_snc_mult.json");
  SweepConfig cfg = n1_config("t=h,q=h^2", "geometric:1e-1,1e-3,5");
  const PathSweep S = run_sweep(m, cfg);
  const PhaseReport rep = phase_specialty(m, S);
  CHECK(rep.tame);
  CHECK(std::abs(std::abs(rep.varpi0.imag()) - 1.0) < 1e-15);
  CHECK(rep.varpi0.real() == 0.0);
  CHECK(rep.records.front().deviation > 1e-5);
  for (size_t k = 0; k < rep.records.size(); ++k) {
    const auto& r = rep.records[k];
    INFO("h " << r.h << " deviation " << r.deviation);
    CHECK(r.winding == std::vector<long>{0});
    CHECK(r.max_modulus_error < 1e-14);
    if (k > 0 && rep.records[k - 1].deviation > 0.0) CHECK(r.deviation < rep.records[k - 1].deviation);
  }
  CHECK(rep.records.back().deviation < 0.1);

  const auto cal = calibration_ratio(m, S, rep.varpi0);
  for (const auto& r : cal) {
    INFO("h " << r.h << " ratio " << r.ratio);
    CHECK(r.ratio >= 1.0 - 1e-3);
  }
  CHECK(cal.front().ratio > 1.0);
  CHECK(cal.back().ratio <= 1.05);
  CHECK(std::abs(cal.back().ratio - 1.0) < std::abs(cal.front().ratio - 1.0));
}

TEST_CASE("torus orbits of the toric chart have constant phase", "[diagnostics]") {
  const Model m = test::model("local_snc_n1.json");
  SweepConfig cfg = n1_config("t=h,q=h^2", "geometric:1e-1,1e-2,2", 16);
  cfg.levels = {Eigen::Vector2d(0.3, 0.7)};
  const PhaseReport rep = phase_specialty(m, run_sweep(m, cfg));
  for (const auto& r : rep.records) {
    CHECK(r.deviation == 0.0);
    CHECK(r.winding == std::vector<long>{0});
  }
}

TEST_CASE("phase and calibration at radius zero", "[diagnostics]") {
  for (const char* name : {"local_snc_n1.json", "local_snc_n2.json"}) {
    const Model m = test::model(name);
    SweepConfig cfg = n1_config("t=h,q=h^2", "list:0", 8);
    cfg.levels = {m.chart(0).N() == 2 ? Eigen::VectorXd(Eigen::Vector2d(0.3, 0.7)) : Eigen::VectorXd(Eigen::Vector3d(0.2, 0.3, 0.5))};
    const PathSweep S = run_sweep(m, cfg);
    const PhaseReport rep = phase_specialty(m, S);
    CHECK(rep.records.front().deviation < 1e-12);
    for (long w : rep.records.front().winding) CHECK(w == 0);
    CHECK_THAT(calibration_ratio(m, S, rep.varpi0).front().ratio, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("non-tame path is reported", "[diagnostics]") {
  const Model m = test::model("local_snc_n1.json");
  SweepConfig cfg = n1_config("t=h,q=sqrt(h)", "geometric:1e-1,1e-3,3", 16);
  cfg.levels = {Eigen::Vector2d(0.5, 0.5)};
  const PhaseReport rep = phase_specialty(m, run_sweep(m, cfg));
  CHECK_FALSE(rep.tame);
  CHECK(rep.records.size() == 3);
  for (const auto& r : rep.records) CHECK(std::isfinite(r.deviation));
}

TEST_CASE("sweeps are deterministic", "[diagnostics]") {
  const Model m = test::model("local_snc_n1.json");
  SweepConfig cfg = n1_config("t=h,q=h", "geometric:1e-1,1e-2,2", 8);
  cfg.levels = segment_levels(0.3, 0.7, 3);
  const PathSweep a = run_sweep(m, cfg), b = run_sweep(m, cfg);
  for (size_t k = 0; k < a.fibers.size(); ++k)
    for (size_t l = 0; l < a.fibers[k].size(); ++l)
      for (size_t i = 0; i < a.fibers[k][l].samples.size(); ++i) {
        REQUIRE(a.fibers[k][l].samples[i].w == b.fibers[k][l].samples[i].w);
        REQUIRE(a.fibers[k][l].samples[i].th == b.fibers[k][l].samples[i].th);
      }
  const auto ga = gh_distortion(m, a), gb = gh_distortion(m, b);
  CHECK(ga.records.back().distortion == gb.records.back().distortion);
}
