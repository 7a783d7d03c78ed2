#include "syz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "syz/dual_complex.hpp"
#include "syz/errors.hpp"
#include "syz/expanded_skeleton.hpp"
#include "syz/fibration_flow.hpp"
#include "syz/kahler_family.hpp"
#include "syz/transfer.hpp"

namespace syz {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

class Suite {
 public:
  explicit Suite(std::vector<CheckResult>& out) : out_(out) {}

  // A check passes when value <= tol.
  void bound(const std::string& module, const std::string& name, double value, double tol, std::string detail = {}) {
    out_.push_back({module, name, value <= tol, value, tol, detail.empty() ? "max " + sci(value) : detail});
  }
  void flag(const std::string& module, const std::string& name, bool ok, std::string detail) {
    out_.push_back({module, name, ok, ok ? 0.0 : 1.0, 0.0, std::move(detail)});
  }
  template <class F>
  void guarded(const std::string& module, const std::string& name, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      out_.push_back({module, name, false, 1.0, 0.0, e.what()});
    }
  }

 private:
  std::vector<CheckResult>& out_;
};

SncDegeneration relabeled(const SncDegeneration& d, const std::vector<int>& perm_ids) {
  // component at position k gets the id perm_ids[k]
  std::map<int, int> to;
  for (int k = 0; k < d.N(); ++k) to[d.components[static_cast<size_t>(k)].id] = perm_ids[static_cast<size_t>(k)];
  SncDegeneration r = d;
  for (auto& c : r.components) c.id = to[c.id];
  r.strata.clear();
  for (const auto& I : d.strata) {
    IndexSet J;
    for (int i : I) J.push_back(to[i]);
    std::sort(J.begin(), J.end());
    r.strata.insert(J);
  }
  return r;
}

void combinatorial_checks(Suite& S, const ModelFile& file, std::mt19937_64& rng, const VerifyOptions& opt) {
  const SncDegeneration& d = file.degeneration;
  const IndexSet ess = essential_set(d);
  S.guarded("dual_complex", "essential_set invariant under nu -> nu + k m", [&] {
    bool ok = true;
    for (int k : {1, 2, 5}) {
      SncDegeneration e = d;
      for (auto& c : e.components) c.nu += k * c.m;
      ok = ok && essential_set(e) == ess;
    }
    S.flag("dual_complex", "essential_set invariant under nu -> nu + k m", ok, ok ? "k = 1, 2, 5" : "set changed");
  });
  const Skeleton sk = build_skeleton(d, ess);
  S.guarded("dual_complex", "skeleton faces closed under subsets", [&] {
    bool ok = true;
    for (const auto& I : sk.faces) {
      for (size_t drop = 0; drop < I.size() && I.size() > 1; ++drop) {
        IndexSet J = I;
        J.erase(J.begin() + static_cast<long>(drop));
        ok = ok && sk.has_face(J);
      }
    }
    S.flag("dual_complex", "skeleton faces closed under subsets", ok, std::to_string(sk.faces.size()) + " faces");
  });
  const PseudomanifoldVerdict pv = pseudomanifold_check(sk);
  S.guarded("dual_complex", "pseudomanifold verdict invariant under relabeling", [&] {
    std::vector<int> ids = d.ids();
    std::vector<int> perm(ids.size());
    for (size_t k = 0; k < ids.size(); ++k) perm[k] = 100 + static_cast<int>(ids.size() - k);
    SncDegeneration r = relabeled(d, perm);
    const PseudomanifoldVerdict rv = pseudomanifold_check(build_skeleton(r, essential_set(r)));
    S.flag("dual_complex", "pseudomanifold verdict invariant under relabeling", rv.ok == pv.ok,
           std::string("verdict ") + (pv.ok ? "true" : "false"));
  });
  S.guarded("dual_complex", "skeleton_distance metric axioms", [&] {
    SkeletonMesh mesh(sk, 6);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Eigen::VectorXd> pts;
    for (const auto& I : sk.faces) {
      Eigen::VectorXd w(static_cast<Eigen::Index>(I.size()));
      for (auto& x : w) x = U(rng) + 1e-3;
      w /= w.sum();
      pts.push_back(sk.embed(I, w));
      if (pts.size() >= 6) break;
    }
    double worst = 0.0;
    for (const auto& a : pts)
      for (const auto& b : pts) {
        worst = std::max(worst, std::abs(mesh.distance(a, b) - mesh.distance(b, a)));
        for (const auto& c : pts) worst = std::max(worst, mesh.distance(a, c) - mesh.distance(a, b) - mesh.distance(b, c));
      }
    S.bound("dual_complex", "skeleton_distance metric axioms", worst, 1e-12);
  });
  S.guarded("expanded_skeleton", "rounded_simplex round trip", [&] {
    double worst = 0.0;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const auto& I : sk.faces) {
      RoundedSimplex rs = rounded_simplex(I);
      for (int k = 0; k < opt.random_points; ++k) {
        Eigen::VectorXd w(static_cast<Eigen::Index>(I.size()));
        for (auto& x : w) x = U(rng) + 1e-6;
        w /= w.sum();
        worst = std::max(worst, (rs.to_face(rs.to_cell(w)) - w).cwiseAbs().maxCoeff());
      }
    }
    S.bound("expanded_skeleton", "rounded_simplex round trip", worst, 1e-12);
  });
  if (pv.ok) {
    S.guarded("expanded_skeleton", "canonical expansion is a closed manifold", [&] {
      std::vector<IvySpec> canon;
      for (const auto& sp : file.ivies)
        if (sp.canonical) canon.push_back(sp);
      const ExpandedSkeleton E = build_expanded(sk, canon);
      // adjacency between cells must match the maximal/submaximal incidence
      std::set<std::pair<IndexSet, IndexSet>> from_cells, from_faces;
      for (auto [a, b] : E.adjacency()) {
        IndexSet fa = E.cells[static_cast<size_t>(a)].face, fb = E.cells[static_cast<size_t>(b)].face;
        if (fa.size() > fb.size()) std::swap(fa, fb);
        from_cells.insert({fa, fb});
      }
      for (const auto& [face, cls] : classify_faces(sk)) {
        if (cls != FaceClass::Maximal) continue;
        for (const auto& [sub, cls2] : classify_faces(sk))
          if (cls2 == FaceClass::Submaximal && std::includes(face.begin(), face.end(), sub.begin(), sub.end()))
            from_faces.insert({sub, face});
      }
      const bool ok = E.ram_empty() && E.outer_boundary_empty() && from_cells == from_faces;
      S.flag("expanded_skeleton", "canonical expansion is a closed manifold", ok,
             std::to_string(E.cells.size()) + " cells, euler " + std::to_string(E.euler_characteristic()));
    });
  }
}

std::vector<HybridPoint> interior_samples(const Model& model, int chart, std::mt19937_64& rng, int count) {
  const ModelChart& c = model.chart(chart);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<HybridPoint> pts;
  const int N = c.N();
  while (static_cast<int>(pts.size()) < count) {
    Eigen::VectorXd w(N);
    for (auto& x : w) x = 0.5 + U(rng);
    w /= w.sum();
    if (w.minCoeff() < 0.2) continue;
    Eigen::VectorXd th(N - 1);
    for (auto& x : th) x = 2.0 * M_PI * U(rng);
    pts.push_back(radius_zero_point(model, chart, w, 2.0 * M_PI * U(rng), th));
  }
  return pts;
}

void analytic_checks(Suite& S, const Model& model, std::mt19937_64& rng, const VerifyOptions& opt) {
  const double eps = opt.eps;
  S.guarded("hybrid_coords", "eta inverse and zeta derivative", [&] {
    double inv = 0.0, der = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double x = k / 100.0;
      inv = std::max(inv, std::abs(eta(eta_inv(x)) - x));
      der = std::max(der, std::abs((eta_inv(x + 1e-5) - eta_inv(x - 1e-5)) / 2e-5 - zeta(x)));
    }
    S.bound("hybrid_coords", "eta o eta^-1 = id", inv, 1e-12);
    S.bound("hybrid_coords", "zeta = (eta^-1)'", der, 1e-6);
  });

  for (const auto& c : model.charts()) {
    if (c.kind != ChartKind::Maximal) continue;
    const std::string tag = " [chart " + std::to_string(c.id) + "]";
    const auto pts = interior_samples(model, c.id, rng, 12);
    S.guarded("hybrid_coords", "z round trip" + tag, [&] {
      double worst = 0.0, exact = 0.0;
      for (const auto& p0 : pts)
        for (double t : {0.02, 0.05, 0.1}) {
          const HybridPoint p = from_radius_zero(model, p0, t);
          const HybridPoint r = model.from_z(c.id, model.to_z(p));
          worst = std::max(worst, (r.w - p.w).cwiseAbs().maxCoeff());
          worst = std::max(worst, std::abs(r.t - p.t) / p.t);
          const BasicFunctionRecord b = basic_functions(model, p);
          exact = std::max(exact, (b.w - p0.w).cwiseAbs().maxCoeff());
          exact = std::max(exact, std::abs(b.w.sum() - 1.0));
        }
      S.bound("hybrid_coords", "z round trip" + tag, worst, 1e-12);
      S.bound("hybrid_coords", "from_radius_zero keeps w" + tag, exact, 1e-15);
    });
    S.guarded("kahler_family", "radius-zero torus pullback" + tag, [&] {
      double worst = 0.0;
      const Eigen::MatrixXd T = torus_basis(c);
      for (const auto& p : pts)
        for (int k = 0; k <= 10; ++k) worst = std::max(worst, restrict_form(omega_q(model, p, {eps, k / 10.0}).matrix, T).cwiseAbs().maxCoeff());
      S.bound("kahler_family", "radius-zero torus pullback" + tag, worst, 0.0);
    });
    S.guarded("kahler_family", "pairing identity" + tag, [&] {
      double worst = 0.0;
      for (const auto& p : pts)
        for (int k = 0; k <= 10; ++k) worst = std::max(worst, pairing_check(model, p, {eps, k / 10.0}).residual);
      S.bound("kahler_family", "pairing identity" + tag, worst, 1e-12);
    });
    S.guarded("kahler_family", "J-compatibility and positivity" + tag, [&] {
      double jc = 0.0, minev = std::numeric_limits<double>::infinity();
      for (const auto& p0 : pts)
        for (double t : {1e-3, 1e-2, 0.05, 0.1}) {
          const HybridPoint p = from_radius_zero(model, p0, t);
          for (int k = 0; k <= 10; ++k) {
            const FormParams fp{eps, k / 10.0};
            jc = std::max(jc, j_compatibility_residual(model, p, fp));
            minev = std::min(minev, metric_g(model, p, fp).min_eigenvalue);
          }
        }
      S.bound("kahler_family", "J-compatibility" + tag, jc, 1e-10);
      S.flag("kahler_family", "metric_g positive definite" + tag, minev > 0.0, "min eigenvalue " + sci(minev));
    });
    S.guarded("kahler_family", "closedness" + tag, [&] {
      double worst = 0.0;
      for (size_t i = 0; i < 4; ++i)
        for (double q : {0.0, 0.5, 1.0}) worst = std::max(worst, closedness_residual(model, from_radius_zero(model, pts[i], 0.08), {eps, q}));
      S.bound("kahler_family", "closedness" + tag, worst, 1e-6);
    });
    S.guarded("kahler_family", "potentials" + tag, [&] {
      double dc = 0.0, ddc = 0.0, flat = 0.0;
      for (size_t i = 0; i < 4; ++i) {
        const HybridPoint p = from_radius_zero(model, pts[i], 0.08);
        const auto ps = potential_sharp_check(model, p);
        dc = std::max(dc, ps.dc_residual);
        ddc = std::max(ddc, ps.ddc_residual);
        flat = std::max(flat, potential_flat(model, p).residual);
      }
      S.bound("kahler_family", "d^c phi_sharp = lambda_sharp" + tag, dc, 1e-6);
      S.bound("kahler_family", "dd^c phi_sharp = omega_sharp" + tag, ddc, 1e-5);
      S.bound("kahler_family", "phi_flat identity" + tag, flat, 1e-6);
    });
    S.guarded("kahler_family", "c+ constant at radius zero" + tag, [&] {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      const double target = cplus_limit(model, c.id, eps);
      for (const auto& p : pts) {
        const double v = cplus(model, p, {eps, 0.0});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      S.bound("kahler_family", "c+ spread at radius zero" + tag, hi - lo, 1e-10);
      S.bound("kahler_family", "c+ equals eps^n (n+1) |c0|^-2" + tag, std::max(std::abs(hi - target), std::abs(lo - target)),
              1e-10 * std::max(1.0, target));
    });
    S.guarded("fibration_flow", "monodromy field" + tag, [&] {
      double worst = 0.0;
      for (const auto& p : pts)
        worst = std::max(worst, (symplectic_lift(model, p, {eps, 1.0}, 0.0, 1.0).v - monodromy_field(model, p)).cwiseAbs().maxCoeff());
      S.bound("fibration_flow", "q=1 lift matches monodromy field" + tag, worst, 1e-10);
    });
    S.guarded("fibration_flow", "transport" + tag, [&] {
      const int n = c.N() - 1;
      const int grid = n == 1 ? 32 : 16;
      TorusFiber F = radius_zero_torus(model, c.id, pts[0].w, pts[0].theta, grid);
      const AdmissiblePath path = AdmissiblePath::parse("t=h,q=h^2");
      TransportOptions o;
      o.steps = 32;
      o.eps = eps;
      const TorusFiber G = transport(model, F, path, 0.05, o);
      double fdev = 0.0, cons = 0.0;
      for (const auto& p : G.samples) {
        double logf = 0.0, total = 0.0;
        const Eigen::VectorXcd z = model.to_z(p);
        for (int k = 0; k < c.N(); ++k) {
          logf += c.m[static_cast<size_t>(k)] * std::log(std::abs(z(k)));
          total += c.m[static_cast<size_t>(k)] * p.th(k);
        }
        fdev = std::max(fdev, std::abs(std::exp(logf) - std::exp(-1.0 / path.t(0.05))) / std::exp(-1.0 / path.t(0.05)));
        cons = std::max(cons, std::abs(std::remainder(total - F.theta0, 2.0 * M_PI)));
      }
      S.flag("fibration_flow", "transport stays in the chart" + tag, !G.escaped, G.escaped ? "escaped" : "no escape");
      S.bound("fibration_flow", "|f| preserved (relative)" + tag, fdev, 1e-8);
      S.bound("fibration_flow", "fiber constraint sum m theta = theta" + tag, cons, 1e-12);
      if (n >= 2) S.bound("fibration_flow", "Lagrangian residual at h = 0.05" + tag, lagrangian_residual(model, G, {eps, path.q(0.05)}), 1e-5);
    });
  }

  if (model.type() == ModelType::Hesse) {
    S.guarded("hybrid_coords", "Hesse chart transition", [&] {
      double rt = 0.0, fpres = 0.0;
      std::uniform_real_distribution<double> U(0.0, 1.0);
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 20; ++i) {
          Eigen::Vector2d w(0.05 + 0.2 * U(rng), 0.0);
          w(1) = 1.0 - w(0);
          const double t = 0.02 + 0.03 * U(rng);
          HybridPoint p0 = radius_zero_point(model, k, w, 2 * M_PI * U(rng), Eigen::VectorXd::Constant(1, 2 * M_PI * U(rng)));
          const HybridPoint p = from_radius_zero(model, p0, t);
          const HybridPoint q = hesse_chart_transition(model, p);
          const HybridPoint r = hesse_chart_transition_inverse(model, q);
          rt = std::max(rt, (r.w - p.w).cwiseAbs().maxCoeff());
          rt = std::max(rt, std::abs(std::remainder(r.th(0) - p.th(0), 2 * M_PI)));
          fpres = std::max(fpres, std::abs(q.t - p.t));
        }
      S.bound("hybrid_coords", "Hesse transition round trip", rt, 1e-12);
      S.bound("hybrid_coords", "Hesse transition preserves |f|", fpres, 1e-14);
    });
  }
}

}  // namespace

std::vector<CheckResult> verify_model(const ModelFile& file, const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  Suite S(out);
  std::mt19937_64 rng(opt.seed);
  combinatorial_checks(S, file, rng, opt);
  if (file.type != ModelType::Snc) {
    const Model model = Model::from_file(file);
    analytic_checks(S, model, rng, opt);
  }
  return out;
}

}  // namespace syz
