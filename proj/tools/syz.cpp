// syz: command-line front end. Every subcommand writes structured records,
// one JSON object per line, to stdout or to --out.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "syz/diagnostics.hpp"
#include "syz/dual_complex.hpp"
#include "syz/errors.hpp"
#include "syz/expanded_skeleton.hpp"
#include "syz/fibration_flow.hpp"
#include "syz/hybrid_coords.hpp"
#include "syz/kahler_family.hpp"
#include "syz/model.hpp"
#include "syz/verify.hpp"

using json = nlohmann::ordered_json;
using namespace syz;

namespace {

constexpr int kExitCheck = 1;
constexpr int kExitInput = 2;

[[noreturn]] void input_error(const std::string& op, const std::string& what) {
  throw Error(ErrorKind::Parse, "cli", op, what);
}

// ---------------------------------------------------------------- output

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorKind::Range, "cli", "output", "cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  void record(const json& j) { os() << j.dump() << '\n'; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

json ids(const IndexSet& s) { return json(s); }

json cplx(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json point_json(const HybridPoint& p) {
  json j;
  j["chart"] = p.chart;
  j["t"] = p.t;
  j["theta"] = p.theta;
  j["w"] = vec(p.w);
  j["theta_i"] = vec(p.th);
  if (!p.residual.empty()) {
    json r = json::array();
    for (auto z : p.residual) r.push_back(cplx(z));
    j["residual"] = r;
  }
  return j;
}

// ---------------------------------------------------------------- parsing

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

double number(const std::string& text, const std::string& what) {
  size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)) != "") input_error("parse", what + ": expected a number, got '" + text + "'");
  return x;
}

std::vector<double> numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(number(trim(part), what));
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// "chart=0;t=0.25;w=0.5,0.5;theta=0;th=0.1" (th lists theta_2..theta_N) or
// "chart=0;z=0.1:0.2,0.05" with complex entries written re:im.
HybridPoint parse_point(const Model& model, const std::string& spec) {
  int chart = 0;
  double t = 0.0, theta = 0.0;
  std::optional<std::vector<double>> w, th;
  std::optional<std::vector<std::complex<double>>> z;
  for (const auto& raw : split(spec, ';')) {
    const std::string item = trim(raw);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) input_error("parse_point", "expected key=value, got '" + item + "'");
    const std::string key = trim(item.substr(0, eq)), val = trim(item.substr(eq + 1));
    if (key == "chart") chart = static_cast<int>(number(val, "chart"));
    else if (key == "t") t = number(val, "t");
    else if (key == "theta") theta = number(val, "theta");
    else if (key == "w") w = numbers(val, "w");
    else if (key == "th") th = numbers(val, "th");
    else if (key == "z") {
      z.emplace();
      for (const auto& e : split(val, ',')) {
        const auto parts = split(trim(e), ':');
        if (parts.empty() || parts.size() > 2) input_error("parse_point", "bad complex entry '" + e + "'");
        z->emplace_back(number(parts[0], "z"), parts.size() == 2 ? number(parts[1], "z") : 0.0);
      }
    } else {
      input_error("parse_point", "unknown key '" + key + "'");
    }
  }
  const ModelChart& c = model.chart(chart);
  if (z) {
    if (static_cast<int>(z->size()) != c.N()) input_error("parse_point", "z needs " + std::to_string(c.N()) + " entries");
    Eigen::VectorXcd zz(c.N());
    for (int k = 0; k < c.N(); ++k) zz(k) = (*z)[static_cast<size_t>(k)];
    return model.from_z(chart, zz);
  }
  if (!w) input_error("parse_point", "point needs w=... or z=...");
  if (static_cast<int>(w->size()) != c.N()) input_error("parse_point", "w needs " + std::to_string(c.N()) + " entries");
  Eigen::VectorXd rest = Eigen::VectorXd::Zero(c.N() - 1);
  if (th) {
    if (static_cast<int>(th->size()) != c.N() - 1)
      input_error("parse_point", "th lists theta_2..theta_N (" + std::to_string(c.N() - 1) + " entries)");
    rest = to_vector(*th);
  }
  if (t < 0.0) throw Error(ErrorKind::Range, "cli", "parse_point", "t must be >= 0");
  const HybridPoint p0 = radius_zero_point(model, chart, to_vector(*w), theta, rest);
  return t > 0.0 ? from_radius_zero(model, p0, t) : p0;
}

std::vector<Eigen::VectorXd> parse_levels(const std::string& spec, const ModelChart& c) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon), rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "segment") {
    const auto v = numbers(rest, "levels");
    if (v.size() != 3 || c.N() != 2) input_error("levels", "segment:lo,hi,count needs a chart with two components");
    return segment_levels(v[0], v[1], static_cast<int>(v[2]));
  }
  if (kind == "simplex") return simplex_levels(c.N(), static_cast<int>(number(rest, "levels")));
  if (kind == "list") {
    std::vector<Eigen::VectorXd> out;
    for (const auto& w : split(rest, ';')) {
      const auto v = numbers(w, "levels");
      if (static_cast<int>(v.size()) != c.N()) input_error("levels", "each level needs " + std::to_string(c.N()) + " entries");
      out.push_back(to_vector(v));
    }
    return out;
  }
  input_error("levels", "expected segment:lo,hi,count, simplex:k or list:w;w;..., got '" + spec + "'");
}

QMode parse_mode(const std::string& s) {
  if (s == "instantaneous") return QMode::Instantaneous;
  if (s == "fixed") return QMode::Fixed;
  input_error("mode", "expected instantaneous or fixed, got '" + s + "'");
}

// ---------------------------------------------------------------- state

struct Options {
  std::string model;
  std::string out;
  std::uint64_t seed = 20240611;
  // skeleton
  bool essential = false, classify = false, pseudo = false;
  int resolution = 0;
  // eval / eval-form
  std::string point;
  double eps = 0.1, q = 1.0;
  std::string check;
  double tol = -1.0;
  // trace / diagnose
  int chart = 0;
  std::string base, path, schedule = "geometric:1e-1,1e-4,8", suite = "all", levels, mode = "instantaneous";
  double theta = 0.0, h = 0.05;
  int grid = 32, steps = 64;
  bool table = false;
};

ModelFile load(const Options& o) {
  if (o.model.empty()) input_error("load_model", "--model is required");
  return load_model_file(resolve_model_path(o.model));
}

// ---------------------------------------------------------------- skeleton

std::string shape_of(const Skeleton& sk, const PseudomanifoldVerdict& pv) {
  const int size = static_cast<int>(sk.S.size());
  if (sk.dim() < 0) return "empty";
  if (static_cast<long>(sk.faces.size()) == (1L << size) - 1) return "simplex of dimension " + std::to_string(size - 1);
  if (sk.dim() == 1 && pv.ok) {
    if (size == 3) return "triangle";
    if (size == 4) return "square";
    return "cycle of " + std::to_string(size) + " vertices";
  }
  return "complex of dimension " + std::to_string(sk.dim());
}

int cmd_skeleton(const Options& o) {
  const ModelFile mf = load(o);
  const SncDegeneration& d = mf.degeneration;
  const IndexSet S = o.essential ? essential_set(d) : d.ids();
  const Skeleton sk = build_skeleton(d, S);
  const PseudomanifoldVerdict pv = pseudomanifold_check(sk);
  Sink out(o.out);
  json counts = json::array();
  for (int k = 0; k <= std::max(sk.dim(), 0); ++k) {
    long c = 0;
    for (const auto& I : sk.faces) c += static_cast<int>(I.size()) == k + 1;
    counts.push_back(c);
  }
  json rec{{"record", "skeleton"}, {"model", mf.name}, {"essential", o.essential}, {"S", ids(S)},
           {"dim", sk.dim()}, {"face_counts", counts}, {"shape", shape_of(sk, pv)}};
  json faces = json::array();
  for (const auto& I : sk.faces) faces.push_back(ids(I));
  rec["faces"] = faces;
  if (o.resolution > 0) rec["diameter"] = SkeletonMesh(sk, o.resolution).diameter();
  out.record(rec);
  if (o.classify)
    for (const auto& [face, cls] : classify_faces(sk)) out.record({{"record", "face"}, {"face", ids(face)}, {"class", to_string(cls)}});
  if (o.pseudo) {
    json v = json::array();
    for (const auto& I : pv.violations) v.push_back(ids(I));
    out.record({{"record", "pseudomanifold"}, {"ok", pv.ok}, {"maximal_dimension", pv.maximal_dimension},
                {"connected", pv.connected}, {"violations", v}, {"reason", pv.reason}});
  }
  return 0;
}

// ---------------------------------------------------------------- expand

int cmd_expand(const Options& o) {
  const ModelFile mf = load(o);
  const SncDegeneration& d = mf.degeneration;
  const Skeleton sk = build_skeleton(d, essential_set(d));
  const ExpandedSkeleton E = build_expanded(sk, mf.ivies);
  json cells = json::array();
  for (const auto& c : E.cells)
    cells.push_back({{"id", c.id}, {"kind", c.kind == CellKind::Maximal ? "maximal" : "submaximal"}, {"face", ids(c.face)},
                     {"ivy_edge", c.ivy_edge}});
  json glue = json::array();
  for (const auto& g : E.gluings)
    glue.push_back({{"submaximal_cell", g.submaximal_cell}, {"maximal_cell", g.maximal_cell}, {"end", g.upper_end ? "upper" : "lower"}});
  json ivies = json::array();
  for (const auto& [face, ivy] : E.ivies) {
    json edges = json::array();
    for (const auto& e : ivy.edges) {
      json je{{"lower", e.lower}, {"upper", e.upper}, {"lo", e.lo}};
      je["hi"] = std::isinf(e.hi) ? json("inf") : json(e.hi);
      je["glue_lower"] = ids(e.glue_lower);
      je["glue_upper"] = ids(e.glue_upper);
      edges.push_back(je);
    }
    json verts = json::array();
    for (const auto& v : ivy.vertices) verts.push_back({{"id", v.id}, {"level", v.level}, {"degree", v.degree}});
    ivies.push_back({{"face", ids(face)}, {"vertices", verts}, {"edges", edges}, {"ram", ivy.ram()}, {"boundary", ivy.boundary()}});
  }
  json adj = json::array();
  for (auto [a, b] : E.adjacency()) adj.push_back({a, b});
  Sink out(o.out);
  out.record({{"record", "expanded_skeleton"}, {"model", mf.name}, {"S", ids(sk.S)}, {"cells", cells}, {"gluings", glue},
              {"ivies", ivies}, {"adjacency", adj}, {"ram_empty", E.ram_empty()},
              {"outer_boundary_empty", E.outer_boundary_empty()}, {"euler_characteristic", E.euler_characteristic()}});
  return 0;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const Options& o) {
  const Model model = Model::from_file(load(o));
  const HybridPoint p = parse_point(model, o.point);
  Sink out(o.out);
  json rec{{"record", "basic_functions"}, {"model", model.file().name}, {"point", point_json(p)}};
  if (!(p.t > 0.0)) {
    // radius-zero branch: only the tropical data is defined
    Eigen::VectorXd u(p.w.size());
    for (Eigen::Index k = 0; k < p.w.size(); ++k) u(k) = eta(p.w(k));
    rec["t"] = 0.0;
    rec["w"] = vec(p.w);
    rec["u"] = vec(u);
    out.record(rec);
    return 0;
  }
  const BasicFunctionRecord b = basic_functions(model, p);
  rec["t"] = b.t;
  rec["g"] = b.g;
  rec["r"] = vec(b.r);
  rec["s"] = vec(b.s);
  rec["t_i"] = vec(b.ti);
  rec["w"] = vec(b.w);
  rec["u"] = vec(b.u);
  rec["v"] = vec(b.v);
  rec["sigma"] = vec(b.sigma);
  out.record(rec);
  return 0;
}

int cmd_eval_form(const Options& o) {
  const Model model = Model::from_file(load(o));
  if (o.q < 0.0 || o.q > 1.0) throw Error(ErrorKind::Range, "cli", "eval-form", "q must lie in [0, 1]");
  if (!(o.eps > 0.0)) throw Error(ErrorKind::Range, "cli", "eval-form", "eps must be positive");
  const HybridPoint p = parse_point(model, o.point);
  const FormParams fp{o.eps, o.q};
  Sink out(o.out);
  const FormValue W = omega_q(model, p, fp);
  json rec{{"record", "form"}, {"point", point_json(p)}, {"eps", o.eps}, {"q", o.q}, {"basis", W.basis},
           {"omega_q", mat(W.matrix)}, {"omega_X", mat(omega_X(model, p).matrix)}, {"omega_flat", mat(omega_flat(model, p).matrix)}};
  try {
    rec["omega_sharp"] = mat(omega_sharp(model, p).matrix);
  } catch (const Error& e) {
    rec["omega_sharp"] = e.what();
  }
  const Eigen::MatrixXd F = restrict_form(W.matrix, fiber_basis(model.chart(p.chart)));
  rec["fiber_omega"] = mat(F);
  if (p.t > 0.0) {
    const MetricReport g = metric_g(model, p, fp);
    rec["fiber_metric"] = mat(g.fiber);
    rec["metric_eigenvalues"] = vec(g.eigenvalues);
  }
  out.record(rec);
  if (o.check.empty()) return 0;

  json verdict{{"record", "verdict"}, {"check", o.check}};
  bool passed = true;
  if (o.check == "pairing") {
    const double tol = o.tol > 0 ? o.tol : 1e-12;
    const PairingReport r = pairing_check(model, p, fp);
    passed = r.residual <= tol;
    verdict["residual"] = r.residual;
    verdict["tolerance"] = tol;
    verdict["c"] = r.c;
    verdict["degenerate"] = r.degenerate;
  } else if (o.check == "potential") {
    const double tol = o.tol > 0 ? o.tol : 1e-5;
    const SharpPotentialCheck s = potential_sharp_check(model, p);
    const FlatPotential f = potential_flat(model, p);
    passed = s.ddc_residual <= tol && f.residual <= 1e-6;
    verdict["phi_sharp"] = potential_sharp(model, p);
    verdict["dc_residual"] = s.dc_residual;
    verdict["ddc_residual"] = s.ddc_residual;
    verdict["phi_flat"] = f.value;
    verdict["flat_residual"] = f.residual;
    verdict["tolerance"] = tol;
  } else if (o.check == "cplus") {
    const double tol = o.tol > 0 ? o.tol : 1e-10;
    const double v = cplus(model, p, fp), lim = cplus_limit(model, p.chart, o.eps);
    verdict["cplus"] = v;
    verdict["limit"] = lim;
    verdict["tolerance"] = tol;
    // equality with the closed form is expected at radius zero with q = 0
    if (p.t == 0.0 && o.q == 0.0) passed = std::abs(v - lim) <= tol * std::max(1.0, lim);
  } else {
    input_error("eval-form", "unknown check '" + o.check + "' (pairing, potential, cplus)");
  }
  verdict["passed"] = passed;
  out.record(verdict);
  return passed ? 0 : kExitCheck;
}

// ---------------------------------------------------------------- trace

int cmd_trace(const Options& o) {
  const Model model = Model::from_file(load(o));
  const ModelChart& c = model.chart(o.chart);
  std::string base = trim(o.base);
  if (base.rfind("w=", 0) == 0) base = base.substr(2);
  const auto w = numbers(base, "base");
  if (static_cast<int>(w.size()) != c.N()) input_error("trace", "--base needs " + std::to_string(c.N()) + " w entries");
  if (o.grid < 1 || o.steps < 1) throw Error(ErrorKind::Range, "cli", "trace", "grid and steps must be positive");
  if (!(o.h > 0.0)) throw Error(ErrorKind::Range, "cli", "trace", "h must be positive");
  const AdmissiblePath path = AdmissiblePath::parse(o.path.empty() ? "t=h,q=h^2" : o.path);
  const TorusFiber F0 = radius_zero_torus(model, o.chart, to_vector(w), o.theta, o.grid);
  TransportOptions to;
  to.steps = o.steps;
  to.eps = o.eps;
  to.mode = parse_mode(o.mode);
  const TorusFiber F = transport(model, F0, path, o.h, to);
  const FormParams fp{o.eps, F.q};
  double lag = 0.0;
  if (o.grid >= 8) lag = lagrangian_residual(model, F, fp);
  const double fexact = std::exp(-1.0 / F.t);

  Sink out(o.out);
  std::ostream& os = out.os();
  os << std::setprecision(17) << "sample,h,chart,t";
  for (int k = 1; k <= c.N(); ++k) os << ",w_" << k;
  for (int k = 1; k <= c.N(); ++k) os << ",theta_" << k;
  os << ",f_rel_error,angle_constraint_error,lagrangian_residual\n";
  double worst_f = 0.0;
  for (size_t s = 0; s < F.samples.size(); ++s) {
    const HybridPoint& p = F.samples[s];
    const Eigen::VectorXcd z = model.to_z(p);
    double logf = 0.0, total = 0.0;
    for (int k = 0; k < c.N(); ++k) {
      logf += c.m[static_cast<size_t>(k)] * std::log(std::abs(z(k)));
      total += c.m[static_cast<size_t>(k)] * p.th(k);
    }
    const double ferr = std::abs(std::exp(logf) - fexact) / fexact;
    const double target = path.has_theta() ? path.theta(o.h) : F0.theta0;
    worst_f = std::max(worst_f, ferr);
    os << s << ',' << o.h << ',' << p.chart << ',' << p.t;
    for (int k = 0; k < c.N(); ++k) os << ',' << p.w(k);
    for (int k = 0; k < c.N(); ++k) os << ',' << p.th(k);
    os << ',' << ferr << ',' << std::abs(std::remainder(total - target, 2.0 * M_PI)) << ',' << lag << '\n';
  }
  json summary{{"record", "trace"}, {"model", model.file().name}, {"path", path.spec()}, {"h", o.h}, {"t", F.t}, {"q", F.q},
               {"samples", F.samples.size()}, {"escaped", F.escaped}, {"lagrangian_residual", lag}, {"max_f_rel_error", worst_f}};
  (o.out.empty() ? std::cerr : std::cout) << summary.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------- diagnose

int cmd_diagnose(const Options& o) {
  const Model model = Model::from_file(load(o));
  const ModelChart& c = model.chart(o.chart);
  const std::vector<std::string> known{"gh", "volume", "cplus", "phase", "calibration", "metric", "all"};
  if (std::find(known.begin(), known.end(), o.suite) == known.end()) input_error("diagnose", "unknown suite '" + o.suite + "'");
  const auto want = [&](const char* s) { return o.suite == "all" || o.suite == s; };
  SweepConfig cfg;
  cfg.path = AdmissiblePath::parse(o.path.empty() ? "t=h,q=h" : o.path);
  cfg.schedule = parse_schedule(o.schedule);
  cfg.eps = o.eps;
  cfg.chart = o.chart;
  cfg.grid = o.grid;
  cfg.steps = o.steps;
  cfg.mode = parse_mode(o.mode);
  cfg.theta = o.theta;
  const std::string levels = !o.levels.empty() ? o.levels : (c.N() == 2 ? "segment:0.2,0.8,13" : "simplex:4");
  cfg.levels = parse_levels(levels, c);

  Sink out(o.out);
  out.record({{"record", "diagnose"}, {"model", model.file().name}, {"suite", o.suite}, {"path", cfg.path.spec()},
              {"admissible", cfg.path.admissible()}, {"tame", cfg.path.tame()}, {"schedule", cfg.schedule}, {"eps", cfg.eps},
              {"grid", cfg.grid}, {"steps", cfg.steps}, {"levels", cfg.levels.size()}});
  const bool need_sweep = want("gh") || want("cplus") || want("phase") || want("calibration") || want("metric");
  PathSweep sweep;
  if (need_sweep) sweep = run_sweep(model, cfg);

  const auto skipped = [&](const char* s, const std::string& why) {
    out.record({{"record", "skipped"}, {"suite", s}, {"reason", why}});
  };
  if (want("metric")) {
    for (const auto& r : metric_limit_check(model, sweep))
      out.record({{"suite", "metric"}, {"h", r.h}, {"t", r.t}, {"q", r.q}, {"residual", r.residual}, {"theta_length", r.theta_length}});
  }
  if (want("gh")) {
    if (model.n() != 1) {
      skipped("gh", "the distortion certificate is implemented for n = 1");
    } else {
      const GHReport g = gh_distortion(model, sweep);
      for (const auto& r : g.records)
        out.record({{"suite", "gh"}, {"h", r.h}, {"t", r.t}, {"q", r.q}, {"distortion", r.distortion},
                    {"torus_diameter", r.torus_diameter}, {"lower_violation", r.lower_violation},
                    {"upper_violation", r.upper_violation}, {"diameter", r.diameter}, {"band_ok", r.band_ok}, {"pairs", r.pairs}});
      out.record({{"suite", "gh"}, {"summary", true}, {"monotone", g.monotone}, {"band_ok", g.band_ok}});
    }
  }
  if (want("volume")) {
    if (model.type() != ModelType::Hesse) {
      skipped("volume", "the volume fraction is implemented for the hesse model");
    } else {
      for (const auto& r : volume_fraction_sweep(model, cfg.path, cfg.schedule))
        out.record({{"suite", "volume"}, {"h", r.h}, {"t", r.t}, {"numerator", r.numerator}, {"denominator", r.denominator},
                    {"ratio", r.ratio}, {"error_estimate", r.error_estimate}});
    }
  }
  if (want("cplus")) {
    for (const auto& r : ricci_flat_trend(model, sweep))
      out.record({{"suite", "cplus"}, {"h", r.h}, {"t", r.t}, {"q", r.q}, {"min", r.min}, {"max", r.max}, {"mean", r.mean},
                  {"spread", r.spread}, {"limit", r.limit}, {"used", r.used}, {"excluded", r.excluded}});
  }
  std::optional<PhaseReport> phase;
  if (want("phase") || want("calibration")) phase = phase_specialty(model, sweep);
  if (want("phase")) {
    if (!phase->tame) skipped("phase", "path is not tame; records are reported but carry no limit statement");
    for (const auto& r : phase->records)
      out.record({{"suite", "phase"}, {"h", r.h}, {"t", r.t}, {"deviation", r.deviation}, {"winding", r.winding},
                  {"max_modulus_error", r.max_modulus_error}, {"varpi0", cplx(phase->varpi0)}});
  }
  if (want("calibration")) {
    for (const auto& r : calibration_ratio(model, sweep, phase->varpi0))
      out.record({{"suite", "calibration"}, {"h", r.h}, {"t", r.t}, {"metric_volume", r.metric_volume},
                  {"calibrated", r.calibrated}, {"ratio", r.ratio}});
  }
  return 0;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Options& o) {
  const ModelFile mf = load(o);
  VerifyOptions vo;
  vo.seed = o.seed;
  vo.eps = o.eps;
  const auto results = verify_model(mf, vo);
  Sink out(o.out);
  size_t failed = 0;
  for (const auto& r : results) failed += !r.passed;
  if (o.table) {
    std::ostream& os = out.os();
    for (const auto& r : results)
      os << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(18) << r.module << std::setw(58) << r.name << r.detail << '\n';
    os << results.size() - failed << "/" << results.size() << " checks passed\n";
  } else {
    for (const auto& r : results)
      out.record({{"record", "check"}, {"module", r.module}, {"name", r.name}, {"passed", r.passed}, {"value", r.value},
                  {"tolerance", r.tolerance}, {"detail", r.detail}});
    out.record({{"record", "summary"}, {"model", mf.name}, {"seed", o.seed}, {"checks", results.size()}, {"failed", failed}});
  }
  return failed == 0 ? 0 : kExitCheck;
}

bool input_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidModel:
    case ErrorKind::InvalidIvy:
    case ErrorKind::Gluing:
    case ErrorKind::Range:
    case ErrorKind::Domain:
    case ErrorKind::ChartBoundary:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syz: skeletons, hybrid coordinates and Lagrangian torus fibrations of degenerations"};
  app.set_config("--config", "", "TOML/INI file with option values (flags override)");
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "random seed for sampled checks");

  const auto model_opts = [&](CLI::App* s) {
    s->add_option("--model", o.model, "model file, or a name in $SYZ_MODEL_DIR")->required();
    s->add_option("--out", o.out, "output file (default stdout)");
  };
  auto* sk = app.add_subcommand("skeleton", "dual complex of the special fiber");
  model_opts(sk);
  sk->add_flag("--essential", o.essential, "restrict to the essential set");
  sk->add_flag("--classify", o.classify, "emit the maximal/submaximal classification");
  sk->add_flag("--pseudomanifold", o.pseudo, "emit the pseudomanifold verdict");
  sk->add_option("--diameter-resolution", o.resolution, "mesh resolution for the intrinsic diameter")->check(CLI::PositiveNumber);

  auto* ex = app.add_subcommand("expand", "expanded skeleton with ivies");
  model_opts(ex);

  auto* ev = app.add_subcommand("eval", "basic functions at a point");
  model_opts(ev);
  ev->add_option("--point", o.point, "chart=..;t=..;w=..;theta=..;th=.. or chart=..;z=re:im,...")->required();

  auto* ef = app.add_subcommand("eval-form", "the Kahler family at a point");
  model_opts(ef);
  ef->add_option("--point", o.point, "point, as for eval")->required();
  ef->add_option("--eps", o.eps, "epsilon");
  ef->add_option("--q", o.q, "interpolation parameter in [0, 1]");
  ef->add_option("--check", o.check, "pairing | potential | cplus");
  ef->add_option("--tol", o.tol, "tolerance override for the check");

  auto* tr = app.add_subcommand("trace", "transport a radius-zero torus");
  tr->set_help_flag("--help", "print this help message and exit");
  model_opts(tr);
  tr->add_option("--chart", o.chart, "maximal chart id");
  tr->add_option("--base", o.base, "radius-zero level, w=w1,...,wN")->required();
  tr->add_option("--theta", o.theta, "total angle of the fiber");
  tr->add_option("--path", o.path, "admissible path (default t=h,q=h^2)");
  tr->add_option("--h", o.h, "target path parameter");
  tr->add_option("--grid", o.grid, "samples per circle factor");
  tr->add_option("--steps", o.steps, "RK4 steps");
  tr->add_option("--eps", o.eps, "epsilon");
  tr->add_option("--mode", o.mode, "instantaneous | fixed");

  auto* dg = app.add_subcommand("diagnose", "limit experiments along an h-schedule");
  model_opts(dg);
  dg->add_option("--suite", o.suite, "gh | volume | cplus | phase | calibration | metric | all");
  dg->add_option("--path", o.path, "admissible path (default t=h,q=h)");
  dg->add_option("--schedule", o.schedule, "geometric:a,b,k or list:h1,h2,...");
  dg->add_option("--levels", o.levels, "segment:lo,hi,count | simplex:k | list:w;w;...");
  dg->add_option("--chart", o.chart, "maximal chart id");
  dg->add_option("--theta", o.theta, "total angle of the fibers");
  dg->add_option("--grid", o.grid, "samples per circle factor");
  dg->add_option("--steps", o.steps, "RK4 steps per transport");
  dg->add_option("--eps", o.eps, "epsilon");
  dg->add_option("--mode", o.mode, "instantaneous | fixed");

  auto* vf = app.add_subcommand("verify", "run the invariant suite");
  model_opts(vf);
  vf->add_option("--eps", o.eps, "epsilon");
  vf->add_flag("--table", o.table, "aligned text table instead of records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*sk) return cmd_skeleton(o);
    if (*ex) return cmd_expand(o);
    if (*ev) return cmd_eval(o);
    if (*ef) return cmd_eval_form(o);
    if (*tr) return cmd_trace(o);
    if (*dg) return cmd_diagnose(o);
    if (*vf) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << json{{"record", "error"}, {"kind", to_string(e.kind())}, {"module", e.module()}, {"operation", e.op()},
                      {"message", e.what()}}
                     .dump()
              << '\n';
    return input_kind(e.kind()) ? kExitInput : kExitCheck;
  } catch (const std::exception& e) {
    std::cerr << json{{"record", "error"}, {"message", e.what()}}.dump() << '\n';
    return kExitCheck;
  }
  return 0;
}
