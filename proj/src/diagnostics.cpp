#include "syz/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "syz/errors.hpp"
#include "syz/transfer.hpp"

namespace syz {

using cplx = std::complex<double>;

std::vector<double> parse_schedule(const std::string& spec) {
  auto bad = [&](const std::string& why) {
    throw Error(ErrorKind::Parse, "diagnostics", "schedule", "'" + spec + "': " + why);
  };
  const auto colon = spec.find(':');
  if (colon == std::string::npos) bad("expected geometric:a,b,k or list:h1,...");
  const std::string kind = spec.substr(0, colon);
  std::vector<double> vals;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) bad("trailing characters in '" + item + "'");
    } catch (const std::logic_error&) {
      bad("not a number: '" + item + "'");
    }
  }
  std::vector<double> h;
  if (kind == "geometric") {
    if (vals.size() != 3) bad("geometric needs a,b,k");
    const double a = vals[0], b = vals[1];
    const int k = static_cast<int>(vals[2]);
    if (!(a > 0 && b > 0 && a > b) || k < 2 || vals[2] != k) bad("need a > b > 0 and an integer k >= 2");
    for (int i = 0; i < k; ++i) h.push_back(a * std::pow(b / a, static_cast<double>(i) / (k - 1)));
    h.back() = b;
  } else if (kind == "list") {
    h = vals;
  } else {
    bad("unknown schedule kind '" + kind + "'");
  }
  for (size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] >= 0.0)) bad("h must be non-negative");
    if (i > 0 && !(h[i] < h[i - 1])) bad("schedule must be strictly decreasing");
  }
  return h;
}

FormParams PathSweep::params(size_t k) const {
  const auto& F = fibers[k].front();
  return FormParams{config.eps, F.q};
}

PathSweep run_sweep(const Model& model, const SweepConfig& config) {
  if (config.levels.empty()) throw Error(ErrorKind::Range, "diagnostics", "sweep", "no torus levels given");
  PathSweep S;
  S.config = config;
  S.h = config.schedule;
  for (double h : S.h) {
    std::vector<TorusFiber> row;
    for (const auto& w : config.levels) {
      TorusFiber F0 = radius_zero_torus(model, config.chart, w, config.theta, config.grid);
      TransportOptions opt;
      opt.steps = config.steps;
      opt.eps = config.eps;
      opt.mode = config.mode;
      TorusFiber F = transport(model, F0, config.path, h, opt);
      if (h == 0.0) F.q = config.path.q(0.0);
      row.push_back(std::move(F));
    }
    S.fibers.push_back(std::move(row));
  }
  return S;
}

std::vector<Eigen::VectorXd> segment_levels(double lo, double hi, int count) {
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1);
    out.push_back(Eigen::Vector2d(1.0 - x, x));
  }
  return out;
}

std::vector<Eigen::VectorXd> simplex_levels(int N, int per_edge) {
  // points k/(per_edge + 1) with all k_i >= 1
  std::vector<Eigen::VectorXd> out;
  const int D = per_edge + 1;
  std::vector<int> k(static_cast<size_t>(N), 1);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == N - 1) {
      if (left < 1) return;
      k[static_cast<size_t>(pos)] = left;
      Eigen::VectorXd w(N);
      for (int i = 0; i < N; ++i) w(i) = static_cast<double>(k[static_cast<size_t>(i)]) / D;
      out.push_back(w);
      return;
    }
    for (int v = 1; v <= left - (N - 1 - pos); ++v) {
      k[static_cast<size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, D);
  return out;
}

// ---------------------------------------------------------------- metrics

Eigen::MatrixXd limit_metric(const ModelChart& c, double eps) {
  const int n = c.N() - 1;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Eigen::MatrixXd B = fiber_basis(c);
  for (int i = 0; i < c.N(); ++i) {
    const Eigen::RowVectorXd dw = grad_w(c, i) * B;
    L += dw.transpose() * dw;
  }
  return eps * L;
}

namespace {

// (t g) on the fiber at positive radius; at t = 0 the limit of t g, which is
// eps (1 - q) sum dw^2 and vanishes on angle directions.
Eigen::MatrixXd rescaled_metric(const Model& model, const HybridPoint& p, const FormParams& fp) {
  const ModelChart& c = model.chart(p.chart);
  if (p.t == 0.0) return (1.0 - fp.q) * limit_metric(c, fp.eps);
  return p.t * metric_g(model, p, fp).fiber;
}

// Limit of (t g)/t^2 on angle directions at radius zero.
Eigen::MatrixXd angle_metric_limit(const ModelChart& c, const HybridPoint& p, const FormParams& fp) {
  const int n = c.N() - 1;
  const Eigen::MatrixXd T = torus_basis(c);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < c.N(); ++i) {
    const double m = c.m[static_cast<size_t>(i)];
    const Eigen::RowVectorXd dth = T.row(hybrid_th_index(c, i));
    M += fp.eps * ((1.0 - fp.q) * m * m + fp.q * m * eta_prime(p.w(i))) * dth.transpose() * dth;
  }
  return M;
}

// fiber-coordinate components (w_j, theta_j)_{j >= 2} of a hybrid vector
Eigen::VectorXd fiber_components(const ModelChart& c, const Eigen::VectorXd& v) {
  const int n = c.N() - 1;
  Eigen::VectorXd x(2 * n);
  for (int j = 1; j < c.N(); ++j) {
    x(2 * (j - 1)) = v(hybrid_w_index(j));
    x(2 * (j - 1) + 1) = v(hybrid_th_index(c, j));
  }
  return x;
}

Eigen::VectorXd fiber_difference(const ModelChart& c, const HybridPoint& a, const HybridPoint& b) {
  const int n = c.N() - 1;
  Eigen::VectorXd x(2 * n);
  for (int j = 1; j < c.N(); ++j) {
    x(2 * (j - 1)) = a.w(j) - b.w(j);
    x(2 * (j - 1) + 1) = std::remainder(a.th(j) - b.th(j), 2.0 * M_PI);
  }
  return x;
}

std::vector<double> dijkstra(const std::vector<std::vector<std::pair<int, double>>>& adj, int src) {
  std::vector<double> d(adj.size(), std::numeric_limits<double>::infinity());
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
  d[static_cast<size_t>(src)] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > d[static_cast<size_t>(u)]) continue;
    for (auto [v, len] : adj[static_cast<size_t>(u)]) {
      if (du + len < d[static_cast<size_t>(v)]) {
        d[static_cast<size_t>(v)] = du + len;
        pq.push({d[static_cast<size_t>(v)], v});
      }
    }
  }
  return d;
}

// Omega_new on the lattice tangents divided by t^n; finite at radius zero.
cplx omega_on_lattice(const Model& model, const TorusFiber& F, int sample) {
  const ModelChart& c = model.chart(F.chart);
  const HybridPoint& p = F.samples[static_cast<size_t>(sample)];
  const int n = F.n;
  Eigen::MatrixXcd A(n, n);
  for (int a = 0; a < n; ++a) {
    const Eigen::VectorXd x = fiber_components(c, lattice_tangent(c, F, sample, a));
    for (int j = 0; j < n; ++j) {
      const double m = c.m[static_cast<size_t>(j + 1)];
      const double dw = p.t > 0.0 ? x(2 * j) / p.t : 0.0;
      A(j, a) = cplx(dw, -m * x(2 * j + 1));
    }
  }
  return volume_coefficient(model, p) * A.determinant();
}

}  // namespace

std::vector<MetricLimitRecord> metric_limit_check(const Model& model, const PathSweep& sweep) {
  std::vector<MetricLimitRecord> out;
  for (size_t k = 0; k < sweep.h.size(); ++k) {
    const FormParams fp = sweep.params(k);
    MetricLimitRecord rec;
    rec.h = sweep.h[k];
    rec.q = fp.q;
    for (const auto& F : sweep.fibers[k]) {
      const ModelChart& c = model.chart(F.chart);
      const Eigen::MatrixXd L = (1.0 - fp.q) * limit_metric(c, fp.eps);
      const int n = c.N() - 1;
      for (const auto& p : F.samples) {
        rec.t = p.t;
        const Eigen::MatrixXd G = rescaled_metric(model, p, fp);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) rec.residual = std::max(rec.residual, std::abs(G(2 * a, 2 * b) - L(2 * a, 2 * b)));
        rec.theta_length = std::max(rec.theta_length, std::sqrt(std::max(G(1, 1), 0.0)));
      }
    }
    out.push_back(rec);
  }
  return out;
}

GHReport gh_distortion(const Model& model, const PathSweep& sweep, double band_tol) {
  GHReport rep;
  rep.band_ok = true;
  for (size_t k = 0; k < sweep.h.size(); ++k) {
    const auto& row = sweep.fibers[k];
    const ModelChart& c = model.chart(row.front().chart);
    if (c.N() != 2)
      throw Error(ErrorKind::Domain, "diagnostics", "gh_distortion", "the sample mesh is built for circle fibers (n = 1)");
    const FormParams fp = sweep.params(k);
    const int L = static_cast<int>(row.size());
    const int R = row.front().resolution;
    const int V = L * R;
    auto node = [R](int i, int j) { return i * R + ((j % R) + R) % R; };
    std::vector<Eigen::MatrixXd> metric(static_cast<size_t>(V));
    std::vector<const HybridPoint*> pt(static_cast<size_t>(V));
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < R; ++j) {
        const HybridPoint& p = row[static_cast<size_t>(i)].samples[static_cast<size_t>(j)];
        pt[static_cast<size_t>(node(i, j))] = &p;
        metric[static_cast<size_t>(node(i, j))] = rescaled_metric(model, p, fp) / fp.eps;
      }
    auto edge_length = [&](int a, int b) {
      const Eigen::VectorXd d = fiber_difference(c, *pt[static_cast<size_t>(b)], *pt[static_cast<size_t>(a)]);
      const double la = std::sqrt(std::max(0.0, d.dot(metric[static_cast<size_t>(a)] * d)));
      const double lb = std::sqrt(std::max(0.0, d.dot(metric[static_cast<size_t>(b)] * d)));
      return 0.5 * (la + lb);
    };
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(V)), ring(static_cast<size_t>(V));
    auto link = [&](std::vector<std::vector<std::pair<int, double>>>& g, int a, int b) {
      const double len = edge_length(a, b);
      g[static_cast<size_t>(a)].push_back({b, len});
      g[static_cast<size_t>(b)].push_back({a, len});
    };
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < R; ++j) {
        link(adj, node(i, j), node(i, j + 1));
        link(ring, node(i, j), node(i, j + 1));
        if (i + 1 < L) {
          link(adj, node(i, j), node(i + 1, j));
          link(adj, node(i, j), node(i + 1, j + 1));
          link(adj, node(i, j), node(i + 1, j - 1));
        }
      }
    GHRecord rec;
    rec.h = sweep.h[k];
    rec.t = pt[0]->t;
    rec.q = fp.q;
    for (int a = 0; a < V; ++a) {
      const auto d = dijkstra(ring, a);
      const int i = a / R;
      for (int j = 0; j < R; ++j) rec.torus_diameter = std::max(rec.torus_diameter, d[static_cast<size_t>(node(i, j))]);
    }
    rec.lower_violation = -std::numeric_limits<double>::infinity();
    rec.upper_violation = -std::numeric_limits<double>::infinity();
    const double lower = std::sqrt(std::max(0.0, 1.0 - fp.q));
    for (int a = 0; a < V; ++a) {
      const auto d = dijkstra(adj, a);
      for (int b = a + 1; b < V; ++b) {
        const double dh = d[static_cast<size_t>(b)];
        if (!std::isfinite(dh)) throw Error(ErrorKind::Domain, "diagnostics", "gh_distortion", "disconnected sample mesh");
        const double ds = (pt[static_cast<size_t>(a)]->w - pt[static_cast<size_t>(b)]->w).norm();
        rec.distortion = std::max(rec.distortion, std::abs(dh - ds));
        rec.lower_violation = std::max(rec.lower_violation, lower * ds - dh);
        rec.upper_violation = std::max(rec.upper_violation, dh - ds - rec.torus_diameter);
        rec.diameter = std::max(rec.diameter, dh);
        if (a / R == b / R) rec.max_fiber_pair = std::max(rec.max_fiber_pair, dh);
        ++rec.pairs;
      }
    }
    rec.band_ok = rec.lower_violation <= band_tol && rec.upper_violation <= band_tol;
    rep.band_ok = rep.band_ok && rec.band_ok;
    rep.records.push_back(rec);
  }
  rep.monotone = true;
  for (size_t k = 1; k < rep.records.size(); ++k)
    if (rep.records[k].distortion > rep.records[k - 1].distortion) rep.monotone = false;
  return rep;
}

// ---------------------------------------------------------------- volume

namespace {

template <class F>
double gauss_panels(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  const double hstep = (b - a) / panels;
  for (int k = 0; k < panels; ++k)
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, a + k * hstep, a + (k + 1) * hstep);
  return sum;
}

// Generic-region part: three vertex-chart annuli |f|/R < |z_b| < R.
double hesse_generic_volume(const Model& model, double t, double R, int panels, int angular) {
  const double logf = -1.0 / t;
  const double s_lo = logf - std::log(R), s_hi = std::log(R);
  if (!(s_lo < s_hi)) return 0.0;
  double total = 0.0;
  for (const auto& c : model.charts()) {
    if (c.kind != ChartKind::Maximal) continue;
    double acc = 0.0;
    for (int j = 0; j < angular; ++j) {
      const double th = 2.0 * M_PI * j / angular;
      auto f = [&](double s) {
        const cplx zb = std::polar(std::exp(s), th);
        const cplx za = std::polar(std::exp(logf - s), -th);
        Eigen::VectorXcd z(2);
        z << za, zb;
        return t * std::norm(c.unit(z));
      };
      acc += gauss_panels(f, s_lo, s_hi, panels);
    }
    total += acc * 2.0 * M_PI / angular;
  }
  return total;
}

// Whole fiber: six copies of {|x_b| <= |x_a| <= 1} in the affine chart x_c = 1,
// parametrized by x_a = exp(rho + i phi), with the form dx_a/(x_a - 3 f x_b^2).
double hesse_total_volume(double t, int panels, int angular) {
  const double logf = -1.0 / t;
  const cplx f = std::exp(logf);
  double acc = 0.0;
  for (int j = 0; j < angular; ++j) {
    const double phi = 2.0 * M_PI * j / angular;
    auto gap = [&](double rho) {
      const cplx xa = std::polar(std::exp(rho), phi);
      return std::log(std::abs(hesse_small_root(xa, f))) - rho;
    };
    double lo = logf, hi = 0.0;  // gap(lo) > 0 > gap(hi)
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    const double rho_min = 0.5 * (lo + hi);
    auto g = [&](double rho) {
      const cplx xa = std::polar(std::exp(rho), phi);
      const cplx xb = hesse_small_root(xa, f);
      return t * std::norm(xa) / std::norm(xa - 3.0 * xb * xb * f);
    };
    acc += gauss_panels(g, rho_min, 0.0, panels);
  }
  return 6.0 * acc * 2.0 * M_PI / angular;
}

}  // namespace

VolumeFractionRecord volume_fraction(const Model& model, double t, const VolumeOptions& opt) {
  if (model.type() != ModelType::Hesse)
    throw Error(ErrorKind::Domain, "diagnostics", "volume_fraction", "needs the proper Hesse model");
  VolumeFractionRecord rec;
  rec.t = t;
  if (t == 0.0) {
    // vol_new is supported on the generic region at radius zero
    rec.numerator = rec.denominator = rec.ratio = 1.0;
    return rec;
  }
  if (!(std::exp(-1.0 / t) >= std::numeric_limits<double>::min()))
    throw Error(ErrorKind::Range, "diagnostics", "volume_fraction",
                "t = " + std::to_string(t) + " puts |f| = exp(-1/t) below the normal double range");
  const double R = opt.window;
  rec.numerator = hesse_generic_volume(model, t, R, opt.radial_panels, opt.angular_nodes);
  rec.denominator = hesse_total_volume(t, opt.radial_panels, opt.angular_nodes);
  if (!(rec.denominator > 0.0) || !std::isfinite(rec.denominator))
    throw Error(ErrorKind::Quadrature, "diagnostics", "volume_fraction", "total fiber volume did not evaluate");
  rec.ratio = rec.numerator / rec.denominator;
  // Richardson-style estimate from a half-resolution rule
  const double n2 = hesse_generic_volume(model, t, R, opt.radial_panels / 2, opt.angular_nodes / 2);
  const double d2 = hesse_total_volume(t, opt.radial_panels / 2, opt.angular_nodes / 2);
  rec.error_estimate = std::abs(n2 / d2 - rec.ratio);
  return rec;
}

std::vector<VolumeFractionRecord> volume_fraction_sweep(const Model& model, const AdmissiblePath& path,
                                                        const std::vector<double>& schedule,
                                                        const VolumeOptions& opt) {
  std::vector<VolumeFractionRecord> out;
  for (double h : schedule) {
    VolumeFractionRecord rec = volume_fraction(model, path.t(h), opt);
    rec.h = h;
    out.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------- c_+

std::vector<CplusRecord> ricci_flat_trend(const Model& model, const PathSweep& sweep) {
  std::vector<CplusRecord> out;
  for (size_t k = 0; k < sweep.h.size(); ++k) {
    const FormParams fp = sweep.params(k);
    CplusRecord rec;
    rec.h = sweep.h[k];
    rec.q = fp.q;
    rec.limit = cplus_limit(model, sweep.config.chart, fp.eps);
    rec.min = std::numeric_limits<double>::infinity();
    rec.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& F : sweep.fibers[k])
      for (const auto& p : F.samples) {
        rec.t = p.t;
        double v;
        try {
          v = cplus(model, p, fp);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NonGenericPoint) throw;
          ++rec.excluded;
          continue;
        }
        rec.min = std::min(rec.min, v);
        rec.max = std::max(rec.max, v);
        sum += v;
        ++rec.used;
      }
    rec.mean = rec.used ? sum / rec.used : 0.0;
    rec.spread = rec.used ? rec.max - rec.min : 0.0;
    out.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------- phase

long winding_number(const std::vector<cplx>& loop) {
  long k = 0;
  for (size_t j = 0; j < loop.size(); ++j) {
    const double a = std::arg(loop[j]);
    const double b = std::arg(loop[(j + 1) % loop.size()]);
    const double d = b - a;  // in (-2 pi, 2 pi)
    if (d > M_PI) k -= 1;
    else if (d <= -M_PI) k += 1;
  }
  return k;
}

PhaseReport phase_specialty(const Model& model, const PathSweep& sweep) {
  PhaseReport rep;
  rep.tame = sweep.config.path.tame();
  const ModelChart& c = model.chart(sweep.config.chart);
  const int n = c.N() - 1;
  const cplx c0 = model.c0(c.id);
  cplx in = 1.0;
  for (int k = 0; k < n; ++k) in *= cplx(0.0, 1.0);
  rep.varpi0 = in * std::conj(c0) / std::abs(c0);
  bool sign_fixed = false;
  for (size_t k = 0; k < sweep.h.size(); ++k) {
    const TorusFiber& F = sweep.fibers[k].front();
    PhaseRecord rec;
    rec.h = sweep.h[k];
    rec.t = F.t;
    std::vector<cplx> phase(F.samples.size());
    for (size_t i = 0; i < F.samples.size(); ++i) {
      const cplx om = omega_on_lattice(model, F, static_cast<int>(i));
      if (std::abs(om) == 0.0) throw Error(ErrorKind::DegenerateForm, "diagnostics", "phase_specialty", "frame degenerate");
      phase[i] = std::conj(om) / std::abs(om);
      rec.max_modulus_error = std::max(rec.max_modulus_error, std::abs(std::abs(phase[i]) - 1.0));
    }
    if (!sign_fixed) {
      if (std::abs(phase.front() + rep.varpi0) < std::abs(phase.front() - rep.varpi0)) rep.varpi0 = -rep.varpi0;
      sign_fixed = true;
    }
    for (const auto& ph : phase) rec.deviation = std::max(rec.deviation, std::abs(ph - rep.varpi0));
    for (int a = 0; a < F.n; ++a) {
      // the generator loop through the lattice origin
      std::vector<cplx> loop;
      std::vector<int> lat(static_cast<size_t>(F.n), 0);
      for (int j = 0; j < F.resolution; ++j) {
        lat[static_cast<size_t>(a)] = j;
        loop.push_back(phase[static_cast<size_t>(F.index(lat))]);
      }
      rec.winding.push_back(winding_number(loop));
    }
    rep.records.push_back(rec);
  }
  return rep;
}

std::vector<CalibrationRecord> calibration_ratio(const Model& model, const PathSweep& sweep, cplx varpi0) {
  std::vector<CalibrationRecord> out;
  for (size_t k = 0; k < sweep.h.size(); ++k) {
    const TorusFiber& F = sweep.fibers[k].front();
    const ModelChart& c = model.chart(F.chart);
    const FormParams fp = sweep.params(k);
    CalibrationRecord rec;
    rec.h = sweep.h[k];
    rec.t = F.t;
    const double cell = std::pow(2.0 * M_PI / F.resolution, F.n);
    for (size_t i = 0; i < F.samples.size(); ++i) {
      const HybridPoint& p = F.samples[i];
      // both integrands are divided by t^n so that radius zero is finite
      Eigen::MatrixXd gram(F.n, F.n);
      if (p.t > 0.0) {
        const Eigen::MatrixXd G = rescaled_metric(model, p, fp) / (p.t * p.t);
        std::vector<Eigen::VectorXd> tau;
        for (int a = 0; a < F.n; ++a) tau.push_back(fiber_components(c, lattice_tangent(c, F, static_cast<int>(i), a)));
        for (int a = 0; a < F.n; ++a)
          for (int b = 0; b < F.n; ++b) gram(a, b) = tau[static_cast<size_t>(a)].dot(G * tau[static_cast<size_t>(b)]);
      } else {
        const Eigen::MatrixXd M = angle_metric_limit(c, p, fp);
        Eigen::MatrixXd tau(F.n, F.n);
        for (int a = 0; a < F.n; ++a) {
          const Eigen::VectorXd x = fiber_components(c, lattice_tangent(c, F, static_cast<int>(i), a));
          for (int j = 0; j < F.n; ++j) tau(j, a) = x(2 * j + 1);
        }
        gram = tau.transpose() * M * tau;
      }
      rec.metric_volume += std::sqrt(std::max(0.0, gram.determinant())) * cell;
      const double cp = cplus(model, p, fp);
      rec.calibrated += std::sqrt(cp) * std::real(varpi0 * omega_on_lattice(model, F, static_cast<int>(i))) * cell;
    }
    rec.ratio = rec.metric_volume / rec.calibrated;
    out.push_back(rec);
  }
  return out;
}

}  // namespace syz
