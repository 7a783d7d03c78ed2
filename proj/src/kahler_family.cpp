#include "syz/kahler_family.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "syz/errors.hpp"
#include "syz/transfer.hpp"

namespace syz {

namespace {

const ModelChart& maximal_chart(const Model& model, const HybridPoint& p, const char* op) {
  const ModelChart& c = model.chart(p.chart);
  if (c.kind != ChartKind::Maximal)
    throw Error(ErrorKind::Domain, "kahler_family", op, "forms are evaluated in maximal charts");
  return c;
}

// omega = sum_k dF_k ^ dtheta_k from the gradients dF_k.
Eigen::MatrixXd assemble(const ModelChart& c, const std::vector<Eigen::RowVectorXd>& grads) {
  const int D = hybrid_dim(c);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(D, D);
  for (int k = 0; k < c.N(); ++k) {
    const int th = hybrid_th_index(c, k);
    W.col(th) += grads[static_cast<size_t>(k)].transpose();
    W.row(th) -= grads[static_cast<size_t>(k)];
  }
  return W;
}

double mk(const ModelChart& c, int k) { return c.m[static_cast<size_t>(k)]; }

std::string fmt_sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

int hybrid_dim(const ModelChart& c) { return 2 * c.N(); }
int hybrid_t_index() { return 0; }
int hybrid_w_index(int k) { return k; }
int hybrid_th_index(const ModelChart& c, int k) { return c.N() + k; }

Eigen::MatrixXd fiber_basis(const ModelChart& c) {
  const int N = c.N();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * N, 2 * (N - 1));
  for (int j = 1; j < N; ++j) {
    B(hybrid_w_index(j), 2 * (j - 1)) = 1.0;
    B(hybrid_th_index(c, j), 2 * (j - 1) + 1) = 1.0;
    B(hybrid_th_index(c, 0), 2 * (j - 1) + 1) = -mk(c, j) / mk(c, 0);
  }
  return B;
}

Eigen::MatrixXd torus_basis(const ModelChart& c) {
  const Eigen::MatrixXd B = fiber_basis(c);
  Eigen::MatrixXd T(B.rows(), c.N() - 1);
  for (int j = 0; j < c.N() - 1; ++j) T.col(j) = B.col(2 * j + 1);
  return T;
}

Eigen::MatrixXd boundary_basis(const ModelChart& c) {
  const int D = hybrid_dim(c);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(D, D - 1);
  for (int a = 1; a < D; ++a) T(a, a - 1) = 1.0;
  return T;
}

Eigen::RowVectorXd grad_w(const ModelChart& c, int k) {
  Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(hybrid_dim(c));
  if (k == 0) {
    for (int j = 1; j < c.N(); ++j) g(hybrid_w_index(j)) = -1.0;
  } else {
    g(hybrid_w_index(k)) = 1.0;
  }
  return g;
}

Eigen::RowVectorXd grad_s(const ModelChart& c, const HybridPoint& p, int k) {
  // s_k = -w_k / (m_k t)
  Eigen::RowVectorXd g = -grad_w(c, k) / (mk(c, k) * p.t);
  g(hybrid_t_index()) = p.w(k) / (mk(c, k) * p.t * p.t);
  return g;
}

Eigen::RowVectorXd grad_v(const ModelChart& c, const HybridPoint& p, int k) {
  // v_k = t/w_k - eta(w_k)
  const double w = p.w(k);
  if (!(w > 0.0))
    throw Error(ErrorKind::SingularCoordinate, "kahler_family", "omega_sharp",
                "v_" + std::to_string(c.S[static_cast<size_t>(k)]) + " is singular at w = 0");
  Eigen::RowVectorXd g = -(p.t / (w * w) + eta_prime(w)) * grad_w(c, k);
  g(hybrid_t_index()) = 1.0 / w;
  return g;
}

FormValue omega_X(const Model& model, const HybridPoint& p) {
  const ModelChart& c = maximal_chart(model, p, "omega_X");
  FormValue out;
  out.point = p;
  std::vector<Eigen::RowVectorXd> grads;
  for (int k = 0; k < c.N(); ++k) {
    if (p.t > 0.0) {
      const double s = -p.w(k) / (mk(c, k) * p.t);
      grads.push_back(std::exp(2.0 * s) * grad_s(c, p, k));
    } else {
      // r_k^2 is flat in t at radius zero
      grads.push_back(Eigen::RowVectorXd::Zero(hybrid_dim(c)));
    }
  }
  out.matrix = assemble(c, grads);
  return out;
}

FormValue omega_sharp(const Model& model, const HybridPoint& p) {
  const ModelChart& c = maximal_chart(model, p, "omega_sharp");
  std::vector<Eigen::RowVectorXd> grads;
  for (int k = 0; k < c.N(); ++k) grads.push_back(grad_v(c, p, k));
  FormValue out;
  out.point = p;
  out.matrix = assemble(c, grads);
  return out;
}

FormValue omega_flat(const Model& model, const HybridPoint& p) {
  const ModelChart& c = maximal_chart(model, p, "omega_flat");
  std::vector<Eigen::RowVectorXd> grads;
  for (int k = 0; k < c.N(); ++k) grads.push_back(-mk(c, k) * grad_w(c, k));
  FormValue out;
  out.point = p;
  out.matrix = assemble(c, grads);
  return out;
}

FormValue omega_q(const Model& model, const HybridPoint& p, const FormParams& fp) {
  FormValue out = omega_X(model, p);
  const Eigen::MatrixXd flat = omega_flat(model, p).matrix;
  if (fp.q > 0.0) {
    out.matrix += fp.eps * (fp.q * omega_sharp(model, p).matrix + (1.0 - fp.q) * flat);
  } else {
    out.matrix += fp.eps * flat;
  }
  return out;
}

Eigen::MatrixXd omega_q_boundary(const Model& model, const HybridPoint& p, const FormParams& fp) {
  const ModelChart& c = maximal_chart(model, p, "omega_q");
  std::vector<Eigen::RowVectorXd> grads;
  for (int k = 0; k < c.N(); ++k) {
    const double w = p.w(k);
    Eigen::RowVectorXd dv = -(w > 0.0 ? p.t / (w * w) + eta_prime(w) : 0.0) * grad_w(c, k);
    Eigen::RowVectorXd g = fp.eps * (fp.q * dv - (1.0 - fp.q) * mk(c, k) * grad_w(c, k));
    if (p.t > 0.0) g += std::exp(-2.0 * w / (mk(c, k) * p.t)) * grad_s(c, p, k);
    g(hybrid_t_index()) = 0.0;
    grads.push_back(g);
  }
  return restrict_form(assemble(c, grads), boundary_basis(c));
}

Eigen::MatrixXd restrict_form(const Eigen::MatrixXd& W, const Eigen::MatrixXd& basis) {
  return basis.transpose() * W * basis;
}

PairingReport pairing_check(const Model& model, const HybridPoint& p, const FormParams& fp) {
  const ModelChart& c = maximal_chart(model, p, "pairing_check");
  if (p.t != 0.0) throw Error(ErrorKind::Domain, "kahler_family", "pairing_check", "requires a radius-zero point");
  const Eigen::MatrixXd T = boundary_basis(c);
  const Eigen::MatrixXd Wb = omega_q_boundary(model, p, fp);
  PairingReport rep;
  for (int i = 0; i < c.N(); ++i) {
    const double w = p.w(i);
    const double u = eta(w);
    const double ci = fp.q + (1.0 - fp.q) * mk(c, i) * zeta(u);
    rep.c.push_back(ci);
    if (ci == 0.0) rep.degenerate = true;
    // column of d/dtheta_i in the boundary basis
    const int col = hybrid_th_index(c, i) - 1;
    Eigen::VectorXd lhs = Wb.col(col);
    // d v_i restricted to the boundary: -eta'(w_i) dw_i
    Eigen::RowVectorXd dv = -eta_prime(w) * grad_w(c, i) * T;
    Eigen::VectorXd rhs = fp.eps * ci * dv.transpose();
    rep.residual = std::max(rep.residual, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return rep;
}

Eigen::MatrixXd hybrid_to_log_jacobian(const Model& model, const HybridPoint& p) {
  const ModelChart& c = maximal_chart(model, p, "complex_structure");
  if (!(p.t > 0.0)) throw Error(ErrorKind::Domain, "kahler_family", "complex_structure", "J requires t > 0");
  const int N = c.N();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (int k = 0; k < N; ++k) {
    P.row(k) = grad_s(c, p, k);
    P(N + k, hybrid_th_index(c, k)) = 1.0;
  }
  return P;
}

Eigen::MatrixXd complex_structure(const Model& model, const HybridPoint& p) {
  const Eigen::MatrixXd P = hybrid_to_log_jacobian(model, p);
  const int N = static_cast<int>(P.rows()) / 2;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  J.block(0, N, N, N) = -Eigen::MatrixXd::Identity(N, N);
  J.block(N, 0, N, N) = Eigen::MatrixXd::Identity(N, N);
  return P.partialPivLu().solve(J * P);
}

MetricReport metric_g(const Model& model, const HybridPoint& p, const FormParams& fp) {
  const ModelChart& c = maximal_chart(model, p, "metric_g");
  const Eigen::MatrixXd W = omega_q(model, p, fp).matrix;
  const Eigen::MatrixXd J = complex_structure(model, p);
  const Eigen::MatrixXd B = fiber_basis(c);
  MetricReport rep;
  const Eigen::MatrixXd G = B.transpose() * W * J * B;
  const double scale = std::max(G.cwiseAbs().maxCoeff(), 1e-300);
  rep.asymmetry = (G - G.transpose()).cwiseAbs().maxCoeff();
  if (rep.asymmetry > 1e-10 * scale)
    throw Error(ErrorKind::JCompatibility, "kahler_family", "metric_g",
                "fiber metric asymmetric by " + fmt_sci(rep.asymmetry) + " (tolerance 1e-10 relative)");
  rep.fiber = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.fiber);
  rep.eigenvalues = es.eigenvalues();
  rep.min_eigenvalue = rep.eigenvalues.minCoeff();
  rep.positive = rep.min_eigenvalue > 0.0;
  return rep;
}

double j_compatibility_residual(const Model& model, const HybridPoint& p, const FormParams& fp) {
  const ModelChart& c = maximal_chart(model, p, "metric_g");
  const Eigen::MatrixXd W = omega_q(model, p, fp).matrix;
  const Eigen::MatrixXd J = complex_structure(model, p);
  const Eigen::MatrixXd B = fiber_basis(c);
  const Eigen::MatrixXd JB = J * B;
  return (JB.transpose() * W * JB - B.transpose() * W * B).cwiseAbs().maxCoeff();
}

namespace {

double phi_sharp_component(double shat, double t, double m, double tol) {
  if (shat == -1.0) return 0.0;
  auto integrand = [m, t](double s) { return -1.0 / (m * s) - eta(-m * s * t); };
  double err = 0.0;
  double val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, shat, -1.0, 15, tol, &err);
  if (!std::isfinite(val) || err > 1e-9 * std::max(1.0, std::abs(val)))
    throw Error(ErrorKind::Quadrature, "kahler_family", "potential_sharp",
                "quadrature did not converge (error estimate " + fmt_sci(err) + ")");
  return val;
}

// phi_sharp as a function of the log-radii s at fixed t.
double phi_sharp_of_s(const ModelChart& c, const Eigen::VectorXd& s, double t, double tol) {
  double sum = 0.0;
  for (int k = 0; k < c.N(); ++k) sum += phi_sharp_component(s(k), t, mk(c, k), tol);
  return sum;
}

Eigen::VectorXd log_radii(const ModelChart& c, const HybridPoint& p) {
  Eigen::VectorXd s(c.N());
  for (int k = 0; k < c.N(); ++k) s(k) = -p.w(k) / (mk(c, k) * p.t);
  return s;
}

}  // namespace

double closedness_residual(const Model& model, const HybridPoint& p, const FormParams& fp, double step) {
  const ModelChart& c = maximal_chart(model, p, "closedness");
  if (!(p.t > 0.0)) throw Error(ErrorKind::Domain, "kahler_family", "closedness", "requires t > 0");
  const int D = hybrid_dim(c);
  std::vector<Eigen::MatrixXd> dW;
  for (int a = 0; a < D; ++a) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(D);
    e(a) = step;
    // five-point central stencil
    const auto at = [&](double k) { return omega_q(model, hybrid_shift(c, p, k * e), fp).matrix; };
    dW.push_back((8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * step));
  }
  double worst = 0.0;
  for (int a = 0; a < D; ++a)
    for (int b = a + 1; b < D; ++b)
      for (int k = b + 1; k < D; ++k)
        worst = std::max(worst, std::abs(dW[static_cast<size_t>(a)](b, k) + dW[static_cast<size_t>(b)](k, a) +
                                         dW[static_cast<size_t>(k)](a, b)));
  return worst;
}

HybridPoint hybrid_shift(const ModelChart& c, const HybridPoint& p, const Eigen::VectorXd& dx) {
  HybridPoint q = p;
  q.t += dx(hybrid_t_index());
  double rest = 0.0;
  for (int j = 1; j < c.N(); ++j) {
    q.w(j) += dx(hybrid_w_index(j));
    rest += q.w(j);
  }
  q.w(0) = 1.0 - rest;
  double total = 0.0;
  for (int k = 0; k < c.N(); ++k) {
    q.th(k) += dx(hybrid_th_index(c, k));
    total += c.m[static_cast<size_t>(k)] * q.th(k);
  }
  q.theta = wrap_angle(total);
  return q;
}

double potential_sharp(const Model& model, const HybridPoint& p, double tol) {
  const ModelChart& c = maximal_chart(model, p, "potential_sharp");
  if (!(p.t > 0.0)) throw Error(ErrorKind::Domain, "kahler_family", "potential_sharp", "requires t > 0");
  return phi_sharp_of_s(c, log_radii(c, p), p.t, tol);
}

SharpPotentialCheck potential_sharp_check(const Model& model, const HybridPoint& p, double step1, double step2) {
  const ModelChart& c = maximal_chart(model, p, "potential_sharp");
  if (!(p.t > 0.0)) throw Error(ErrorKind::Domain, "kahler_family", "potential_sharp", "requires t > 0");
  const double tol = 1e-15;
  const Eigen::MatrixXd J = complex_structure(model, p);
  const Eigen::MatrixXd B = fiber_basis(c);
  SharpPotentialCheck rep;

  // d^c phi (X) = d phi (J X)
  for (int a = 0; a < B.cols(); ++a) {
    const Eigen::VectorXd X = B.col(a);
    const Eigen::VectorXd JX = J * X;
    const double fp = potential_sharp(model, hybrid_shift(c, p, step1 * JX), tol);
    const double fm = potential_sharp(model, hybrid_shift(c, p, -step1 * JX), tol);
    const double dc = (fp - fm) / (2.0 * step1);
    double lam = 0.0;
    for (int k = 0; k < c.N(); ++k) lam += (p.t / p.w(k) - eta(p.w(k))) * X(hybrid_th_index(c, k));
    rep.dc_residual = std::max(rep.dc_residual, std::abs(dc - lam));
  }

  // dd^c phi = -sum_ij H_ij ds_j ^ dtheta_i with H the s-Hessian at fixed t
  const int N = c.N();
  const Eigen::VectorXd s0 = log_radii(c, p);
  auto F = [&](const Eigen::VectorXd& s) { return phi_sharp_of_s(c, s, p.t, tol); };
  Eigen::MatrixXd H(N, N);
  const double f0 = F(s0);
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(N), ej = Eigen::VectorXd::Zero(N);
      ei(i) = step2;
      ej(j) = step2;
      double v;
      if (i == j) {
        v = (F(s0 + ei) - 2.0 * f0 + F(s0 - ei)) / (step2 * step2);
      } else {
        v = (F(s0 + ei + ej) - F(s0 + ei - ej) - F(s0 - ei + ej) + F(s0 - ei - ej)) / (4.0 * step2 * step2);
      }
      H(i, j) = H(j, i) = v;
    }
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      M(j, N + i) -= H(i, j);
      M(N + i, j) += H(i, j);
    }
  const Eigen::MatrixXd P = hybrid_to_log_jacobian(model, p);
  const Eigen::MatrixXd ddc = restrict_form(P.transpose() * M * P, B);
  const Eigen::MatrixXd sharp = restrict_form(omega_sharp(model, p).matrix, B);
  rep.ddc_residual = (ddc - sharp).cwiseAbs().maxCoeff();
  return rep;
}

FlatPotential potential_flat(const Model& model, const HybridPoint& p, double step) {
  const ModelChart& c = maximal_chart(model, p, "potential_flat");
  if (!(p.t > 0.0)) throw Error(ErrorKind::Domain, "kahler_family", "potential_flat", "requires t > 0");
  auto phi = [&](const HybridPoint& x) {
    double s = 0.0;
    for (int k = 0; k < c.N(); ++k) s += x.w(k) * x.w(k);
    return -s / (2.0 * x.t);
  };
  FlatPotential rep;
  rep.value = phi(p);
  const Eigen::MatrixXd J = complex_structure(model, p);
  const int D = hybrid_dim(c);
  double sumw2 = 0.0;
  for (int k = 0; k < c.N(); ++k) sumw2 += p.w(k) * p.w(k);
  for (int a = 0; a < D; ++a) {
    Eigen::VectorXd X = Eigen::VectorXd::Zero(D);
    X(a) = 1.0;
    const Eigen::VectorXd JX = J * X;
    const double dc = (phi(hybrid_shift(c, p, step * JX)) - phi(hybrid_shift(c, p, -step * JX))) / (2.0 * step);
    double lam = 0.0, dtheta = 0.0;
    for (int k = 0; k < c.N(); ++k) {
      lam -= mk(c, k) * p.w(k) * X(hybrid_th_index(c, k));
      dtheta += mk(c, k) * X(hybrid_th_index(c, k));
    }
    rep.residual = std::max(rep.residual, std::abs(lam - (dc - 0.5 * sumw2 * dtheta)));
    rep.residual_plus = std::max(rep.residual_plus, std::abs(lam - (dc + 0.5 * sumw2 * dtheta)));
  }
  return rep;
}

std::complex<double> volume_coefficient(const Model& model, const HybridPoint& p) {
  const ModelChart& c = maximal_chart(model, p, "volume_forms");
  const int N = c.N();
  double prod_m = 1.0;
  for (int k = 0; k < N; ++k) prod_m *= mk(c, k);
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(N);
  if (p.t > 0.0) {
    z = model.to_z(p);
  } else if (!p.residual.empty()) {
    for (int k = 0; k < N; ++k)
      if (p.w(k) == 0.0) z(k) = p.residual[0];
  }
  std::complex<double> C = c.unit(z) / prod_m;
  for (int k = 0; k < N; ++k) {
    const double e = c.nu[static_cast<size_t>(k)] - model.kappa() * mk(c, k);
    if (std::abs(e) < 1e-14) continue;
    if (p.t > 0.0) {
      C *= std::polar(std::pow(std::abs(z(k)), e), e * p.th(k));
    } else if (p.w(k) > 0.0) {
      C = 0.0;  // the component is not essential and z_k = 0 at radius zero
    } else {
      C *= std::polar(std::pow(std::abs(z(k)), e), e * std::arg(z(k)));
    }
  }
  return C;
}

VolumeValue volume_forms(const Model& model, const HybridPoint& p, const Eigen::MatrixXd& frame) {
  const ModelChart& c = maximal_chart(model, p, "volume_forms");
  const int n = c.N() - 1;
  if (frame.rows() != 2 * n || frame.cols() != 2 * n)
    throw Error(ErrorKind::Domain, "kahler_family", "volume_forms", "frame must be 2n x 2n in fiber coordinates");
  const double det = frame.determinant();
  const double scale = std::pow(std::max(frame.cwiseAbs().maxCoeff(), 1e-300), 2 * n);
  if (!(std::abs(det) > 1e-12 * scale))
    throw Error(ErrorKind::Domain, "kahler_family", "volume_forms", "frame is not a basis of the fiber tangent space");
  VolumeValue out;
  out.point = p;
  out.C = volume_coefficient(model, p);
  out.c0 = model.c0(p.chart);
  // Omega_new = C * wedge_j (dw_j - i t m_j dtheta_j) on the first n vectors
  Eigen::MatrixXcd A(n, n);
  for (int j = 0; j < n; ++j) {
    const double m = mk(c, j + 1);
    for (int k = 0; k < n; ++k)
      A(j, k) = std::complex<double>(frame(2 * j, k), -p.t * m * frame(2 * j + 1, k));
  }
  out.omega = out.C * A.determinant();
  double prod_m = 1.0;
  for (int j = 1; j <= n; ++j) prod_m *= mk(c, j);
  out.coefficient = std::norm(out.C) * prod_m;
  // wedge_j m_j dtheta_j ^ dw_j = (-1)^n prod m_j * det in (w, theta) pair coordinates
  out.vol = out.coefficient * ((n % 2) ? -det : det);
  return out;
}

double pfaffian(Eigen::MatrixXd A) {
  const int D = static_cast<int>(A.rows());
  if (D % 2) return 0.0;
  double pf = 1.0;
  for (int k = 0; k < D - 1; k += 2) {
    // pivot: bring the largest entry of row k (beyond k) to column k+1
    int piv = k + 1;
    for (int j = k + 2; j < D; ++j)
      if (std::abs(A(k, j)) > std::abs(A(k, piv))) piv = j;
    if (piv != k + 1) {
      A.row(k + 1).swap(A.row(piv));
      A.col(k + 1).swap(A.col(piv));
      pf = -pf;
    }
    const double a = A(k, k + 1);
    if (a == 0.0) return 0.0;
    pf *= a;
    for (int i = k + 2; i < D; ++i) {
      const double tau = A(k, i) / a;
      // eliminate column i against column k+1, and the mirrored row
      A.col(i) -= tau * A.col(k + 1);
      A.row(i) -= tau * A.row(k + 1);
    }
  }
  return pf;
}

double cplus(const Model& model, const HybridPoint& p, const FormParams& fp) {
  const ModelChart& c = maximal_chart(model, p, "cplus");
  const int n = c.N() - 1;
  Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  if (p.t == 0.0) {
    for (int k = 0; k < c.N(); ++k)
      if (!(p.w(k) > 0.0))
        throw Error(ErrorKind::NonGenericPoint, "kahler_family", "cplus",
                    "radius-zero point off the open maximal face; vol_new vanishes");
  }
  const VolumeValue vol = volume_forms(model, p, frame);
  if (vol.vol == 0.0)
    throw Error(ErrorKind::NonGenericPoint, "kahler_family", "cplus", "vol_new = 0 (non-essential face)");
  const Eigen::MatrixXd Wf = restrict_form(omega_q(model, p, fp).matrix, fiber_basis(c));
  return pfaffian(Wf) / vol.vol;
}

double cplus_limit(const Model& model, int chart, double eps) {
  const int n = model.chart(chart).N() - 1;
  return std::pow(eps, n) * (n + 1) / std::norm(model.c0(chart));
}

EpsCalibration calibrate_eps0(const Model& model, const std::vector<HybridPoint>& samples, const std::vector<double>& qs,
                              double eps_start, double eps_cap) {
  auto min_eig = [&](double eps) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : samples)
      for (double q : qs) best = std::min(best, metric_g(model, p, {eps, q}).min_eigenvalue);
    return best;
  };
  EpsCalibration cal;
  double good = 0.0, eps = eps_start;
  double bad = -1.0;
  for (;;) {
    ++cal.scanned;
    if (min_eig(eps) > 0.0) {
      good = eps;
      if (eps >= eps_cap) break;
      eps = std::min(2.0 * eps, eps_cap);
    } else {
      bad = eps;
      break;
    }
  }
  if (bad < 0.0) {
    cal.eps0 = good;
    cal.min_eigenvalue = min_eig(cal.eps0);
    return cal;
  }
  cal.failure_found = true;
  double lo = good, hi = bad;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    ++cal.scanned;
    (min_eig(mid) > 0.0 ? lo : hi) = mid;
  }
  cal.eps0 = lo;
  cal.witness_eps = hi;
  cal.min_eigenvalue = lo > 0.0 ? min_eig(lo) : 0.0;
  return cal;
}

}  // namespace syz
