#pragma once

// The fiberwise Kahler family omega_q^eps = omega_X + eps (q omega_sharp +
// (1 - q) omega_flat) evaluated in hybrid coordinates.
//
// Every form is returned as an antisymmetric matrix in the hybrid basis
//   (d/dt, d/dw_2, ..., d/dw_N, d/dtheta_1, ..., d/dtheta_N)
// of a maximal chart, at radius zero and at positive radius alike. The fiber
// of f is spanned by the pair-ordered basis
//   d/dw_j, e_j = d/dtheta_j - (m_j/m_1) d/dtheta_1     (j = 2..N).

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "syz/hybrid_coords.hpp"

namespace syz {

struct FormParams {
  double eps = 0.1;
  double q = 1.0;
};

struct FormValue {
  HybridPoint point;
  Eigen::MatrixXd matrix;                 // 2N x 2N, matrix(a, b) = omega(e_a, e_b)
  std::string basis = "hybrid(t,w2..wN,theta1..thetaN)";
};

// Index layout of the hybrid basis.
int hybrid_dim(const ModelChart& c);
int hybrid_t_index();
int hybrid_w_index(int k);   // k = 1..N-1 (0-based component position)
int hybrid_th_index(const ModelChart& c, int k);

// 2N x 2n, pair ordered (dw_2, e_2, dw_3, e_3, ...).
Eigen::MatrixXd fiber_basis(const ModelChart& c);
// 2N x n, the angle directions e_2..e_N spanning a radius-zero torus.
Eigen::MatrixXd torus_basis(const ModelChart& c);
// 2N x (2N - 1): d/dw_j and d/dtheta_k, tangent to the radius-zero boundary.
Eigen::MatrixXd boundary_basis(const ModelChart& c);

// Gradients (as rows over the hybrid basis) of the functions F_k in
// omega = sum_k dF_k ^ dtheta_k.
Eigen::RowVectorXd grad_w(const ModelChart& c, int k);
Eigen::RowVectorXd grad_s(const ModelChart& c, const HybridPoint& p, int k);
Eigen::RowVectorXd grad_v(const ModelChart& c, const HybridPoint& p, int k);

FormValue omega_X(const Model& model, const HybridPoint& p);
FormValue omega_sharp(const Model& model, const HybridPoint& p);
FormValue omega_flat(const Model& model, const HybridPoint& p);
FormValue omega_q(const Model& model, const HybridPoint& p, const FormParams& fp);
// omega_q restricted to the tangent space of the radius-zero boundary, where
// the dt-components are not needed (and may be singular on lower strata).
Eigen::MatrixXd omega_q_boundary(const Model& model, const HybridPoint& p, const FormParams& fp);

// Moves p by the hybrid-coordinate vector dx; w_1 follows from sum w = 1.
HybridPoint hybrid_shift(const ModelChart& c, const HybridPoint& p, const Eigen::VectorXd& dx);

Eigen::MatrixXd restrict_form(const Eigen::MatrixXd& W, const Eigen::MatrixXd& basis);

struct PairingReport {
  double residual = 0.0;
  std::vector<double> c;  // q + (1 - q) m_i zeta(u_i)
  bool degenerate = false;  // some c_i vanishes
};

PairingReport pairing_check(const Model& model, const HybridPoint& p, const FormParams& fp);

// Jacobian of (s_1..s_N, theta_1..theta_N) with respect to the hybrid
// coordinates, and the complex structure J (J d/ds_k = d/dtheta_k) in the
// hybrid basis. Both need t > 0.
Eigen::MatrixXd hybrid_to_log_jacobian(const Model& model, const HybridPoint& p);
Eigen::MatrixXd complex_structure(const Model& model, const HybridPoint& p);

struct MetricReport {
  Eigen::MatrixXd fiber;     // 2n x 2n fiber metric in the pair-ordered fiber basis
  Eigen::VectorXd eigenvalues;
  double min_eigenvalue = 0.0;
  bool positive = false;
  double asymmetry = 0.0;
};

// g_q = omega_q(., J .) on the fiber. Throws JCompatibility if the fiber
// matrix fails to be symmetric to 1e-10 (relative to its size).
MetricReport metric_g(const Model& model, const HybridPoint& p, const FormParams& fp);
// max |omega_q(JX, JY) - omega_q(X, Y)| over the fiber basis pairs.
double j_compatibility_residual(const Model& model, const HybridPoint& p, const FormParams& fp);

// max over coordinate triples of the central-difference exterior derivative
// (d omega_q)_{abc} = d_a W_bc + d_b W_ca + d_c W_ab, at t > 0.
double closedness_residual(const Model& model, const HybridPoint& p, const FormParams& fp, double step = 1e-4);

// phi_sharp = sum_i int_{s_i}^{-1} (-1/(m_i s) - eta(-m_i s t)) ds
double potential_sharp(const Model& model, const HybridPoint& p, double tol = 1e-15);

struct SharpPotentialCheck {
  double dc_residual = 0.0;   // max over the fiber basis |d^c phi(X) - lambda_sharp(X)|
  double ddc_residual = 0.0;  // max entry of dd^c phi - omega_sharp on the fiber
};
SharpPotentialCheck potential_sharp_check(const Model& model, const HybridPoint& p, double step1 = 1e-5,
                                          double step2 = 1e-3);

struct FlatPotential {
  double value = 0.0;          // -(1/2t) sum w_i^2
  double residual = 0.0;       // lambda_flat - (d^c phi - 1/2 sum w^2 dtheta), over the full hybrid basis
  double residual_plus = 0.0;  // the same with + 1/2 sum w^2 dtheta
};
FlatPotential potential_flat(const Model& model, const HybridPoint& p, double step = 1e-5);

struct VolumeValue {
  HybridPoint point;
  std::complex<double> omega;  // Omega_new on the first n frame vectors
  double vol = 0.0;            // vol_new on the full frame
  double coefficient = 0.0;    // |C|^2 prod m_j, the density of vol_new in (w_j, theta_j)
  std::complex<double> C;      // c(z) prod z^{nu - kappa m} / prod m
  std::complex<double> c0;
};

// Coefficient C of the holomorphic volume section at p (c0 at radius zero on
// an essential face, zero on a non-essential one).
std::complex<double> volume_coefficient(const Model& model, const HybridPoint& p);

// frame: 2n x 2n, columns are vectors in the fiber coordinates
// (w_2, theta_2, w_3, theta_3, ...). The orientation is the complex one, so
// (d/dtheta_j, d/dw_j) pairs count positively.
VolumeValue volume_forms(const Model& model, const HybridPoint& p, const Eigen::MatrixXd& frame);

double pfaffian(Eigen::MatrixXd A);

// c_+ = (omega_q^n / n!) / vol_new on the fiber.
double cplus(const Model& model, const HybridPoint& p, const FormParams& fp);
// eps^n (n+1) |c0|^-2
double cplus_limit(const Model& model, int chart, double eps);

struct EpsCalibration {
  double eps0 = 0.0;
  bool failure_found = false;
  double witness_eps = 0.0;  // smallest scanned eps with a non-positive eigenvalue
  double min_eigenvalue = 0.0;  // at eps0 over the samples
  int scanned = 0;
};

// Doubles eps from eps_start until metric_g loses positivity at some sample
// and q, then bisects. If no failure is found below eps_cap, eps0 = eps_cap.
EpsCalibration calibrate_eps0(const Model& model, const std::vector<HybridPoint>& samples, const std::vector<double>& qs,
                              double eps_start = 1e-3, double eps_cap = 1e6);

}  // namespace syz
