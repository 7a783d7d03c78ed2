#pragma once

// Lagrangian torus fibers at radius zero, the symplectic lift of the radial
// field, and RK4 transport of sampled tori to positive radius.

#include <vector>

#include <Eigen/Dense>

#include "syz/expanded_skeleton.hpp"
#include "syz/hybrid_coords.hpp"
#include "syz/kahler_family.hpp"
#include "syz/path.hpp"

namespace syz {

// Maximal-chart points map to the rounded coordinates -eta(w) of their
// maximal cell; radius-zero points on a submaximal stratum and Hesse edge
// points map to the submaximal cell with the canonical Reeb parameter |z_I|.
BasePoint fibration_map(const Model& model, const ExpandedSkeleton& E, const HybridPoint& p);

struct Lift {
  Eigen::VectorXd v;  // hybrid components
  double condition = 0.0;
};

// The vector v with dt(v) = dt, dtheta(v) = dtheta and omega_q(v, u) = 0 for
// every fiber vector u. Throws DegenerateForm past the condition threshold.
Lift symplectic_lift(const Model& model, const HybridPoint& p, const FormParams& fp, double dt = 1.0,
                     double dtheta = 0.0, double max_condition = 1e12);

// Closed-form lift of the angular field at q = 1, t = 0:
// sum_k zeta(u_k) d/dtheta_k / sum_k m_k zeta(u_k).
Eigen::VectorXd monodromy_field(const Model& model, const HybridPoint& p);

struct TrajectoryState {
  double h = 0.0;
  HybridPoint point;
};

struct Trajectory {
  std::vector<TrajectoryState> states;
  double step = 0.0;  // in t
  bool escaped = false;
};

struct TorusFiber {
  int chart = 0;
  Eigen::VectorXd w0;    // radius-zero tropical coordinates
  double theta0 = 0.0;   // radius-zero total angle
  int resolution = 0;    // samples per circle factor
  int n = 0;             // number of circle factors
  double h = 0.0;
  double t = 0.0;
  double q = 0.0;        // q used at the final step
  bool escaped = false;
  std::vector<HybridPoint> samples;  // lattice order, last angle fastest
  std::vector<Trajectory> trajectories;  // filled by transport when requested

  int index(const std::vector<int>& lattice) const;
  std::vector<int> lattice(int index) const;
};

// Samples theta_k = 2 pi j_k / resolution for k = 2..N, theta_1 from sum m theta = theta.
TorusFiber radius_zero_torus(const Model& model, int chart, const Eigen::VectorXd& w, double theta, int resolution);

enum class QMode { Instantaneous, Fixed };

struct TransportOptions {
  int steps = 64;
  double eps = 0.1;
  QMode mode = QMode::Instantaneous;
  bool record = false;
};

TorusFiber transport(const Model& model, const TorusFiber& fiber, const AdmissiblePath& path, double h_target,
                     const TransportOptions& opt = {});

// max |omega_q(tau_a, tau_b)| over samples and lattice direction pairs, with
// central-difference tangents along the lattice. Needs >= 8 samples per circle.
double lagrangian_residual(const Model& model, const TorusFiber& fiber, const FormParams& fp);

// Lattice tangent of direction a at a sample, in hybrid components.
Eigen::VectorXd lattice_tangent(const ModelChart& c, const TorusFiber& fiber, int sample, int direction);

}  // namespace syz
