#pragma once

// Numerical limit experiments along a decreasing h-schedule. Every suite
// reads the same transported fibers held by a PathSweep.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "syz/fibration_flow.hpp"

namespace syz {

// "geometric:a,b,k" (k points from a down to b) or "list:h1,h2,...".
std::vector<double> parse_schedule(const std::string& spec);

struct SweepConfig {
  AdmissiblePath path = AdmissiblePath::parse("t=h,q=h");
  std::vector<double> schedule;
  double eps = 0.1;
  int chart = 0;
  int grid = 32;   // samples per circle factor
  int steps = 64;  // RK4 steps per transport
  QMode mode = QMode::Instantaneous;
  double theta = 0.0;
  std::vector<Eigen::VectorXd> levels;  // radius-zero tropical coordinates of the tori
};

struct PathSweep {
  SweepConfig config;
  std::vector<double> h;                      // the schedule
  std::vector<std::vector<TorusFiber>> fibers;  // [h index][level index]

  FormParams params(size_t k) const;
};

PathSweep run_sweep(const Model& model, const SweepConfig& config);

// w levels (1 - x, x) for x on a uniform grid of [lo, hi] (n = 1 charts).
std::vector<Eigen::VectorXd> segment_levels(double lo, double hi, int count);
// Interior lattice of the open simplex with the given number of points per edge.
std::vector<Eigen::VectorXd> simplex_levels(int N, int per_edge);

struct MetricLimitRecord {
  double h = 0.0, t = 0.0, q = 0.0;
  double residual = 0.0;      // max |t g - eps (1 - q) sum dw_i^2| on the w-block
  double theta_length = 0.0;  // sqrt(t g(e, e)) for the angle probe e_2
};

// eps sum_i (dw_i)^2 in the pair-ordered fiber basis (zero on angle directions).
Eigen::MatrixXd limit_metric(const ModelChart& c, double eps);
std::vector<MetricLimitRecord> metric_limit_check(const Model& model, const PathSweep& sweep);

struct GHRecord {
  double h = 0.0, t = 0.0, q = 0.0;
  double distortion = 0.0;       // max |d_h - d_std|
  double torus_diameter = 0.0;   // D_h
  double lower_violation = 0.0;  // max (sqrt(1-q) d_std - d_h), <= 0 inside the band
  double upper_violation = 0.0;  // max (d_h - d_std - D_h), <= 0 inside the band
  double diameter = 0.0;         // max d_h
  double max_fiber_pair = 0.0;   // max d_h over pairs in one torus
  bool band_ok = false;
  size_t pairs = 0;
};

struct GHReport {
  std::vector<GHRecord> records;
  bool monotone = false;  // distortion non-increasing along the schedule
  bool band_ok = false;
};

// Needs a sweep over a one-dimensional family of circle fibers (n = 1) whose
// levels are ordered along the base segment.
GHReport gh_distortion(const Model& model, const PathSweep& sweep, double band_tol = 1e-12);

struct VolumeFractionRecord {
  double h = 0.0, t = 0.0;
  double numerator = 0.0, denominator = 0.0, ratio = 0.0;
  double error_estimate = 0.0;
};

struct VolumeOptions {
  double window = 0.99 / M_E;  // polydisk radius of the vertex charts
  int radial_nodes = 20;        // Gauss-Legendre nodes per radial panel
  int radial_panels = 16;
  int angular_nodes = 64;       // trapezoid nodes on circles
};

// Hesse model: generic-region volume over total fiber volume of t vol^Omega
// at the fiber |f| = exp(-1/t). Exactly 1 at t = 0.
VolumeFractionRecord volume_fraction(const Model& model, double t, const VolumeOptions& opt = {});
std::vector<VolumeFractionRecord> volume_fraction_sweep(const Model& model, const AdmissiblePath& path,
                                                        const std::vector<double>& schedule,
                                                        const VolumeOptions& opt = {});

struct CplusRecord {
  double h = 0.0, t = 0.0, q = 0.0;
  double min = 0.0, max = 0.0, mean = 0.0, spread = 0.0;
  double limit = 0.0;  // eps^n (n + 1) |c0|^-2
  size_t used = 0, excluded = 0;  // excluded: samples outside the generic region
};

std::vector<CplusRecord> ricci_flat_trend(const Model& model, const PathSweep& sweep);

struct PhaseRecord {
  double h = 0.0, t = 0.0;
  double deviation = 0.0;  // sup |varpi_h - varpi_0| over the lattice of the first level
  std::vector<long> winding;  // one integer per lattice generator
  double max_modulus_error = 0.0;  // max ||varpi| - 1|
};

struct PhaseReport {
  bool tame = false;
  std::complex<double> varpi0;  // i^n conj(c0)/|c0|, sign fixed at the first sweep point
  std::vector<PhaseRecord> records;
};

PhaseReport phase_specialty(const Model& model, const PathSweep& sweep);

// Branch-tracked winding number of a closed sequence of unit phases.
long winding_number(const std::vector<std::complex<double>>& loop);

struct CalibrationRecord {
  double h = 0.0, t = 0.0;
  double metric_volume = 0.0;   // int sqrt det(tau^T (t g) tau)
  double calibrated = 0.0;      // int sqrt(c_+) Re(varpi0 Omega_new(tau))
  double ratio = 0.0;
};

std::vector<CalibrationRecord> calibration_ratio(const Model& model, const PathSweep& sweep,
                                                 std::complex<double> varpi0);

}  // namespace syz
