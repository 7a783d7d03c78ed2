#pragma once

// Hybrid coordinates (t, theta, w_i, theta_i) on supported model charts:
// a local snc polydisk, and the vertex/edge charts of the Hesse pencil.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "syz/model.hpp"
#include "syz/transfer.hpp"

namespace syz {

enum class ChartKind { Maximal, HesseEdge };

struct ModelChart {
  int id = 0;
  std::string model_id;
  ChartKind kind = ChartKind::Maximal;
  IndexSet S;               // component ids meeting the chart, in coordinate order
  std::vector<int> m;        // multiplicities, aligned with S
  std::vector<int> nu;       // discrepancies, aligned with S
  std::vector<bool> essential;
  double radius = 0.99 / M_E;  // polydisk radius, must stay below 1/e
  int hesse_index = -1;      // vertex chart k, or the line id of an edge chart
  // Unit c(z) of the volume section in this chart (maximal charts only).
  std::function<std::complex<double>(const Eigen::VectorXcd&)> unit;

  int N() const { return static_cast<int>(S.size()); }
};

struct HybridPoint {
  int chart = 0;
  double t = 0.0;
  double theta = 0.0;
  Eigen::VectorXd w;
  Eigen::VectorXd th;
  // Complex coordinates that the tropical data does not determine:
  // the residual z_a of a vertex-chart point at t = 0 with w_a = 0, or the
  // stratum coordinate y of an edge-chart point.
  std::vector<std::complex<double>> residual;
};

struct BasicFunctionRecord {
  double t = 0.0;
  double g = 0.0;  // log|f| = -1/t
  Eigen::VectorXd r, s, ti, w, u, v, sigma;
};

class Model {
 public:
  static Model from_file(const ModelFile& file);
  static Model local_snc(int n, const std::vector<int>& m, const std::vector<int>& nu, const std::string& unit = "1");
  static Model hesse();

  const ModelFile& file() const { return file_; }
  ModelType type() const { return file_.type; }
  int n() const { return file_.degeneration.n; }
  const std::vector<ModelChart>& charts() const { return charts_; }
  const ModelChart& chart(int id) const;
  // Maximal chart covering the maximal face J, or -1.
  int chart_of_face(const IndexSet& J) const;

  // Chart coordinates of a maximal-chart point at t > 0.
  Eigen::VectorXcd to_z(const HybridPoint& p) const;
  HybridPoint from_z(int chart, const Eigen::VectorXcd& z) const;
  bool in_domain(const HybridPoint& p) const;

  // Normalizing exponent kappa = min nu/m, and the constant of the volume
  // section on the maximal stratum of the chart.
  double kappa() const { return kappa_; }
  std::complex<double> c0(int chart) const;

 private:
  ModelFile file_;
  std::vector<ModelChart> charts_;
  double kappa_ = 1.0;
};

BasicFunctionRecord basic_functions(const Model& model, const HybridPoint& p);

// The positive-radius point with the same (theta, w, theta_i).
HybridPoint from_radius_zero(const Model& model, const HybridPoint& p, double t);

// A radius-zero point of a maximal chart from tropical data; theta_1 is
// solved from the fiber constraint sum m_i theta_i = theta.
HybridPoint radius_zero_point(const Model& model, int chart, const Eigen::VectorXd& w, double theta,
                              const Eigen::VectorXd& th_rest);

double wrap_angle(double a);  // to [0, 2 pi)

// Hesse pencil charts. Vertex chart k sits at the point where the lines of
// its two components meet; the forward transition goes to the edge chart of
// the line of its second component, through the overlap w_a < 1/3.
std::complex<double> hesse_xa(std::complex<double> za, std::complex<double> zb);
std::complex<double> hesse_small_root(std::complex<double> y, std::complex<double> f);
std::complex<double> hesse_unit(std::complex<double> za, std::complex<double> zb);
HybridPoint hesse_chart_transition(const Model& model, const HybridPoint& p);
HybridPoint hesse_chart_transition_inverse(const Model& model, const HybridPoint& q);
// Collar coordinate -1/(m log|y|) of an edge-chart point.
double hesse_p_coordinate(const Model& model, const HybridPoint& q);

}  // namespace syz
