#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "syz/model.hpp"

namespace syz {

// S = {i : nu_i/m_i minimal}, compared by exact integer cross-multiplication.
IndexSet essential_set(const SncDegeneration& model);

struct Skeleton {
  SncDegeneration parent;
  IndexSet S;
  std::vector<IndexSet> faces;  // strata contained in S, sorted

  int N() const { return parent.N(); }
  int dim() const;  // max |I| - 1 over faces, -1 when empty
  bool has_face(const IndexSet& I) const;
  // Vertex e_i of the standard simplex in R^N for component id i.
  Eigen::VectorXd vertex(int id) const;
  // Barycentric embedding of face coordinates (ordered as in I).
  Eigen::VectorXd embed(const IndexSet& I, const Eigen::VectorXd& w) const;
  // Smallest face containing p, or empty if p is not on the complex.
  IndexSet carrier(const Eigen::VectorXd& p, double tol = 1e-12) const;
};

Skeleton build_skeleton(const SncDegeneration& model, const IndexSet& S);

enum class FaceClass { Maximal, Submaximal, Lower };
const char* to_string(FaceClass c);

std::map<IndexSet, FaceClass> classify_faces(const Skeleton& sk);

struct PseudomanifoldVerdict {
  bool ok = false;
  bool maximal_dimension = false;  // dim sk == n
  std::vector<IndexSet> violations;  // submaximal faces not in exactly two maximal faces
  bool connected = false;
  std::string reason;
};

PseudomanifoldVerdict pseudomanifold_check(const Skeleton& sk);

// Mesh graph refining every face of the skeleton at a given resolution. Nodes
// are lattice points k/res; every pair of nodes sharing a face is joined by
// its euclidean segment, so within-face distances are exact.
class SkeletonMesh {
 public:
  SkeletonMesh(const Skeleton& sk, int resolution);

  double distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;
  // Largest graph distance between lattice nodes.
  double diameter() const;
  int resolution() const { return resolution_; }
  size_t node_count() const { return nodes_.size(); }

 private:
  const Skeleton* sk_;
  int resolution_;
  std::vector<Eigen::VectorXd> nodes_;
  std::vector<std::vector<int>> face_nodes_;  // per face index in sk_->faces
  std::vector<std::vector<std::pair<int, double>>> adj_;

  std::vector<double> dijkstra(const std::vector<std::pair<int, double>>& sources) const;
  std::vector<std::pair<int, double>> attach(const Eigen::VectorXd& p, const IndexSet& carrier) const;
};

double skeleton_distance(const Skeleton& sk, const Eigen::VectorXd& p, const Eigen::VectorXd& q, int mesh_resolution);

}  // namespace syz
