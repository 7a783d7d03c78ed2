#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "syz/dual_complex.hpp"
#include "syz/model.hpp"

namespace syz {

// Rounded simplex of a face: coordinatewise v_i = -eta(w_i).
struct RoundedSimplex {
  IndexSet face;

  Eigen::VectorXd to_cell(const Eigen::VectorXd& w) const;
  Eigen::VectorXd to_face(const Eigen::VectorXd& v) const;
  bool contains(const Eigen::VectorXd& v, double tol = 1e-12) const;
};

RoundedSimplex rounded_simplex(const IndexSet& face);

class IvyGraph {
 public:
  struct Vertex {
    int id = 0;
    double level = 0.0;
    int degree = 0;
  };
  struct Edge {
    int lower = -1, upper = -1;  // vertex index, or -1 for an open end
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    IndexSet glue_lower, glue_upper;
  };
  struct OpenEnd {
    int edge = 0;
    bool upper = false;
    IndexSet glue;
  };

  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  std::vector<int> ram() const;       // vertex indices of degree >= 3
  std::vector<int> boundary() const;  // vertex indices of degree 1
  std::vector<OpenEnd> open_ends() const;
  int euler_characteristic() const;
};

// Validates and builds an ivy. Rejects degree-2 vertices, non-increasing edge
// levels, endpoint levels that disagree with their vertex, and open ends whose
// parameter does not run off to 0 or infinity.
IvyGraph ivy_from_data(const IvyData& data);

// The single open edge of h = |z| on C*, p in (0, inf).
IvyGraph canonical_ivy(const IndexSet& zero_end, const IndexSet& inf_end);

enum class CellKind { Maximal, Submaximal };

struct Cell {
  int id = 0;
  CellKind kind = CellKind::Maximal;
  IndexSet face;
  int ivy_edge = -1;  // submaximal cells: one per ivy edge
};

struct Gluing {
  int submaximal_cell = 0;
  int maximal_cell = 0;
  bool upper_end = false;  // which end of the ivy edge is glued
};

struct ExpandedSkeleton {
  Skeleton skeleton;
  std::vector<Cell> cells;
  std::map<IndexSet, IvyGraph> ivies;
  std::vector<Gluing> gluings;

  int cell_of_maximal(const IndexSet& J) const;
  std::vector<int> cells_of_submaximal(const IndexSet& I) const;
  bool ram_empty() const;
  bool outer_boundary_empty() const;
  int euler_characteristic() const;
  // undirected adjacency between cells induced by the gluings
  std::vector<std::pair<int, int>> adjacency() const;
};

ExpandedSkeleton build_expanded(const Skeleton& sk, const std::vector<IvySpec>& ivies = {});

struct BasePoint {
  int cell = 0;
  Eigen::VectorXd v;  // rounded coordinates on the face of the cell
  double p = std::numeric_limits<double>::quiet_NaN();  // ivy parameter on submaximal cells
  double glue_p = std::numeric_limits<double>::quiet_NaN();  // collar coordinate -1/(m log p)
};

enum class BaseClass { Interior, Ram, OuterBoundary, BoundaryCorner };
const char* to_string(BaseClass c);

BaseClass classify_base_point(const ExpandedSkeleton& E, const BasePoint& b);

}  // namespace syz
