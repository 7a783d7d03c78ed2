#include "syz/expanded_skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "syz/errors.hpp"
#include "syz/transfer.hpp"

namespace syz {

Eigen::VectorXd RoundedSimplex::to_cell(const Eigen::VectorXd& w) const {
  if (w.size() != static_cast<Eigen::Index>(face.size()))
    throw Error(ErrorKind::Domain, "expanded_skeleton", "rounded_simplex", "coordinate count does not match face");
  Eigen::VectorXd v(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) v(k) = -eta(std::max(w(k), 0.0));
  return v;
}

Eigen::VectorXd RoundedSimplex::to_face(const Eigen::VectorXd& v) const {
  if (v.size() != static_cast<Eigen::Index>(face.size()))
    throw Error(ErrorKind::Domain, "expanded_skeleton", "rounded_simplex", "coordinate count does not match face");
  Eigen::VectorXd w(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) w(k) = eta_inv(std::max(-v(k), 0.0));
  return w;
}

bool RoundedSimplex::contains(const Eigen::VectorXd& v, double tol) const {
  if (v.size() != static_cast<Eigen::Index>(face.size())) return false;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (v(k) > tol || v(k) < -1.0 - tol) return false;
  return std::abs(to_face(v).sum() - 1.0) <= 1e-10;
}

RoundedSimplex rounded_simplex(const IndexSet& face) {
  if (face.empty()) throw Error(ErrorKind::Domain, "expanded_skeleton", "rounded_simplex", "empty face");
  return RoundedSimplex{face};
}

std::vector<int> IvyGraph::ram() const {
  std::vector<int> out;
  for (size_t k = 0; k < vertices.size(); ++k)
    if (vertices[k].degree >= 3) out.push_back(static_cast<int>(k));
  return out;
}

std::vector<int> IvyGraph::boundary() const {
  std::vector<int> out;
  for (size_t k = 0; k < vertices.size(); ++k)
    if (vertices[k].degree == 1) out.push_back(static_cast<int>(k));
  return out;
}

std::vector<IvyGraph::OpenEnd> IvyGraph::open_ends() const {
  std::vector<OpenEnd> out;
  for (size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].lower < 0) out.push_back({static_cast<int>(e), false, edges[e].glue_lower});
    if (edges[e].upper < 0) out.push_back({static_cast<int>(e), true, edges[e].glue_upper});
  }
  return out;
}

int IvyGraph::euler_characteristic() const {
  // an open end deformation retracts like a leaf, so count it as a vertex
  return static_cast<int>(vertices.size() + open_ends().size()) - static_cast<int>(edges.size());
}

IvyGraph ivy_from_data(const IvyData& data) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidIvy, "expanded_skeleton", "ivy_from_data", what); };
  IvyGraph g;
  std::map<int, int> index;
  for (const auto& v : data.vertices) {
    if (!index.emplace(v.id, static_cast<int>(g.vertices.size())).second) bad("duplicate vertex id " + std::to_string(v.id));
    if (!(v.level > 0.0) || !std::isfinite(v.level)) bad("vertex levels must lie in (0, inf)");
    g.vertices.push_back({v.id, v.level, 0});
  }
  if (data.edges.empty()) bad("an ivy needs at least one edge");
  for (size_t e = 0; e < data.edges.size(); ++e) {
    const auto& d = data.edges[e];
    std::string tag = "edge " + std::to_string(e);
    if (!(d.lo < d.hi)) bad(tag + ": non-monotone parameter (levels must increase along the edge)");
    IvyGraph::Edge edge;
    edge.lo = d.lo;
    edge.hi = d.hi;
    edge.glue_lower = d.glue_lower;
    edge.glue_upper = d.glue_upper;
    if (d.lower) {
      auto it = index.find(*d.lower);
      if (it == index.end()) bad(tag + ": unknown lower vertex " + std::to_string(*d.lower));
      edge.lower = it->second;
      if (std::abs(g.vertices[static_cast<size_t>(edge.lower)].level - d.lo) > 1e-12) bad(tag + ": lower level differs from its vertex");
      ++g.vertices[static_cast<size_t>(edge.lower)].degree;
    } else if (d.lo != 0.0) {
      bad(tag + ": open lower end must run to p = 0 (p is proper)");
    }
    if (d.upper) {
      auto it = index.find(*d.upper);
      if (it == index.end()) bad(tag + ": unknown upper vertex " + std::to_string(*d.upper));
      edge.upper = it->second;
      if (std::abs(g.vertices[static_cast<size_t>(edge.upper)].level - d.hi) > 1e-12) bad(tag + ": upper level differs from its vertex");
      ++g.vertices[static_cast<size_t>(edge.upper)].degree;
    } else if (!std::isinf(d.hi)) {
      bad(tag + ": open upper end must run to p = inf (p is proper)");
    }
    g.edges.push_back(edge);
  }
  for (const auto& v : g.vertices) {
    if (v.degree == 0) bad("vertex " + std::to_string(v.id) + " is isolated");
    if (v.degree == 2) bad("vertex " + std::to_string(v.id) + " has degree 2");
  }
  return g;
}

IvyGraph canonical_ivy(const IndexSet& zero_end, const IndexSet& inf_end) {
  IvyData d;
  IvyEdgeData e;
  e.lo = 0.0;
  e.hi = std::numeric_limits<double>::infinity();
  e.glue_lower = zero_end;
  e.glue_upper = inf_end;
  d.edges.push_back(e);
  return ivy_from_data(d);
}

int ExpandedSkeleton::cell_of_maximal(const IndexSet& J) const {
  for (const auto& c : cells)
    if (c.kind == CellKind::Maximal && c.face == J) return c.id;
  return -1;
}

std::vector<int> ExpandedSkeleton::cells_of_submaximal(const IndexSet& I) const {
  std::vector<int> out;
  for (const auto& c : cells)
    if (c.kind == CellKind::Submaximal && c.face == I) out.push_back(c.id);
  return out;
}

bool ExpandedSkeleton::ram_empty() const {
  for (const auto& [I, g] : ivies)
    if (!g.ram().empty()) return false;
  return true;
}

bool ExpandedSkeleton::outer_boundary_empty() const {
  for (const auto& [I, g] : ivies)
    if (!g.boundary().empty()) return false;
  return true;
}

int ExpandedSkeleton::euler_characteristic() const {
  // All cells and collars are contractible up to the ivy factor, and collars
  // meet pairwise only, so inclusion-exclusion over the gluings is exact.
  int chi = 0;
  for (const auto& c : cells)
    if (c.kind == CellKind::Maximal) chi += 1;
  for (const auto& [I, g] : ivies) chi += g.euler_characteristic();
  chi -= static_cast<int>(gluings.size());
  return chi;
}

std::vector<std::pair<int, int>> ExpandedSkeleton::adjacency() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& gl : gluings)
    edges.insert({std::min(gl.submaximal_cell, gl.maximal_cell), std::max(gl.submaximal_cell, gl.maximal_cell)});
  return {edges.begin(), edges.end()};
}

ExpandedSkeleton build_expanded(const Skeleton& sk, const std::vector<IvySpec>& ivies) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Gluing, "expanded_skeleton", "build_expanded", what); };
  ExpandedSkeleton E;
  E.skeleton = sk;
  auto cls = classify_faces(sk);
  std::vector<IndexSet> maximal, submaximal;
  for (const auto& [f, c] : cls) {
    if (c == FaceClass::Maximal) maximal.push_back(f);
    if (c == FaceClass::Submaximal) submaximal.push_back(f);
  }
  if (maximal.empty() && submaximal.empty()) bad("skeleton has no maximal or submaximal face");
  for (const auto& J : maximal) E.cells.push_back({static_cast<int>(E.cells.size()), CellKind::Maximal, J, -1});
  for (const auto& s : ivies)
    if (std::find(submaximal.begin(), submaximal.end(), s.face) == submaximal.end()) {
      std::string f;
      for (int i : s.face) f += (f.empty() ? "" : ",") + std::to_string(i);
      bad("ivy given for {" + f + "}, which is not a submaximal face of the skeleton");
    }

  auto face_str = [](const IndexSet& I) {
    std::string s = "{";
    for (size_t k = 0; k < I.size(); ++k) s += (k ? "," : "") + std::to_string(I[k]);
    return s + "}";
  };

  for (const auto& I : submaximal) {
    std::vector<IndexSet> incident;
    for (const auto& J : maximal)
      if (std::includes(J.begin(), J.end(), I.begin(), I.end())) incident.push_back(J);
    const IvySpec* spec = nullptr;
    for (const auto& s : ivies)
      if (s.face == I) spec = &s;

    IvyGraph g;
    if (spec == nullptr || spec->canonical) {
      if (incident.size() == 2) {
        IndexSet zero = incident[0], inf = incident[1];
        if (spec != nullptr && !spec->zero_end.empty()) {
          if (spec->zero_end == incident[1]) std::swap(zero, inf);
          else if (spec->zero_end != incident[0])
            bad("ivy for " + face_str(I) + ": zero_end " + face_str(spec->zero_end) + " is not an incident maximal face");
        }
        g = canonical_ivy(zero, inf);
      } else if (incident.size() == 1) {
        // one puncture: the Morse function attains a maximum
        IvyData d;
        d.vertices.push_back({1, 1.0});
        IvyEdgeData e;
        e.lo = 0.0;
        e.hi = 1.0;
        e.upper = 1;
        e.glue_lower = incident[0];
        d.edges.push_back(e);
        g = ivy_from_data(d);
      } else if (incident.empty()) {
        // closed stratum: minimum and maximum
        IvyData d;
        d.vertices = {{1, 1.0}, {2, 2.0}};
        IvyEdgeData e;
        e.lower = 1;
        e.upper = 2;
        e.lo = 1.0;
        e.hi = 2.0;
        d.edges.push_back(e);
        g = ivy_from_data(d);
      } else {
        bad("canonical ivy for " + face_str(I) + " needs at most two incident maximal faces; supply an explicit ivy");
      }
    } else {
      g = ivy_from_data(spec->data);
    }

    // every open end glues to a distinct incident maximal face, and every incident face is matched
    std::set<IndexSet> matched;
    for (const auto& end : g.open_ends()) {
      if (end.glue.empty()) bad("ivy for " + face_str(I) + ": open end of edge " + std::to_string(end.edge) + " is not glued");
      if (std::find(incident.begin(), incident.end(), end.glue) == incident.end())
        bad("ivy for " + face_str(I) + ": edge end glued to " + face_str(end.glue) + ", which is not an incident maximal face");
      if (!matched.insert(end.glue).second) bad("ivy for " + face_str(I) + ": two edge ends glued to " + face_str(end.glue));
    }
    for (const auto& J : incident)
      if (!matched.count(J)) bad("ivy for " + face_str(I) + ": incident maximal face " + face_str(J) + " has no edge end");

    std::vector<int> edge_cells;
    for (size_t e = 0; e < g.edges.size(); ++e) {
      int id = static_cast<int>(E.cells.size());
      E.cells.push_back({id, CellKind::Submaximal, I, static_cast<int>(e)});
      edge_cells.push_back(id);
    }
    for (const auto& end : g.open_ends())
      E.gluings.push_back({edge_cells[static_cast<size_t>(end.edge)], E.cell_of_maximal(end.glue), end.upper});
    E.ivies.emplace(I, std::move(g));
  }
  return E;
}

const char* to_string(BaseClass c) {
  switch (c) {
    case BaseClass::Interior: return "interior";
    case BaseClass::Ram: return "Ram";
    case BaseClass::OuterBoundary: return "boundary_out";
    case BaseClass::BoundaryCorner: return "boundary_corner";
  }
  return "interior";
}

BaseClass classify_base_point(const ExpandedSkeleton& E, const BasePoint& b) {
  auto off = [](const std::string& why) {
    throw Error(ErrorKind::Domain, "expanded_skeleton", "classify_base_point", "point off complex: " + why);
  };
  if (b.cell < 0 || b.cell >= static_cast<int>(E.cells.size())) off("unknown cell");
  const Cell& cell = E.cells[static_cast<size_t>(b.cell)];
  RoundedSimplex rs{cell.face};
  if (!rs.contains(b.v)) off("coordinates outside the rounded simplex");
  const double tol = 1e-12;
  int zeros = 0;
  for (Eigen::Index k = 0; k < b.v.size(); ++k) zeros += (b.v(k) > -tol) ? 1 : 0;

  if (cell.kind == CellKind::Maximal) {
    if (zeros == 0) return BaseClass::Interior;
    if (zeros >= 2) return BaseClass::BoundaryCorner;
    // a facet point is interior when that facet's collar is glued to an ivy end
    IndexSet facet;
    for (size_t k = 0; k < cell.face.size(); ++k)
      if (b.v(static_cast<Eigen::Index>(k)) <= -tol) facet.push_back(cell.face[k]);
    for (const auto& gl : E.gluings)
      if (gl.maximal_cell == cell.id && E.cells[static_cast<size_t>(gl.submaximal_cell)].face == facet)
        return BaseClass::Interior;
    return BaseClass::BoundaryCorner;
  }

  const IvyGraph& g = E.ivies.at(cell.face);
  const IvyGraph::Edge& edge = g.edges[static_cast<size_t>(cell.ivy_edge)];
  if (!(b.p >= edge.lo && b.p <= edge.hi) || std::isnan(b.p)) off("ivy parameter outside the edge");
  auto at_vertex = [&](int vtx, double level) { return vtx >= 0 && std::abs(b.p - level) <= tol * std::max(1.0, level); };
  for (auto [vtx, level] : {std::pair{edge.lower, edge.lo}, std::pair{edge.upper, edge.hi}}) {
    if (at_vertex(vtx, level)) {
      int deg = g.vertices[static_cast<size_t>(vtx)].degree;
      if (deg >= 3) return BaseClass::Ram;
      if (deg == 1) return BaseClass::OuterBoundary;
    }
  }
  if ((edge.lower < 0 && b.p <= edge.lo) || (edge.upper < 0 && b.p >= edge.hi)) off("open end of an ivy edge");
  if (zeros > 0) return BaseClass::BoundaryCorner;
  return BaseClass::Interior;
}

}  // namespace syz
