#include "syz/dual_complex.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "syz/errors.hpp"

namespace syz {

IndexSet essential_set(const SncDegeneration& model) {
  if (model.components.empty())
    throw Error(ErrorKind::InvalidModel, "dual_complex", "essential_set", "empty component list");
  // ratio a = nu_a/m_a; a < b  <=>  nu_a*m_b < nu_b*m_a since multiplicities are positive
  const Component* best = &model.components.front();
  for (const auto& c : model.components) {
    if (c.m < 1) throw Error(ErrorKind::InvalidModel, "dual_complex", "essential_set", "non-positive multiplicity");
    if (static_cast<long long>(c.nu) * best->m < static_cast<long long>(best->nu) * c.m) best = &c;
  }
  IndexSet S;
  for (const auto& c : model.components)
    if (static_cast<long long>(c.nu) * best->m == static_cast<long long>(best->nu) * c.m) S.push_back(c.id);
  std::sort(S.begin(), S.end());
  return S;
}

int Skeleton::dim() const {
  int d = -1;
  for (const auto& f : faces) d = std::max(d, static_cast<int>(f.size()) - 1);
  return d;
}

bool Skeleton::has_face(const IndexSet& I) const { return std::binary_search(faces.begin(), faces.end(), I); }

Eigen::VectorXd Skeleton::vertex(int id) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(N());
  v(parent.position(id)) = 1.0;
  return v;
}

Eigen::VectorXd Skeleton::embed(const IndexSet& I, const Eigen::VectorXd& w) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(N());
  for (size_t k = 0; k < I.size(); ++k) v(parent.position(I[k])) = w(static_cast<Eigen::Index>(k));
  return v;
}

IndexSet Skeleton::carrier(const Eigen::VectorXd& p, double tol) const {
  if (p.size() != N()) return {};
  double sum = 0.0;
  IndexSet support;
  for (int k = 0; k < N(); ++k) {
    if (p(k) < -tol) return {};
    sum += p(k);
    if (p(k) > tol) support.push_back(parent.components[static_cast<size_t>(k)].id);
  }
  std::sort(support.begin(), support.end());
  if (std::abs(sum - 1.0) > tol * N() || support.empty()) return {};
  return has_face(support) ? support : IndexSet{};
}

Skeleton build_skeleton(const SncDegeneration& model, const IndexSet& S) {
  for (int id : S)
    if (model.position(id) < 0)
      throw Error(ErrorKind::Domain, "dual_complex", "build_skeleton", "S contains unknown id " + std::to_string(id));
  Skeleton sk;
  sk.parent = model;
  sk.S = S;
  std::sort(sk.S.begin(), sk.S.end());
  for (const auto& I : model.strata)
    if (std::includes(sk.S.begin(), sk.S.end(), I.begin(), I.end())) sk.faces.push_back(I);
  std::sort(sk.faces.begin(), sk.faces.end());
  return sk;
}

const char* to_string(FaceClass c) {
  switch (c) {
    case FaceClass::Maximal: return "maximal";
    case FaceClass::Submaximal: return "submaximal";
    case FaceClass::Lower: return "lower";
  }
  return "lower";
}

std::map<IndexSet, FaceClass> classify_faces(const Skeleton& sk) {
  std::map<IndexSet, FaceClass> out;
  const size_t n = static_cast<size_t>(sk.parent.n);
  for (const auto& f : sk.faces) {
    if (f.size() == n + 1) out[f] = FaceClass::Maximal;
    else if (f.size() == n) out[f] = FaceClass::Submaximal;
    else out[f] = FaceClass::Lower;
  }
  return out;
}

PseudomanifoldVerdict pseudomanifold_check(const Skeleton& sk) {
  PseudomanifoldVerdict v;
  const int n = sk.parent.n;
  v.maximal_dimension = sk.dim() == n;
  if (!v.maximal_dimension) {
    v.reason = "not maximal: dim = " + std::to_string(sk.dim()) + " but n = " + std::to_string(n);
    return v;
  }
  auto cls = classify_faces(sk);
  std::vector<IndexSet> maximal, submaximal;
  for (const auto& [f, c] : cls) {
    if (c == FaceClass::Maximal) maximal.push_back(f);
    if (c == FaceClass::Submaximal) submaximal.push_back(f);
  }
  auto contains = [](const IndexSet& big, const IndexSet& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
  };
  for (const auto& I : submaximal) {
    int count = 0;
    for (const auto& J : maximal) count += contains(J, I) ? 1 : 0;
    if (count != 2) v.violations.push_back(I);
  }
  // connectivity of maximal faces through shared submaximal faces
  std::vector<int> comp(maximal.size(), -1);
  std::function<void(size_t, int)> dfs = [&](size_t a, int c) {
    comp[a] = c;
    for (size_t b = 0; b < maximal.size(); ++b) {
      if (comp[b] >= 0) continue;
      IndexSet common;
      std::set_intersection(maximal[a].begin(), maximal[a].end(), maximal[b].begin(), maximal[b].end(),
                            std::back_inserter(common));
      if (static_cast<int>(common.size()) == n) dfs(b, c);
    }
  };
  int ncomp = 0;
  for (size_t a = 0; a < maximal.size(); ++a)
    if (comp[a] < 0) dfs(a, ncomp++);
  v.connected = ncomp == 1;
  v.ok = v.violations.empty() && v.connected;
  if (!v.violations.empty()) v.reason = "submaximal faces not contained in exactly two maximal faces";
  else if (!v.connected) v.reason = "maximal faces are not connected through submaximal faces";
  return v;
}

namespace {

// All compositions of `total` into `parts` non-negative integers.
void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    cur.push_back(k);
    compositions(total - k, parts - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

SkeletonMesh::SkeletonMesh(const Skeleton& sk, int resolution) : sk_(&sk), resolution_(resolution) {
  if (resolution < 1) throw Error(ErrorKind::Range, "dual_complex", "skeleton_distance", "mesh_resolution must be >= 1");
  std::map<std::vector<int>, int> index;
  face_nodes_.resize(sk.faces.size());
  for (size_t fi = 0; fi < sk.faces.size(); ++fi) {
    const IndexSet& I = sk.faces[fi];
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    compositions(resolution, static_cast<int>(I.size()), cur, comps);
    for (const auto& c : comps) {
      std::vector<int> key(static_cast<size_t>(sk.N()), 0);
      for (size_t k = 0; k < I.size(); ++k) key[static_cast<size_t>(sk.parent.position(I[k]))] = c[k];
      auto [it, fresh] = index.emplace(key, static_cast<int>(nodes_.size()));
      if (fresh) {
        Eigen::VectorXd x(sk.N());
        for (int k = 0; k < sk.N(); ++k) x(k) = static_cast<double>(key[static_cast<size_t>(k)]) / resolution;
        nodes_.push_back(x);
      }
      face_nodes_[fi].push_back(it->second);
    }
  }
  adj_.assign(nodes_.size(), {});
  std::set<std::pair<int, int>> done;
  for (const auto& fn : face_nodes_) {
    for (size_t a = 0; a < fn.size(); ++a)
      for (size_t b = a + 1; b < fn.size(); ++b) {
        int i = fn[a], j = fn[b];
        if (!done.insert({std::min(i, j), std::max(i, j)}).second) continue;
        double d = (nodes_[static_cast<size_t>(i)] - nodes_[static_cast<size_t>(j)]).norm();
        adj_[static_cast<size_t>(i)].push_back({j, d});
        adj_[static_cast<size_t>(j)].push_back({i, d});
      }
  }
}

std::vector<double> SkeletonMesh::dijkstra(const std::vector<std::pair<int, double>>& sources) const {
  std::vector<double> dist(nodes_.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto [s, d0] : sources) {
    if (d0 < dist[static_cast<size_t>(s)]) {
      dist[static_cast<size_t>(s)] = d0;
      pq.push({d0, s});
    }
  }
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[static_cast<size_t>(u)]) continue;
    for (auto [v, w] : adj_[static_cast<size_t>(u)]) {
      double nd = d + w;
      if (nd < dist[static_cast<size_t>(v)]) {
        dist[static_cast<size_t>(v)] = nd;
        pq.push({nd, v});
      }
    }
  }
  return dist;
}

std::vector<std::pair<int, double>> SkeletonMesh::attach(const Eigen::VectorXd& p, const IndexSet& carrier) const {
  std::vector<std::pair<int, double>> links;
  for (size_t fi = 0; fi < sk_->faces.size(); ++fi) {
    const IndexSet& F = sk_->faces[fi];
    if (!std::includes(F.begin(), F.end(), carrier.begin(), carrier.end())) continue;
    for (int node : face_nodes_[fi]) links.push_back({node, (nodes_[static_cast<size_t>(node)] - p).norm()});
  }
  return links;
}

double SkeletonMesh::distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const {
  IndexSet cp = sk_->carrier(p), cq = sk_->carrier(q);
  if (cp.empty() || cq.empty())
    throw Error(ErrorKind::Domain, "dual_complex", "skeleton_distance", "point does not lie on the complex");
  IndexSet common;
  std::set_union(cp.begin(), cp.end(), cq.begin(), cq.end(), std::back_inserter(common));
  // points on a common face: the straight segment is a shortest path in R^N
  if (sk_->has_face(common)) return (p - q).norm();
  auto dist = dijkstra(attach(p, cp));
  double best = std::numeric_limits<double>::infinity();
  for (auto [node, d] : attach(q, cq)) best = std::min(best, dist[static_cast<size_t>(node)] + d);
  return best;
}

double SkeletonMesh::diameter() const {
  double diam = 0.0;
  for (size_t s = 0; s < nodes_.size(); ++s) {
    auto dist = dijkstra({{static_cast<int>(s), 0.0}});
    for (double d : dist)
      if (std::isfinite(d)) diam = std::max(diam, d);
  }
  return diam;
}

double skeleton_distance(const Skeleton& sk, const Eigen::VectorXd& p, const Eigen::VectorXd& q, int mesh_resolution) {
  return SkeletonMesh(sk, mesh_resolution).distance(p, q);
}

}  // namespace syz
