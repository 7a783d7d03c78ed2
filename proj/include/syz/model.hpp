#pragma once

// Combinatorial input data and the model-file loader.

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace syz {

using IndexSet = std::vector<int>;  // sorted component ids

struct Component {
  int id = 0;
  int m = 1;   // multiplicity in the special fiber
  int nu = 0;  // discrepancy coefficient
};

struct SncDegeneration {
  int n = 0;  // relative dimension
  std::vector<Component> components;
  std::set<IndexSet> strata;  // index sets I with nonempty intersection

  int N() const { return static_cast<int>(components.size()); }
  // Position of a component id in `components`; -1 if absent.
  int position(int id) const;
  const Component& component(int id) const;
  std::vector<int> ids() const;
  // Throws Error(InvalidModel) when an invariant is violated.
  void validate() const;
};

SncDegeneration local_snc_degeneration(int n, const std::vector<int>& m, const std::vector<int>& nu);
SncDegeneration hesse_degeneration();

struct IvyVertexData {
  int id = 0;
  double level = 0.0;
};

// One interval of an ivy. A missing endpoint is an open end; open ends name
// the maximal face they glue to.
struct IvyEdgeData {
  std::optional<int> lower, upper;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  IndexSet glue_lower, glue_upper;
};

struct IvyData {
  std::vector<IvyVertexData> vertices;
  std::vector<IvyEdgeData> edges;
};

struct IvySpec {
  IndexSet face;
  bool canonical = true;
  // Canonical choice: the maximal face glued at the p -> 0 end. Empty means
  // the lexicographically smallest incident maximal face.
  IndexSet zero_end;
  IvyData data;  // used when !canonical
};

enum class ModelType { Snc, LocalSnc, Hesse };

struct ModelFile {
  std::string name;
  std::string source;  // file path or "<memory>"
  ModelType type = ModelType::Snc;
  SncDegeneration degeneration;
  // local_snc parameters; also filled (m = nu = 1) for hesse charts
  std::vector<int> m, nu;
  std::string unit = "1";
  std::vector<IvySpec> ivies;
};

const char* to_string(ModelType type);

ModelFile parse_model(const std::string& text, const std::string& source = "<memory>");
ModelFile load_model_file(const std::string& path);

// Resolves a model reference: an existing path, or a file name inside the
// directory named by SYZ_MODEL_DIR (falling back to the bundled models/).
std::string resolve_model_path(const std::string& ref);

}  // namespace syz
