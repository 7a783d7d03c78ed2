#include "syz/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "syz/errors.hpp"

#ifndef SYZ_DEFAULT_MODEL_DIR
#define SYZ_DEFAULT_MODEL_DIR "models"
#endif

namespace syz {

using nlohmann::json;

int SncDegeneration::position(int id) const {
  for (size_t k = 0; k < components.size(); ++k)
    if (components[k].id == id) return static_cast<int>(k);
  return -1;
}

const Component& SncDegeneration::component(int id) const {
  int k = position(id);
  if (k < 0) throw Error(ErrorKind::Domain, "dual_complex", "component", "unknown component id " + std::to_string(id));
  return components[static_cast<size_t>(k)];
}

std::vector<int> SncDegeneration::ids() const {
  std::vector<int> out;
  for (const auto& c : components) out.push_back(c.id);
  return out;
}

void SncDegeneration::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorKind::InvalidModel, "dual_complex", "validate", what);
  };
  if (n < 1) bad("relative dimension n must be a positive integer");
  if (components.empty()) bad("empty component list");
  std::set<int> seen;
  for (const auto& c : components) {
    if (!seen.insert(c.id).second) bad("duplicate component id " + std::to_string(c.id));
    if (c.m < 1) bad("component " + std::to_string(c.id) + ": multiplicity must be positive");
    if (c.nu < 0) bad("component " + std::to_string(c.id) + ": discrepancy nu must be non-negative");
  }
  std::set<int> covered;
  for (const auto& I : strata) {
    if (I.empty()) bad("empty stratum index set");
    if (static_cast<int>(I.size()) > n + 1)
      bad("stratum of size " + std::to_string(I.size()) + " exceeds n+1 = " + std::to_string(n + 1));
    for (size_t k = 0; k < I.size(); ++k) {
      if (!seen.count(I[k])) bad("stratum references unknown component " + std::to_string(I[k]));
      if (k > 0 && I[k] <= I[k - 1]) bad("stratum index set must be strictly increasing");
      covered.insert(I[k]);
    }
    // closure under nonempty subsets: it suffices to check codimension-one subsets
    if (I.size() > 1) {
      for (size_t skip = 0; skip < I.size(); ++skip) {
        IndexSet sub;
        for (size_t k = 0; k < I.size(); ++k)
          if (k != skip) sub.push_back(I[k]);
        if (!strata.count(sub)) {
          std::ostringstream os;
          os << "strata not closed under subsets: missing {";
          for (size_t k = 0; k < sub.size(); ++k) os << (k ? "," : "") << sub[k];
          os << "}";
          bad(os.str());
        }
      }
    }
  }
  for (int id : seen)
    if (!covered.count(id)) bad("component " + std::to_string(id) + " appears in no stratum");
}

SncDegeneration local_snc_degeneration(int n, const std::vector<int>& m, const std::vector<int>& nu) {
  SncDegeneration d;
  d.n = n;
  const int N = n + 1;
  if (static_cast<int>(m.size()) != N || static_cast<int>(nu.size()) != N)
    throw Error(ErrorKind::InvalidModel, "dual_complex", "local_snc", "m and nu need n+1 entries");
  for (int k = 0; k < N; ++k) d.components.push_back({k + 1, m[static_cast<size_t>(k)], nu[static_cast<size_t>(k)]});
  for (int mask = 1; mask < (1 << N); ++mask) {
    IndexSet I;
    for (int k = 0; k < N; ++k)
      if (mask & (1 << k)) I.push_back(k + 1);
    d.strata.insert(I);
  }
  return d;
}

SncDegeneration hesse_degeneration() {
  SncDegeneration d;
  d.n = 1;
  d.components = {{1, 1, 1}, {2, 1, 1}, {3, 1, 1}};
  d.strata = {{1}, {2}, {3}, {1, 2}, {2, 3}, {1, 3}};
  return d;
}

const char* to_string(ModelType type) {
  switch (type) {
    case ModelType::Snc: return "snc";
    case ModelType::LocalSnc: return "local_snc";
    case ModelType::Hesse: return "hesse";
  }
  return "snc";
}

namespace {

// Input iterator over the raw text that remembers how far the parser has read,
// so that SAX events can be mapped back to source lines.
struct CountingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  size_t* furthest = nullptr;
  const char* begin = nullptr;

  reference operator*() const {
    size_t off = static_cast<size_t>(p - begin);
    if (off + 1 > *furthest) *furthest = off + 1;
    return *p;
  }
  CountingIterator& operator++() {
    ++p;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator old = *this;
    ++p;
    return old;
  }
  bool operator==(const CountingIterator& o) const { return p == o.p; }
  bool operator!=(const CountingIterator& o) const { return p != o.p; }
};

// Records the source line of every JSON value, keyed by JSON pointer.
class LineRecorder : public nlohmann::json_sax<json> {
 public:
  LineRecorder(const std::string& text, const size_t* furthest) : text_(text), furthest_(furthest) {}

  std::map<std::string, int> lines;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override {
    value();
    stack_.push_back({true, "", 0});
    return true;
  }
  bool key(string_t& k) override {
    stack_.back().key = k;
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    value();
    stack_.push_back({false, "", 0});
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool object;
    std::string key;
    int index;
  };
  const std::string& text_;
  const size_t* furthest_;
  std::vector<Frame> stack_;

  int current_line() const {
    size_t off = *furthest_ == 0 ? 0 : *furthest_ - 1;
    if (off > text_.size()) off = text_.size();
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(off), '\n'));
  }
  bool value() {
    std::string ptr;
    for (auto& f : stack_) ptr += "/" + (f.object ? f.key : std::to_string(f.index));
    lines.emplace(ptr, current_line());
    if (!stack_.empty() && !stack_.back().object) ++stack_.back().index;
    return true;
  }
};

class Loader {
 public:
  Loader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  ModelFile run() {
    parse_json();
    ModelFile mf;
    mf.source = source_;
    if (!doc_.is_object()) fail("", "model file must contain a JSON object");
    mf.name = doc_.value("name", std::string());
    std::string type = doc_.value("type", std::string("snc"));
    if (doc_.contains("type") && !doc_["type"].is_string()) fail("/type", "type must be a string");
    if (type == "local_snc") mf.type = ModelType::LocalSnc;
    else if (type == "hesse") mf.type = ModelType::Hesse;
    else if (type == "snc") mf.type = ModelType::Snc;
    else fail("/type", "unknown model type '" + type + "' (expected snc, local_snc or hesse)");

    if (mf.type == ModelType::LocalSnc) load_local(mf);
    else if (mf.type == ModelType::Hesse) load_hesse(mf);
    else load_snc(mf);
    load_ivies(mf);
    return mf;
  }

 private:
  const std::string& text_;
  std::string source_;
  json doc_;
  std::map<std::string, int> lines_;

  [[noreturn]] void fail(const std::string& ptr, const std::string& what, ErrorKind kind = ErrorKind::InvalidModel) const {
    std::string p = ptr;
    int line = 1;
    for (;;) {
      auto it = lines_.find(p);
      if (it != lines_.end()) {
        line = it->second;
        break;
      }
      if (p.empty()) break;
      p = p.substr(0, p.find_last_of('/'));
    }
    throw Error(kind, "dual_complex", "load_model", source_ + ":" + std::to_string(line) + ": " + what);
  }

  void parse_json() {
    size_t furthest = 0;
    CountingIterator first{text_.data(), &furthest, text_.data()};
    CountingIterator last{text_.data() + text_.size(), &furthest, text_.data()};
    LineRecorder rec(text_, &furthest);
    json::sax_parse(first, last, &rec);
    lines_ = rec.lines;
    try {
      doc_ = json::parse(text_);
    } catch (const json::parse_error& e) {
      size_t off = std::min(e.byte == 0 ? size_t{0} : e.byte - 1, text_.size());
      auto line_start = text_.rfind('\n', off == 0 ? 0 : off - 1);
      int line = 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(off), '\n'));
      int col = static_cast<int>(off - (line_start == std::string::npos ? 0 : line_start + 1)) + 1;
      if (line_start == std::string::npos) col = static_cast<int>(off) + 1;
      throw Error(ErrorKind::Parse, "dual_complex", "load_model",
                  source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
    }
  }

  int get_int(const json& j, const std::string& ptr) const {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<int>();
  }

  std::vector<int> int_list(const std::string& ptr) const {
    json::json_pointer jp(ptr);
    if (!doc_.contains(jp)) fail(ptr, "missing field '" + ptr.substr(ptr.find_last_of('/') + 1) + "'");
    const json& j = doc_.at(jp);
    if (!j.is_array()) fail(ptr, "expected a list of integers");
    std::vector<int> out;
    for (size_t k = 0; k < j.size(); ++k) out.push_back(get_int(j[k], ptr + "/" + std::to_string(k)));
    return out;
  }

  int require_n() const {
    if (!doc_.contains("n")) fail("", "missing field 'n'");
    int n = get_int(doc_["n"], "/n");
    if (n < 1) fail("/n", "n must be a positive integer");
    return n;
  }

  void load_snc(ModelFile& mf) {
    SncDegeneration& d = mf.degeneration;
    d.n = require_n();
    if (!doc_.contains("components") || !doc_["components"].is_array()) fail("", "missing list 'components'");
    const json& comps = doc_["components"];
    if (comps.empty()) fail("/components", "empty component list");
    std::set<int> ids;
    for (size_t k = 0; k < comps.size(); ++k) {
      std::string ptr = "/components/" + std::to_string(k);
      const json& c = comps[k];
      if (!c.is_object()) fail(ptr, "component must be an object {id, m, nu}");
      for (const char* f : {"id", "m", "nu"})
        if (!c.contains(f)) fail(ptr, std::string("component is missing '") + f + "'");
      Component comp{get_int(c["id"], ptr + "/id"), get_int(c["m"], ptr + "/m"), get_int(c["nu"], ptr + "/nu")};
      if (!ids.insert(comp.id).second) fail(ptr + "/id", "duplicate component id " + std::to_string(comp.id));
      if (comp.m < 1) fail(ptr + "/m", "multiplicity must be a positive integer");
      if (comp.nu < 0) fail(ptr + "/nu", "discrepancy nu must be non-negative");
      d.components.push_back(comp);
    }
    if (!doc_.contains("strata") || !doc_["strata"].is_array()) fail("", "missing list 'strata'");
    const json& strata = doc_["strata"];
    for (size_t k = 0; k < strata.size(); ++k) {
      std::string ptr = "/strata/" + std::to_string(k);
      IndexSet I = int_list(ptr);
      std::sort(I.begin(), I.end());
      if (I.empty()) fail(ptr, "empty stratum");
      if (std::adjacent_find(I.begin(), I.end()) != I.end()) fail(ptr, "repeated id in stratum");
      for (int id : I)
        if (!ids.count(id)) fail(ptr, "stratum references unknown component " + std::to_string(id));
      if (static_cast<int>(I.size()) > d.n + 1) fail(ptr, "stratum has more than n+1 components");
      d.strata.insert(I);
    }
    try {
      d.validate();
    } catch (const Error& e) {
      fail("/strata", e.what());
    }
  }

  void load_local(ModelFile& mf) {
    int n = require_n();
    mf.m = int_list("/m");
    mf.nu = doc_.contains("nu") ? int_list("/nu") : mf.m;
    if (static_cast<int>(mf.m.size()) != n + 1) fail("/m", "m needs n+1 entries");
    if (static_cast<int>(mf.nu.size()) != n + 1) fail("/nu", "nu needs n+1 entries");
    for (size_t k = 0; k < mf.m.size(); ++k) {
      if (mf.m[k] < 1) fail("/m/" + std::to_string(k), "multiplicity must be a positive integer");
      if (mf.nu[k] < 0) fail("/nu/" + std::to_string(k), "discrepancy nu must be non-negative");
    }
    if (doc_.contains("unit")) {
      if (!doc_["unit"].is_string()) fail("/unit", "unit must be an expression string in z1..zN");
      mf.unit = doc_["unit"].get<std::string>();
    }
    mf.degeneration = local_snc_degeneration(n, mf.m, mf.nu);
  }

  void load_hesse(ModelFile& mf) {
    if (doc_.contains("n") && get_int(doc_["n"], "/n") != 1) fail("/n", "the Hesse pencil has n = 1");
    mf.degeneration = hesse_degeneration();
    mf.m = {1, 1};
    mf.nu = {1, 1};
  }

  double get_level(const json& j, const std::string& ptr) const {
    if (j.is_number()) return j.get<double>();
    if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity"))
      return std::numeric_limits<double>::infinity();
    fail(ptr, "expected a number or \"inf\"");
  }

  void load_ivies(ModelFile& mf) {
    if (!doc_.contains("ivies")) return;
    const json& iv = doc_["ivies"];
    if (!iv.is_array()) fail("/ivies", "ivies must be a list");
    for (size_t k = 0; k < iv.size(); ++k) {
      std::string ptr = "/ivies/" + std::to_string(k);
      const json& e = iv[k];
      if (!e.is_object()) fail(ptr, "ivy entry must be an object");
      IvySpec spec;
      spec.face = int_list(ptr + "/face");
      std::sort(spec.face.begin(), spec.face.end());
      std::string kind = e.value("kind", std::string("canonical"));
      if (kind == "canonical") {
        spec.canonical = true;
        if (e.contains("zero_end")) {
          spec.zero_end = int_list(ptr + "/zero_end");
          std::sort(spec.zero_end.begin(), spec.zero_end.end());
        }
      } else if (kind == "explicit") {
        spec.canonical = false;
        if (e.contains("vertices")) {
          const json& vs = e["vertices"];
          for (size_t a = 0; a < vs.size(); ++a) {
            std::string vp = ptr + "/vertices/" + std::to_string(a);
            if (!vs[a].contains("id") || !vs[a].contains("level")) fail(vp, "ivy vertex needs id and level");
            spec.data.vertices.push_back({get_int(vs[a]["id"], vp + "/id"), get_level(vs[a]["level"], vp + "/level")});
          }
        }
        if (!e.contains("edges") || !e["edges"].is_array()) fail(ptr, "explicit ivy needs an 'edges' list");
        const json& es = e["edges"];
        for (size_t a = 0; a < es.size(); ++a) {
          std::string ep = ptr + "/edges/" + std::to_string(a);
          const json& ed = es[a];
          IvyEdgeData d;
          if (ed.contains("lower") && !ed["lower"].is_null()) d.lower = get_int(ed["lower"], ep + "/lower");
          if (ed.contains("upper") && !ed["upper"].is_null()) d.upper = get_int(ed["upper"], ep + "/upper");
          if (!ed.contains("lo") || !ed.contains("hi")) fail(ep, "ivy edge needs lo and hi levels");
          d.lo = get_level(ed["lo"], ep + "/lo");
          d.hi = get_level(ed["hi"], ep + "/hi");
          if (ed.contains("glue_lower")) d.glue_lower = int_list(ep + "/glue_lower");
          if (ed.contains("glue_upper")) d.glue_upper = int_list(ep + "/glue_upper");
          std::sort(d.glue_lower.begin(), d.glue_lower.end());
          std::sort(d.glue_upper.begin(), d.glue_upper.end());
          spec.data.edges.push_back(d);
        }
      } else {
        fail(ptr + "/kind", "ivy kind must be 'canonical' or 'explicit'");
      }
      mf.ivies.push_back(spec);
    }
  }
};

}  // namespace

ModelFile parse_model(const std::string& text, const std::string& source) { return Loader(text, source).run(); }

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "dual_complex", "load_model", path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

std::string resolve_model_path(const std::string& ref) {
  namespace fs = std::filesystem;
  if (fs::exists(ref)) return ref;
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("SYZ_MODEL_DIR")) dirs.emplace_back(env);
  dirs.emplace_back(SYZ_DEFAULT_MODEL_DIR);
  for (const auto& dir : dirs) {
    fs::path candidate = fs::path(dir) / ref;
    if (fs::exists(candidate)) return candidate.string();
    if (!candidate.has_extension() && fs::exists(candidate.string() + ".json")) return candidate.string() + ".json";
  }
  return ref;
}

}  // namespace syz
