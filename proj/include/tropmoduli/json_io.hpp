#pragma once

// JSON documents for complexes, pair data, types, curves, wall graphs and
// families. Rationals are "p/q" strings; integers are JSON numbers (or
// decimal strings when they do not fit). Malformed input raises SchemaError
// naming the JSON pointer of the offending value.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tropmoduli/error.hpp"
#include "tropmoduli/exact_linalg.hpp"
#include "tropmoduli/family.hpp"
#include "tropmoduli/moduli.hpp"
#include "tropmoduli/polyhedral.hpp"
#include "tropmoduli/report.hpp"
#include "tropmoduli/tropcurve.hpp"

namespace tropmoduli::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "tropmoduli/1";

/// A value together with its JSON pointer, for error messages.
class Reader {
 public:
  Reader(const json& j, std::string path = "") : j_(j), path_(std::move(path)) {}

  const json& value() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::SchemaError, (path_.empty() ? "/" : path_) + ": " + what);
  }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Reader operator[](const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) Reader(j_, path_ + "/" + key).fail("missing required field");
    return Reader(j_.at(key), path_ + "/" + key);
  }
  Reader operator[](std::size_t i) const { return Reader(j_.at(i), path_ + "/" + std::to_string(i)); }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  std::vector<Reader> items() const {
    std::vector<Reader> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i]);
    return out;
  }

  std::vector<std::pair<std::string, Reader>> entries() const {
    if (!j_.is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Reader>> out;
    for (auto it = j_.begin(); it != j_.end(); ++it) out.push_back({it.key(), Reader(it.value(), path_ + "/" + it.key())});
    return out;
  }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  Int integer() const {
    if (j_.is_number_integer()) return Int(j_.get<long long>());
    if (j_.is_string()) {
      try {
        return Int(j_.get<std::string>());
      } catch (const std::exception&) {
      }
    }
    fail("expected an integer");
  }

  long long small_integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<long long>();
  }

  Rat rational() const {
    if (j_.is_number_integer()) return Rat(j_.get<long long>());
    if (!j_.is_string()) fail("expected a rational \"p/q\"");
    try {
      return parse_rat(j_.get<std::string>());
    } catch (const Error&) {
      fail("malformed rational '" + j_.get<std::string>() + "'");
    }
  }

  IntVector int_vector() const {
    IntVector v;
    for (const auto& x : items()) v.push_back(x.integer());
    return v;
  }

  RatVector rat_vector() const {
    RatVector v;
    for (const auto& x : items()) v.push_back(x.rational());
    return v;
  }

  std::vector<std::string> strings() const {
    std::vector<std::string> v;
    for (const auto& x : items()) v.push_back(x.str());
    return v;
  }

 private:
  const json& j_;
  std::string path_;
};

inline void check_schema(const json& doc) {
  Reader r(doc);
  if (!doc.is_object()) r.fail("expected an object");
  if (!doc.contains("schema")) Reader(doc, "/schema").fail("missing required field");
  if (r["schema"].str() != kSchema) r["schema"].fail(std::string("expected \"") + kSchema + "\"");
}

// ---------------------------------------------------------------------------
// Scalars

inline json to_json(const Int& z) {
  if (z >= Int(std::numeric_limits<long long>::min()) && z <= Int(std::numeric_limits<long long>::max()))
    return json(z.convert_to<long long>());
  return json(z.str());
}
inline json to_json(const Rat& q) { return json(to_string(q)); }
inline json to_json(const IntVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}
inline json to_json(const RatVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}
inline json to_json(const IntMatrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(to_json(m.row(i)));
  return a;
}

inline IntMatrix read_matrix(const Reader& r, std::size_t cols) {
  std::vector<IntVector> rows;
  for (const auto& row : r.items()) {
    rows.push_back(row.int_vector());
    if (rows.back().size() != cols)
      row.fail("expected " + std::to_string(cols) + " entries, found " + std::to_string(rows.back().size()));
  }
  return IntMatrix::from_rows(cols, rows);
}

// ---------------------------------------------------------------------------
// Complexes

inline json to_json(const Polyhedron& p) {
  auto constraints = [&](const std::vector<LinearConstraint>& cs) {
    json a = json::array();
    for (const auto& c : cs) {
      json row = to_json(c.normal);
      row.push_back(to_json(c.offset));
      a.push_back(row);
    }
    return a;
  };
  return {{"ineqs", constraints(p.inequalities())}, {"eqs", constraints(p.equalities())}};
}

inline Polyhedron read_polyhedron(const Reader& r, std::size_t dim) {
  auto constraints = [&](const std::string& key) {
    std::vector<LinearConstraint> out;
    if (!r.has(key)) return out;
    for (const auto& row : r[key].items()) {
      if (row.size() != dim + 1)
        row.fail("expected " + std::to_string(dim) + " normal entries and an offset");
      IntVector n;
      for (std::size_t i = 0; i < dim; ++i) n.push_back(row[i].integer());
      out.push_back({n, row[dim].rational()});
    }
    return out;
  };
  return Polyhedron(dim, constraints("ineqs"), constraints("eqs"));
}

inline json to_json(const PolyhedralComplex& c) {
  json faces = json::array();
  for (const auto& f : c.faces) {
    json jf = {{"id", f.id}, {"rank", f.lattice_rank}, {"chart", to_json(f.chart)}};
    if (!f.label.empty()) jf["label"] = f.label;
    faces.push_back(jf);
  }
  json incs = json::array();
  for (const auto& i : c.inclusions)
    incs.push_back({{"sub", i.sub}, {"super", i.super}, {"linear", to_json(i.embed.linear)}, {"offset", to_json(i.embed.offset)}});
  return {{"faces", faces}, {"inclusions", incs}};
}

inline PolyhedralComplex read_complex(const Reader& r) {
  PolyhedralComplex c;
  std::map<std::string, std::size_t> rank_of_face;
  for (const auto& f : r["faces"].items()) {
    auto rank_value = f["rank"].small_integer();
    if (rank_value < 0) f["rank"].fail("rank must be nonnegative");
    auto rank = static_cast<std::size_t>(rank_value);
    Face face{f["id"].str(), rank, read_polyhedron(f["chart"], rank), f.has("label") ? f["label"].str() : ""};
    rank_of_face[face.id] = rank;
    c.faces.push_back(std::move(face));
  }
  if (r.has("inclusions"))
    for (const auto& i : r["inclusions"].items()) {
      auto sub = i["sub"].str(), super = i["super"].str();
      auto offset = i["offset"].rat_vector();
      std::size_t cols = rank_of_face.count(sub) ? rank_of_face[sub] : 0;
      IntMatrix linear = i["linear"].size() == 0 ? IntMatrix(offset.size(), cols) : read_matrix(i["linear"], cols);
      if (linear.rows() != offset.size()) i["offset"].fail("offset length differs from the number of rows of linear");
      c.inclusions.push_back({sub, super, {std::move(linear), std::move(offset)}});
    }
  return c;
}

// ---------------------------------------------------------------------------
// Semistable pair data

inline SemistablePairData read_pair(const Reader& r) {
  SemistablePairData d;
  d.vertical_components = r["vertical"].strings();
  d.horizontal_components = r.has("horizontal") ? r["horizontal"].strings() : std::vector<std::string>{};
  for (const auto& s : r["strata"].items())
    d.strata.push_back({s["id"].str(), s["vertical"].strings(),
                        s.has("horizontal") ? s["horizontal"].strings() : std::vector<std::string>{},
                        s["length"].rational()});
  if (r.has("order"))
    for (const auto& o : r["order"].items()) {
      if (o.size() != 2) o.fail("expected a pair [S, T]");
      d.order.push_back({o[0].str(), o[1].str()});
    }
  return d;
}

inline json to_json(const SemistablePairData& d) {
  json strata = json::array();
  for (const auto& s : d.strata)
    strata.push_back({{"id", s.id}, {"vertical", s.vertical}, {"horizontal", s.horizontal}, {"length", to_json(s.length)}});
  json order = json::array();
  for (const auto& [s, t] : d.order) order.push_back({s, t});
  return {{"vertical", d.vertical_components}, {"horizontal", d.horizontal_components}, {"strata", strata}, {"order", order}};
}

// ---------------------------------------------------------------------------
// Types and curves

inline json to_json(const CombinatorialType& t) {
  const auto& g = t.graph;
  json vs = json::array(), es = json::array(), ls = json::array();
  for (const auto& v : g.vertices) vs.push_back({{"id", v.id}, {"weight", v.weight}});
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    es.push_back({{"id", g.edges[e].id},
                  {"u", g.vertices[g.edges[e].u].id},
                  {"v", g.vertices[g.edges[e].v].id},
                  {"slope", to_json(t.edge_slopes[e])}});
  for (std::size_t l = 0; l < g.legs.size(); ++l)
    ls.push_back({{"id", g.legs[l].id}, {"v", g.vertices[g.legs[l].v].id}, {"slope", to_json(t.leg_slopes[l])}});
  return {{"dim", t.lattice_dim}, {"vertices", vs}, {"edges", es}, {"legs", ls}};
}

inline json to_json(const ParameterizedTropicalCurve& p) {
  json j = to_json(p.type);
  for (std::size_t v = 0; v < p.positions.size(); ++v) j["vertices"][v]["position"] = to_json(p.positions[v]);
  for (std::size_t e = 0; e < p.lengths.size(); ++e) j["edges"][e]["length"] = to_json(p.lengths[e]);
  return j;
}

inline CombinatorialType read_type(const Reader& r) {
  CombinatorialType t;
  std::optional<std::size_t> dim;
  if (r.has("dim")) {
    auto d = r["dim"].small_integer();
    if (d < 0) r["dim"].fail("dimension must be nonnegative");
    dim = static_cast<std::size_t>(d);
  }
  auto note_dim = [&](const Reader& at, std::size_t n) {
    if (!dim) dim = n;
    else if (*dim != n) at.fail("slope has " + std::to_string(n) + " entries, expected " + std::to_string(*dim));
  };
  for (const auto& v : r["vertices"].items()) {
    auto w = v.has("weight") ? v["weight"].small_integer() : 0;
    if (w < 0) v["weight"].fail("weight must be nonnegative");
    t.graph.vertices.push_back({v["id"].str(), static_cast<int>(w)});
  }
  auto vertex = [&](const Reader& at) {
    auto id = at.str();
    auto i = t.graph.vertex_index(id);
    if (!i) at.fail("unknown vertex '" + id + "'");
    return *i;
  };
  if (r.has("edges"))
    for (const auto& e : r["edges"].items()) {
      t.graph.edges.push_back({e["id"].str(), vertex(e["u"]), vertex(e["v"])});
      t.edge_slopes.push_back(e["slope"].int_vector());
      note_dim(e["slope"], t.edge_slopes.back().size());
    }
  if (r.has("legs"))
    for (const auto& l : r["legs"].items()) {
      t.graph.legs.push_back({l["id"].str(), vertex(l["v"])});
      t.leg_slopes.push_back(l["slope"].int_vector());
      note_dim(l["slope"], t.leg_slopes.back().size());
    }
  t.lattice_dim = dim.value_or(2);
  return t;
}

/// A curve document is a type document with a length on every edge and a
/// position on every vertex.
inline bool has_curve_data(const Reader& r) {
  bool any = false;
  for (const auto& v : r["vertices"].items()) any = any || v.has("position");
  if (r.has("edges"))
    for (const auto& e : r["edges"].items()) any = any || e.has("length");
  return any;
}

inline ParameterizedTropicalCurve read_curve(const Reader& r) {
  ParameterizedTropicalCurve p{read_type(r), {}, {}};
  for (const auto& v : r["vertices"].items()) p.positions.push_back(v["position"].rat_vector());
  if (r.has("edges"))
    for (const auto& e : r["edges"].items()) p.lengths.push_back(e["length"].rational());
  return p;
}

inline json types_document(const std::vector<CombinatorialType>& types) {
  json list = json::array();
  for (const auto& t : types) list.push_back({{"canonical", canonical_string(t)}, {"type", to_json(t)}});
  return {{"schema", kSchema}, {"types", list}};
}

inline std::vector<CombinatorialType> read_types(const Reader& r) {
  std::vector<CombinatorialType> out;
  for (const auto& item : r["types"].items()) out.push_back(read_type(item.has("type") ? item["type"] : item));
  return out;
}

// ---------------------------------------------------------------------------
// Wall graphs

inline json to_json(const WallGraph& wg) {
  json nodes = json::array(), walls = json::array();
  for (const auto& n : wg.nodes) nodes.push_back({{"id", n.id}, {"canonical", n.canonical}, {"type", to_json(n.type)}});
  for (const auto& w : wg.walls) {
    json res = json::array();
    for (auto i : w.resolutions) res.push_back(wg.nodes[i].id);
    walls.push_back({{"id", w.id},
                     {"canonical", w.canonical},
                     {"type", to_json(w.type)},
                     {"four_valent_vertex", w.type.graph.vertices[w.four_valent_vertex].id},
                     {"resolutions", res}});
  }
  return {{"schema", kSchema}, {"nodes", nodes}, {"walls", walls}};
}

inline WallGraph read_wall_graph(const Reader& r) {
  WallGraph wg;
  for (const auto& n : r["nodes"].items()) {
    auto type = read_type(n["type"]);
    wg.nodes.push_back({n["id"].str(), canonical_string(type), std::move(type)});
  }
  for (const auto& w : r["walls"].items()) {
    auto type = read_type(w["type"]);
    WallGraph::Wall wall{w["id"].str(), canonical_string(type), type, 0, {}};
    if (w.has("four_valent_vertex")) {
      auto v = type.graph.vertex_index(w["four_valent_vertex"].str());
      if (!v) w["four_valent_vertex"].fail("unknown vertex");
      wall.four_valent_vertex = *v;
    } else if (auto cls = classify(type); cls.four_valent_vertex) {
      wall.four_valent_vertex = *cls.four_valent_vertex;
    }
    for (const auto& res : w["resolutions"].items()) {
      auto i = wg.node_index(res.str());
      if (!i) res.fail("unknown node '" + res.str() + "'");
      wall.resolutions.push_back(*i);
    }
    std::sort(wall.resolutions.begin(), wall.resolutions.end());
    wg.walls.push_back(std::move(wall));
  }
  return wg;
}

// ---------------------------------------------------------------------------
// Families

inline FamilyDatum read_family(const Reader& r) {
  FamilyDatum f;
  f.base = read_complex(r["base"]);
  for (const auto& d : r["extended_degree"].items()) f.extended_degree.push_back(d.int_vector());
  std::map<std::string, std::size_t> rank_of_face;
  for (const auto& face : f.base.faces) rank_of_face[face.id] = face.lattice_rank;
  for (const auto& item : r["faces"].items()) {
    FamilyFace ff;
    ff.face = item["face"].str();
    if (!rank_of_face.count(ff.face)) item["face"].fail("unknown face '" + ff.face + "'");
    const std::size_t rank = rank_of_face[ff.face];
    ff.type = read_type(item["type"]);
    if (item.has("lengths"))
      for (const auto& [edge, fn] : item["lengths"].entries()) {
        auto linear = fn.has("linear") ? fn["linear"].int_vector() : IntVector(rank, Int(0));
        ff.lengths[edge] = {std::move(linear), fn["offset"].rational()};
      }
    if (item.has("positions"))
      for (const auto& [vertex, fn] : item["positions"].entries()) {
        auto offset = fn["offset"].rat_vector();
        IntMatrix linear = (!fn.has("linear") || fn["linear"].size() == 0) ? IntMatrix(offset.size(), rank)
                                                                          : read_matrix(fn["linear"], rank);
        if (linear.rows() != offset.size()) fn["offset"].fail("offset length differs from the rows of linear");
        ff.positions[vertex] = {std::move(linear), std::move(offset)};
      }
    f.faces.push_back(std::move(ff));
  }
  if (r.has("contractions"))
    for (const auto& c : r["contractions"].items()) {
      FamilyContraction fc{c["sub"].str(), c["super"].str(), {}, {}};
      for (const auto& [from, to] : c["vertex_map"].entries()) fc.vertex_map[from] = to.str();
      for (const auto& [from, to] : c["edge_map"].entries())
        fc.edge_map[from] = to.value().is_null() ? std::nullopt : std::optional<std::string>(to.str());
      f.contractions.push_back(std::move(fc));
    }
  return f;
}

inline json to_json(const FamilyDatum& f) {
  json faces = json::array();
  for (const auto& ff : f.faces) {
    json lengths = json::object(), positions = json::object();
    for (const auto& [e, fn] : ff.lengths) lengths[e] = {{"linear", to_json(fn.linear)}, {"offset", to_json(fn.offset)}};
    for (const auto& [v, fn] : ff.positions)
      positions[v] = {{"linear", to_json(fn.linear)}, {"offset", to_json(fn.offset)}};
    faces.push_back({{"face", ff.face}, {"type", to_json(ff.type)}, {"lengths", lengths}, {"positions", positions}});
  }
  json contractions = json::array();
  for (const auto& c : f.contractions) {
    json edges = json::object();
    for (const auto& [e, img] : c.edge_map) edges[e] = img ? json(*img) : json(nullptr);
    contractions.push_back({{"sub", c.sub}, {"super", c.super}, {"vertex_map", c.vertex_map}, {"edge_map", edges}});
  }
  json degree = json::array();
  for (const auto& d : f.extended_degree) degree.push_back(to_json(d));
  return {{"schema", kSchema},
          {"base", to_json(f.base)},
          {"extended_degree", degree},
          {"faces", faces},
          {"contractions", contractions}};
}

// ---------------------------------------------------------------------------
// Results

inline json to_json(const ValidationReport& r) {
  json a = json::array();
  for (const auto& v : r.violations) a.push_back({{"rule", v.rule}, {"where", v.where}, {"detail", v.detail}});
  return a;
}

inline json to_json(const AffineMap& m) { return {{"linear", to_json(m.linear)}, {"offset", to_json(m.offset)}}; }

inline json to_json(const WallVerdict& v) {
  json j = {{"face", v.face}, {"verdict", to_string(v.verdict)}, {"reason", v.reason}, {"wall_type", v.wall_type}};
  json cert = json::object();
  if (!v.derivatives.empty()) {
    cert["cofacets"] = v.cofacets;
    json ds = json::array();
    for (const auto& d : v.derivatives) ds.push_back(to_json(d));
    cert["derivatives"] = ds;
    json span = json::array();
    for (const auto& b : v.image_span) span.push_back(to_json(b));
    cert["image_span"] = span;
    cert["coefficients"] = v.coefficients ? to_json(*v.coefficients) : json(nullptr);
  }
  if (!v.witnesses.empty() || !v.uncovered.empty()) {
    json w = json::array();
    for (const auto& [type, cofacet] : v.witnesses) w.push_back({{"resolution", type}, {"cofacet", cofacet}});
    cert["witnesses"] = w;
    cert["uncovered"] = v.uncovered;
  }
  j["certificate"] = cert;
  return j;
}

inline json to_json(const PropagationResult& p) {
  json trace = json::array();
  for (const auto& s : p.trace) trace.push_back({{"wall", s.wall}, {"trigger", s.trigger}, {"added", s.added}});
  return {{"nodes", p.nodes}, {"trace", trace}};
}

}  // namespace tropmoduli::io
