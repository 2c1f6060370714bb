#pragma once

// Strata of the moduli space of parameterized tropical curves: defining
// systems and dimensions, isomorphism classes, contractions and adjacency,
// resolutions of 4-valent vertices, enumeration and wall graphs.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tropmoduli/error.hpp"
#include "tropmoduli/exact_linalg.hpp"
#include "tropmoduli/parallel.hpp"
#include "tropmoduli/report.hpp"
#include "tropmoduli/tropcurve.hpp"

namespace tropmoduli {

// ---------------------------------------------------------------------------
// Strata

/// Coordinates: edge lengths first, then vertex positions (vertex-major).
struct StratumDescriptor {
  CombinatorialType type;
  std::size_t ambient_dim = 0;
  RatMatrix equalities;  // row (e, k): h_k(v) - h_k(u) - l(e) slope_k(e) = 0
  bool nonempty = false;
  int dim = -1;                      // -1 when empty
  std::optional<RatVector> witness;  // a point with all lengths positive

  std::size_t length_coord(std::size_t e) const { return e; }
  std::size_t position_coord(std::size_t v, std::size_t k) const {
    return type.graph.edges.size() + v * type.lattice_dim + k;
  }
};

inline void require_balanced(const CombinatorialType& t) {
  auto s = check_structure(t);
  if (!s.ok()) {
    auto code = s.violations.front().detail == "graph is disconnected" ? ErrorCode::Disconnected
                                                                        : ErrorCode::InvalidArgument;
    throw Error(code, s.violations.front().where + ": " + s.violations.front().detail);
  }
  auto b = check_balanced(t);
  if (!b.ok()) throw Error(ErrorCode::UnbalancedType, b.violations.front().where + ": " + b.violations.front().detail);
}

/// Positive lengths closing every cycle, as coprime integers; nothing if the
/// cycle conditions admit no strictly positive solution.
inline std::optional<IntVector> positive_cycle_lengths(const CombinatorialType& t) {
  const auto& g = t.graph;
  const std::size_t n = t.lattice_dim;
  if (g.edges.empty()) return IntVector{};
  auto tree = detail::spanning_tree(g);
  std::vector<std::vector<std::pair<std::size_t, int>>> cycles;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (tree.in_tree[e]) continue;
    if (g.edges[e].is_loop())
      cycles.push_back({{e, 1}});
    else
      cycles.push_back(detail::fundamental_cycle(g, tree, e));
  }
  std::vector<RatVector> columns(g.edges.size(), RatVector(n * cycles.size(), Rat(0)));
  for (std::size_t c = 0; c < cycles.size(); ++c)
    for (const auto& [e, sign] : cycles[c])
      for (std::size_t k = 0; k < n; ++k) columns[e][c * n + k] += Rat(t.edge_slopes[e][k] * sign);
  return strict_positive_combination(columns, Subspace(n * cycles.size()));
}

inline StratumDescriptor stratum(const CombinatorialType& t) {
  require_balanced(t);
  StratumDescriptor s;
  s.type = t;
  const auto& g = t.graph;
  const std::size_t n = t.lattice_dim, ne = g.edges.size();
  s.ambient_dim = ne + n * g.vertices.size();
  s.equalities = RatMatrix(ne * n, s.ambient_dim);
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t k = 0; k < n; ++k) {
      auto r = e * n + k;
      s.equalities(r, s.position_coord(g.edges[e].v, k)) += 1;
      s.equalities(r, s.position_coord(g.edges[e].u, k)) -= 1;
      s.equalities(r, s.length_coord(e)) -= Rat(t.edge_slopes[e][k]);
    }
  auto lengths = positive_cycle_lengths(t);
  if (!lengths) return s;
  s.nonempty = true;
  s.dim = static_cast<int>(s.ambient_dim - rank(s.equalities));
  auto curve = realize(t, to_rat(*lengths), RatVector(n, Rat(0)));
  RatVector w(s.ambient_dim, Rat(0));
  for (std::size_t e = 0; e < ne; ++e) w[e] = curve.lengths[e];
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (std::size_t k = 0; k < n; ++k) w[s.position_coord(v, k)] = curve.positions[v][k];
  s.witness = std::move(w);
  return s;
}

/// Dimension of M_Theta, or nothing when the stratum is empty.
inline std::optional<int> dim_stratum(const CombinatorialType& t) {
  auto s = stratum(t);
  if (!s.nonempty) return std::nullopt;
  return s.dim;
}

// ---------------------------------------------------------------------------
// Isomorphism classes

/// Vertex and edge bijections between two types; legs map to themselves.
struct TypeIso {
  std::vector<std::size_t> vertex_map;
  std::vector<std::size_t> edge_map;
};

struct CanonicalLabeling {
  std::string text;                      // equal iff the types are isomorphic
  std::vector<std::size_t> vertex_order;  // canonical position -> vertex
  std::vector<std::size_t> edge_order;    // canonical position -> edge
  std::vector<bool> edge_flipped;         // per canonical position: stored orientation reversed
};

namespace detail {

inline IntVector loop_normal(const IntVector& s) {
  auto n = -s;
  return n > s ? n : s;
}

struct EdgeKey {
  std::size_t a, b;
  IntVector slope;  // from a to b
  bool operator<(const EdgeKey& o) const {
    return std::tie(a, b, slope) < std::tie(o.a, o.b, o.slope);
  }
};

inline std::vector<std::size_t> rank_keys(const std::vector<std::string>& keys) {
  std::vector<std::string> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::size_t> out(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i)
    out[i] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
  return out;
}

class Canonizer {
 public:
  explicit Canonizer(const CombinatorialType& t) : t_(t) {
    const auto& g = t.graph;
    const std::size_t n = g.vertices.size();
    std::vector<std::string> keys(n);
    for (std::size_t v = 0; v < n; ++v) {
      std::string k = "w" + std::to_string(g.vertices[v].weight) + "d" + std::to_string(g.valence(v));
      for (std::size_t l = 0; l < g.legs.size(); ++l)
        if (g.legs[l].v == v) k += "L" + std::to_string(l) + to_string(t.leg_slopes[l]);
      std::vector<std::string> loops;
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        if (g.edges[e].is_loop() && g.edges[e].u == v) loops.push_back(to_string(loop_normal(t.edge_slopes[e])));
      std::sort(loops.begin(), loops.end());
      for (const auto& s : loops) k += "O" + s;
      keys[v] = std::move(k);
    }
    initial_ = rank_keys(keys);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      if (g.edges[e].is_loop()) continue;
      out_[g.edges[e].u].push_back({g.edges[e].v, to_string(t.edge_slopes[e])});
      out_[g.edges[e].v].push_back({g.edges[e].u, to_string(-t.edge_slopes[e])});
    }
  }

  CanonicalLabeling run() {
    search(initial_);
    return build(best_colors_);
  }

 private:
  std::vector<std::size_t> refine(std::vector<std::size_t> colors) const {
    const std::size_t n = colors.size();
    std::size_t classes = count(colors);
    while (true) {
      std::vector<std::string> keys(n);
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::string> nb;
        auto it = out_.find(v);
        if (it != out_.end())
          for (const auto& [w, s] : it->second) nb.push_back(std::to_string(colors[w]) + ":" + s);
        std::sort(nb.begin(), nb.end());
        std::string k = std::to_string(colors[v]) + "|";
        for (const auto& x : nb) k += x + ";";
        keys[v] = std::move(k);
      }
      auto next = rank_keys(keys);
      std::size_t c = count(next);
      colors = std::move(next);
      if (c == classes) return colors;
      classes = c;
    }
  }

  static std::size_t count(const std::vector<std::size_t>& colors) {
    return std::set<std::size_t>(colors.begin(), colors.end()).size();
  }

  void search(std::vector<std::size_t> colors) {
    colors = refine(std::move(colors));
    const std::size_t n = colors.size();
    if (count(colors) == n) {
      auto text = serialize(colors);
      if (!have_best_ || text < best_text_) {
        best_text_ = std::move(text);
        best_colors_ = colors;
        have_best_ = true;
      }
      return;
    }
    // first non-singleton cell in color order
    std::map<std::size_t, std::vector<std::size_t>> cells;
    for (std::size_t v = 0; v < n; ++v) cells[colors[v]].push_back(v);
    for (const auto& [c, members] : cells) {
      if (members.size() < 2) continue;
      for (auto x : members) {
        std::vector<std::size_t> next(n);
        for (std::size_t v = 0; v < n; ++v) next[v] = 2 * colors[v] + (v == x ? 0 : 1);
        search(std::move(next));
      }
      return;
    }
  }

  std::vector<EdgeKey> edge_keys(const std::vector<std::size_t>& pos) const {
    std::vector<EdgeKey> keys;
    const auto& g = t_.graph;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      std::size_t a = pos[g.edges[e].u], b = pos[g.edges[e].v];
      IntVector s = t_.edge_slopes[e];
      if (a == b)
        s = loop_normal(s);
      else if (a > b) {
        std::swap(a, b);
        s = -s;
      }
      keys.push_back({a, b, std::move(s)});
    }
    return keys;
  }

  std::string serialize(const std::vector<std::size_t>& pos) const {
    const auto& g = t_.graph;
    std::vector<std::size_t> order(pos.size());
    for (std::size_t v = 0; v < pos.size(); ++v) order[pos[v]] = v;
    std::string out = "N" + std::to_string(t_.lattice_dim) + " V";
    for (auto v : order) out += std::to_string(g.vertices[v].weight) + ",";
    out += " L";
    for (std::size_t l = 0; l < g.legs.size(); ++l)
      out += std::to_string(pos[g.legs[l].v]) + to_string(t_.leg_slopes[l]) + ",";
    auto keys = edge_keys(pos);
    std::sort(keys.begin(), keys.end());
    out += " E";
    for (const auto& k : keys) out += std::to_string(k.a) + "-" + std::to_string(k.b) + to_string(k.slope) + ",";
    return out;
  }

  CanonicalLabeling build(const std::vector<std::size_t>& pos) const {
    CanonicalLabeling lab;
    lab.text = best_text_;
    lab.vertex_order.resize(pos.size());
    for (std::size_t v = 0; v < pos.size(); ++v) lab.vertex_order[pos[v]] = v;
    auto keys = edge_keys(pos);
    std::vector<std::size_t> idx(keys.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    lab.edge_order = idx;
    for (auto e : idx) lab.edge_flipped.push_back(pos[t_.graph.edges[e].u] > pos[t_.graph.edges[e].v]);
    return lab;
  }

  const CombinatorialType& t_;
  std::vector<std::size_t> initial_;
  std::map<std::size_t, std::vector<std::pair<std::size_t, std::string>>> out_;
  bool have_best_ = false;
  std::string best_text_;
  std::vector<std::size_t> best_colors_;
};

}  // namespace detail

inline CanonicalLabeling canonical_labeling(const CombinatorialType& t) { return detail::Canonizer(t).run(); }

inline std::string canonical_string(const CombinatorialType& t) { return canonical_labeling(t).text; }

/// The canonical representative: vertices v0.., edges e0.. oriented from the
/// lower to the higher canonical vertex, legs l0.. in leg order.
inline CombinatorialType canonical_type(const CombinatorialType& t) {
  auto lab = canonical_labeling(t);
  const auto& g = t.graph;
  std::vector<std::size_t> pos(g.vertices.size());
  for (std::size_t i = 0; i < lab.vertex_order.size(); ++i) pos[lab.vertex_order[i]] = i;
  CombinatorialType c;
  c.lattice_dim = t.lattice_dim;
  for (std::size_t i = 0; i < lab.vertex_order.size(); ++i)
    c.graph.vertices.push_back({"v" + std::to_string(i), g.vertices[lab.vertex_order[i]].weight});
  for (std::size_t i = 0; i < lab.edge_order.size(); ++i) {
    auto e = lab.edge_order[i];
    std::size_t a = pos[g.edges[e].u], b = pos[g.edges[e].v];
    IntVector s = t.edge_slopes[e];
    if (a == b)
      s = detail::loop_normal(s);
    else if (a > b) {
      std::swap(a, b);
      s = -s;
    }
    c.graph.edges.push_back({"e" + std::to_string(i), a, b});
    c.edge_slopes.push_back(std::move(s));
  }
  for (std::size_t l = 0; l < g.legs.size(); ++l) {
    c.graph.legs.push_back({"l" + std::to_string(l), pos[g.legs[l].v]});
    c.leg_slopes.push_back(t.leg_slopes[l]);
  }
  return c;
}

inline bool same_class(const CombinatorialType& a, const CombinatorialType& b) {
  return canonical_string(a) == canonical_string(b);
}

/// Whether `iso` maps a onto b preserving weights, incidences, slopes and legs.
inline bool is_isomorphism(const CombinatorialType& a, const CombinatorialType& b, const TypeIso& iso) {
  const auto& ga = a.graph;
  const auto& gb = b.graph;
  if (a.lattice_dim != b.lattice_dim || ga.vertices.size() != gb.vertices.size() ||
      ga.edges.size() != gb.edges.size() || ga.legs.size() != gb.legs.size())
    return false;
  if (iso.vertex_map.size() != ga.vertices.size() || iso.edge_map.size() != ga.edges.size()) return false;
  if (std::set<std::size_t>(iso.vertex_map.begin(), iso.vertex_map.end()).size() != ga.vertices.size()) return false;
  if (std::set<std::size_t>(iso.edge_map.begin(), iso.edge_map.end()).size() != ga.edges.size()) return false;
  for (std::size_t v = 0; v < ga.vertices.size(); ++v)
    if (iso.vertex_map[v] >= gb.vertices.size() || ga.vertices[v].weight != gb.vertices[iso.vertex_map[v]].weight)
      return false;
  for (std::size_t l = 0; l < ga.legs.size(); ++l)
    if (iso.vertex_map[ga.legs[l].v] != gb.legs[l].v || a.leg_slopes[l] != b.leg_slopes[l]) return false;
  for (std::size_t e = 0; e < ga.edges.size(); ++e) {
    auto f = iso.edge_map[e];
    if (f >= gb.edges.size()) return false;
    std::size_t u = iso.vertex_map[ga.edges[e].u], v = iso.vertex_map[ga.edges[e].v];
    const auto& eb = gb.edges[f];
    if (u == v) {
      if (!eb.is_loop() || eb.u != u || detail::loop_normal(a.edge_slopes[e]) != detail::loop_normal(b.edge_slopes[f]))
        return false;
    } else if (eb.u == u && eb.v == v) {
      if (a.edge_slopes[e] != b.edge_slopes[f]) return false;
    } else if (eb.u == v && eb.v == u) {
      if (a.edge_slopes[e] != -b.edge_slopes[f]) return false;
    } else {
      return false;
    }
  }
  return true;
}

inline std::optional<TypeIso> find_isomorphism(const CombinatorialType& a, const CombinatorialType& b) {
  auto la = canonical_labeling(a);
  auto lb = canonical_labeling(b);
  if (la.text != lb.text) return std::nullopt;
  TypeIso iso;
  iso.vertex_map.resize(la.vertex_order.size());
  for (std::size_t i = 0; i < la.vertex_order.size(); ++i) iso.vertex_map[la.vertex_order[i]] = lb.vertex_order[i];
  iso.edge_map.resize(la.edge_order.size());
  for (std::size_t i = 0; i < la.edge_order.size(); ++i) iso.edge_map[la.edge_order[i]] = lb.edge_order[i];
  return iso;
}

/// All automorphisms fixing each leg, by backtracking over vertex maps and
/// then permuting interchangeable edges.
inline std::vector<TypeIso> automorphisms(const CombinatorialType& t) {
  const auto& g = t.graph;
  const std::size_t n = g.vertices.size();
  // fixed-point data per vertex
  std::vector<std::string> sig(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::string s = std::to_string(g.vertices[v].weight) + "/" + std::to_string(g.valence(v));
    std::vector<std::string> loops;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      if (g.edges[e].is_loop() && g.edges[e].u == v) loops.push_back(to_string(detail::loop_normal(t.edge_slopes[e])));
    std::sort(loops.begin(), loops.end());
    for (const auto& x : loops) s += "O" + x;
    sig[v] = s;
  }
  std::vector<std::optional<std::size_t>> forced(n);
  for (const auto& l : g.legs) forced[l.v] = l.v;

  // oriented slope multisets between ordered vertex pairs
  std::map<std::pair<std::size_t, std::size_t>, std::vector<IntVector>> between;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    if (ed.is_loop()) continue;
    between[{ed.u, ed.v}].push_back(t.edge_slopes[e]);
    between[{ed.v, ed.u}].push_back(-t.edge_slopes[e]);
  }
  for (auto& [k, list] : between) std::sort(list.begin(), list.end());
  auto slopes_between = [&](std::size_t a, std::size_t b) {
    auto it = between.find({a, b});
    return it == between.end() ? std::vector<IntVector>{} : it->second;
  };

  std::vector<std::vector<std::size_t>> vertex_maps;
  std::vector<std::size_t> sigma(n);
  std::vector<bool> used(n, false);
  std::function<void(std::size_t)> assign = [&](std::size_t v) {
    if (v == n) {
      vertex_maps.push_back(sigma);
      return;
    }
    for (std::size_t w = 0; w < n; ++w) {
      if (used[w] || sig[w] != sig[v]) continue;
      if (forced[v] && *forced[v] != w) continue;
      if (!forced[v] && forced[w]) continue;
      bool ok = true;
      for (std::size_t u = 0; u < v && ok; ++u) ok = slopes_between(u, v) == slopes_between(sigma[u], w);
      if (!ok) continue;
      sigma[v] = w;
      used[w] = true;
      assign(v + 1);
      used[w] = false;
    }
  };
  assign(0);

  std::vector<TypeIso> out;
  for (const auto& vm : vertex_maps) {
    // group edges by (endpoints, oriented slope); each group maps onto the
    // matching group of the image in every possible order
    std::map<std::tuple<std::size_t, std::size_t, IntVector>, std::vector<std::size_t>> groups;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const auto& ed = g.edges[e];
      if (ed.is_loop())
        groups[{ed.u, ed.u, detail::loop_normal(t.edge_slopes[e])}].push_back(e);
      else if (ed.u < ed.v)
        groups[{ed.u, ed.v, t.edge_slopes[e]}].push_back(e);
      else
        groups[{ed.v, ed.u, -t.edge_slopes[e]}].push_back(e);
    }
    auto image_key = [&](const std::tuple<std::size_t, std::size_t, IntVector>& k) {
      auto [a, b, s] = k;
      std::size_t x = vm[a], y = vm[b];
      if (x == y) return std::make_tuple(x, y, s);
      if (x < y) return std::make_tuple(x, y, s);
      return std::make_tuple(y, x, IntVector(-s));
    };
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> blocks;
    bool ok = true;
    for (const auto& [k, edges] : groups) {
      auto it = groups.find(image_key(k));
      if (it == groups.end() || it->second.size() != edges.size()) {
        ok = false;
        break;
      }
      blocks.push_back({edges, it->second});
    }
    if (!ok) continue;
    std::vector<std::size_t> em(g.edges.size());
    std::function<void(std::size_t)> expand = [&](std::size_t b) {
      if (b == blocks.size()) {
        out.push_back({vm, em});
        return;
      }
      auto target = blocks[b].second;
      std::sort(target.begin(), target.end());
      do {
        for (std::size_t i = 0; i < target.size(); ++i) em[blocks[b].first[i]] = target[i];
        expand(b + 1);
      } while (std::next_permutation(target.begin(), target.end()));
    };
    expand(0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class WallKind { Weightless3Valent, WeightlessAlmost3Valent, Other };

constexpr const char* to_string(WallKind k) {
  switch (k) {
    case WallKind::Weightless3Valent: return "Weightless3Valent";
    case WallKind::WeightlessAlmost3Valent: return "WeightlessAlmost3Valent";
    case WallKind::Other: return "Other";
  }
  return "?";
}

struct WallClass {
  WallKind kind = WallKind::Other;
  std::optional<std::size_t> four_valent_vertex;
};

inline WallClass classify(const CombinatorialType& t) {
  const auto& g = t.graph;
  std::optional<std::size_t> four;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (g.vertices[v].weight != 0) return {};
    auto val = g.valence(v);
    if (val == 3) continue;
    if (val == 4 && !four) {
      four = v;
      continue;
    }
    return {};
  }
  if (four) return {WallKind::WeightlessAlmost3Valent, four};
  return {WallKind::Weightless3Valent, std::nullopt};
}

// ---------------------------------------------------------------------------
// Contractions and adjacency

struct ContractionResult {
  CombinatorialType type;
  std::vector<std::size_t> vertex_map;              // old vertex -> new vertex
  std::vector<std::optional<std::size_t>> edge_map;  // old edge -> new edge, nothing when contracted
};

/// Weighted contraction of any set of edges. Each merged vertex keeps the id
/// of its lowest-index member and gains the weights plus the first Betti
/// number of the contracted subgraph it absorbs.
inline ContractionResult contract_edges(const CombinatorialType& t, const std::vector<std::size_t>& edges) {
  const auto& g = t.graph;
  const std::size_t n = g.vertices.size();
  std::vector<bool> gone(g.edges.size(), false);
  for (auto e : edges) {
    if (e >= g.edges.size()) throw Error(ErrorCode::UnknownEdge, "edge index out of range");
    gone[e] = true;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (gone[e]) {
      auto a = find(g.edges[e].u), b = find(g.edges[e].v);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::map<std::size_t, int> extra;  // root -> weight sum + contracted edges - members + 1
  std::map<std::size_t, int> members, contracted;
  for (std::size_t v = 0; v < n; ++v) {
    extra[find(v)] += g.vertices[v].weight;
    ++members[find(v)];
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (gone[e]) ++contracted[find(g.edges[e].u)];

  ContractionResult r;
  r.type.lattice_dim = t.lattice_dim;
  std::vector<std::size_t> new_index(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (find(v) != v) continue;
    new_index[v] = r.type.graph.vertices.size();
    int w = extra[v] + contracted[v] - members[v] + 1;
    r.type.graph.vertices.push_back({g.vertices[v].id, w});
  }
  r.vertex_map.resize(n);
  for (std::size_t v = 0; v < n; ++v) r.vertex_map[v] = new_index[find(v)];
  r.edge_map.assign(g.edges.size(), std::nullopt);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (gone[e]) continue;
    r.edge_map[e] = r.type.graph.edges.size();
    r.type.graph.edges.push_back({g.edges[e].id, r.vertex_map[g.edges[e].u], r.vertex_map[g.edges[e].v]});
    r.type.edge_slopes.push_back(t.edge_slopes[e]);
  }
  for (std::size_t l = 0; l < g.legs.size(); ++l) {
    r.type.graph.legs.push_back({g.legs[l].id, r.vertex_map[g.legs[l].v]});
    r.type.leg_slopes.push_back(t.leg_slopes[l]);
  }
  return r;
}

/// Contraction restricted to zero-slope edges.
inline CombinatorialType contract(const CombinatorialType& t, const std::vector<std::string>& edge_ids) {
  std::vector<std::size_t> idx;
  for (const auto& id : edge_ids) {
    auto e = t.graph.edge_at(id);
    if (!is_zero(t.edge_slopes[e]))
      throw Error(ErrorCode::NonzeroSlopeContraction, "edge '" + id + "' has slope " + to_string(t.edge_slopes[e]));
    idx.push_back(e);
  }
  return contract_edges(t, idx).type;
}

enum class AdjacencyMode { ZeroSlope, AnySlope };

/// Whether contracting some edges of `super` yields `sub` up to isomorphism.
inline bool is_adjacent(const CombinatorialType& sub, const CombinatorialType& super,
                        AdjacencyMode mode = AdjacencyMode::AnySlope) {
  if (sub.lattice_dim != super.lattice_dim || sub.leg_slopes != super.leg_slopes) return false;
  const auto& es = super.graph.edges;
  if (es.size() < sub.graph.edges.size()) return false;
  const std::size_t k = es.size() - sub.graph.edges.size();
  auto target = canonical_string(sub);
  std::vector<std::size_t> allowed;
  for (std::size_t e = 0; e < es.size(); ++e)
    if (mode == AdjacencyMode::AnySlope || is_zero(super.edge_slopes[e])) allowed.push_back(e);
  if (allowed.size() < k) return false;
  std::vector<bool> pick(allowed.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < allowed.size(); ++i)
      if (pick[i]) chosen.push_back(allowed[i]);
    if (canonical_string(contract_edges(super, chosen).type) == target) return true;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return false;
}

// ---------------------------------------------------------------------------
// Resolutions of a 4-valent vertex

namespace detail {

inline std::string fresh_id(const std::string& prefix, const std::function<bool(const std::string&)>& taken) {
  for (std::size_t k = 0;; ++k) {
    auto id = prefix + std::to_string(k);
    if (!taken(id)) return id;
  }
}

}  // namespace detail

/// The (at most three) weightless 3-valent types obtained by splitting the
/// 4-valent vertex v. In each output the new edge is the last edge and the
/// new vertex the last vertex; v keeps its id and carries the first end.
inline std::vector<CombinatorialType> resolve_4valent(const CombinatorialType& t, std::size_t v) {
  auto cls = classify(t);
  if (cls.kind != WallKind::WeightlessAlmost3Valent || cls.four_valent_vertex != v)
    throw Error(ErrorCode::NotAlmost3Valent,
                "vertex " + (v < t.graph.vertices.size() ? "'" + t.graph.vertices[v].id + "'" : std::to_string(v)) +
                    " is not the 4-valent vertex of a weightless almost 3-valent type");
  require_balanced(t);
  const auto& g = t.graph;
  struct End {
    int kind;  // 0: edge tail, 1: edge head, 2: leg
    std::size_t index;
    IntVector slope;  // outgoing from v
  };
  std::vector<End> ends;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.edges[e].u == v) ends.push_back({0, e, t.edge_slopes[e]});
    if (g.edges[e].v == v) ends.push_back({1, e, -t.edge_slopes[e]});
  }
  for (std::size_t l = 0; l < g.legs.size(); ++l)
    if (g.legs[l].v == v) ends.push_back({2, l, t.leg_slopes[l]});

  auto new_vertex = detail::fresh_id("v", [&](const std::string& id) { return g.vertex_index(id).has_value(); });
  auto new_edge = detail::fresh_id("e", [&](const std::string& id) { return g.edge_index(id).has_value(); });
  const std::size_t v2 = g.vertices.size();

  const int pairings[3][2] = {{2, 3}, {1, 3}, {1, 2}};  // ends moved to the new vertex
  std::vector<CombinatorialType> out;
  std::set<std::string> seen;
  for (const auto& moved : pairings) {
    CombinatorialType r = t;
    r.graph.vertices.push_back({new_vertex, 0});
    IntVector stay_sum(t.lattice_dim, Int(0));
    for (int i = 0; i < 4; ++i) {
      bool move = i == moved[0] || i == moved[1];
      const auto& end = ends[static_cast<std::size_t>(i)];
      if (!move) {
        stay_sum = stay_sum + end.slope;
        continue;
      }
      if (end.kind == 0) r.graph.edges[end.index].u = v2;
      if (end.kind == 1) r.graph.edges[end.index].v = v2;
      if (end.kind == 2) r.graph.legs[end.index].v = v2;
    }
    r.graph.edges.push_back({new_edge, v, v2});
    r.edge_slopes.push_back(-stay_sum);
    if (seen.insert(canonical_string(r)).second) out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration

struct EnumerationOptions {
  int genus = 0;
  std::size_t contracted_legs = 0;  // n: the first n legs have slope 0
  std::vector<IntVector> degree;    // nabla
  std::size_t max_edges = 0;
  std::size_t lattice_dim = 0;      // inferred from the degree when 0
  unsigned threads = 0;  // 0: TROPMODULI_THREADS or 1
};

namespace detail {

inline CombinatorialType bare_graph(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  CombinatorialType t;
  t.lattice_dim = 0;
  for (std::size_t v = 0; v < vertices; ++v) t.graph.vertices.push_back({"v" + std::to_string(v), 0});
  for (std::size_t e = 0; e < edges.size(); ++e) {
    t.graph.edges.push_back({"e" + std::to_string(e), edges[e].first, edges[e].second});
    t.edge_slopes.push_back({});
  }
  return t;
}

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

/// Connected multigraphs (loops allowed) with `v` vertices and `e` edges, one
/// per isomorphism class, grown by adding an edge among existing vertices or
/// a pendant edge to a new vertex.
class MultigraphCatalog {
 public:
  const std::vector<EdgeList>& get(std::size_t v, std::size_t e) {
    auto key = std::make_pair(v, e);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::map<std::string, EdgeList> found;
    auto add = [&](EdgeList edges, std::size_t nv) {
      auto text = canonical_string(bare_graph(nv, edges));
      found.emplace(std::move(text), std::move(edges));
    };
    if (v == 0) {
      // nothing
    } else if (e + 1 < v) {
      // too few edges to connect
    } else if (e == 0) {
      if (v == 1) add({}, 1);
    } else {
      for (const auto& base : get(v, e - 1))
        for (std::size_t a = 0; a < v; ++a)
          for (std::size_t b = a; b < v; ++b) {
            auto next = base;
            next.push_back({a, b});
            add(std::move(next), v);
          }
      if (v >= 2)
        for (const auto& base : get(v - 1, e - 1))
          for (std::size_t a = 0; a + 1 < v; ++a) {
            auto next = base;
            next.push_back({a, v - 1});
            add(std::move(next), v);
          }
    }
    std::vector<EdgeList> list;
    for (auto& [k, edges] : found) list.push_back(std::move(edges));
    return cache_.emplace(key, std::move(list)).first->second;
  }

 private:
  std::map<std::pair<std::size_t, std::size_t>, std::vector<EdgeList>> cache_;
};

struct EnumerationTask {
  std::size_t vertices;
  EdgeList edges;
  int weight_total;
};

/// Types over one underlying multigraph, keyed by canonical string.
inline void enumerate_over_graph(const EnumerationTask& task, const std::vector<IntVector>& ext, std::size_t dim,
                                 const IntVector& bound, std::map<std::string, CombinatorialType>& out) {
  const std::size_t nv = task.vertices;
  const std::size_t ne = task.edges.size();
  const std::size_t nl = ext.size();
  std::vector<std::size_t> deg(nv, 0);
  for (const auto& [a, b] : task.edges) {
    ++deg[a];
    ++deg[b];
  }

  CombinatorialType base = bare_graph(nv, task.edges);
  base.lattice_dim = dim;
  base.edge_slopes.assign(ne, IntVector(dim, Int(0)));
  base.leg_slopes = ext;
  for (std::size_t l = 0; l < nl; ++l) base.graph.legs.push_back({"l" + std::to_string(l), 0});
  auto tree = spanning_tree(base.graph);
  std::vector<std::size_t> free_edges;  // non-tree, non-loop
  for (std::size_t e = 0; e < ne; ++e)
    if (!tree.in_tree[e] && !base.graph.edges[e].is_loop()) free_edges.push_back(e);

  std::vector<int> weights(nv, 0);
  std::vector<std::size_t> leg_at(nl, 0);
  std::vector<std::size_t> legs_on(nv, 0);

  auto solve_slopes = [&](CombinatorialType& t) {
    // every free edge slope in the box; tree slopes by peeling leaves
    const std::size_t slots = free_edges.size() * dim;
    std::vector<Int> value(slots);
    for (std::size_t i = 0; i < slots; ++i) value[i] = -bound[i % dim];
    while (true) {
      for (std::size_t i = 0; i < free_edges.size(); ++i)
        for (std::size_t k = 0; k < dim; ++k) t.edge_slopes[free_edges[i]][k] = value[i * dim + k];
      for (std::size_t i = tree.order.size(); i-- > 1;) {
        auto c = tree.order[i];
        auto pe = *tree.parent_edge[c];
        // outgoing sum at c excluding the parent edge
        IntVector s(dim, Int(0));
        for (std::size_t e = 0; e < ne; ++e) {
          if (e == pe || t.graph.edges[e].is_loop()) continue;
          if (t.graph.edges[e].u == c) s = s + t.edge_slopes[e];
          if (t.graph.edges[e].v == c) s = s - t.edge_slopes[e];
        }
        for (std::size_t l = 0; l < nl; ++l)
          if (t.graph.legs[l].v == c) s = s + t.leg_slopes[l];
        // outgoing along the parent edge must be -s
        t.edge_slopes[pe] = t.graph.edges[pe].u == c ? IntVector(-s) : s;
      }
      if (is_zero(t.balance_at(tree.order.front()))) {
        if (positive_cycle_lengths(t)) {
          for (std::size_t e = 0; e < ne; ++e)
            for (std::size_t k = 0; k < dim; ++k)
              if (abs(t.edge_slopes[e][k]) > bound[k])
                throw std::logic_error("edge slope exceeds the enumeration bound on a nonempty stratum");
          out.emplace(canonical_string(t), t);
        }
      }
      // odometer
      std::size_t i = 0;
      for (; i < slots; ++i) {
        if (value[i] < bound[i % dim]) {
          ++value[i];
          break;
        }
        value[i] = -bound[i % dim];
      }
      if (i == slots) break;
    }
  };

  std::function<void(std::size_t)> place_leg = [&](std::size_t l) {
    if (l == nl) {
      for (std::size_t v = 0; v < nv; ++v)
        if (deg[v] + legs_on[v] + 2 * static_cast<std::size_t>(weights[v]) < 3) return;
      CombinatorialType t = base;
      for (std::size_t v = 0; v < nv; ++v) t.graph.vertices[v].weight = weights[v];
      for (std::size_t i = 0; i < nl; ++i) t.graph.legs[i].v = leg_at[i];
      solve_slopes(t);
      return;
    }
    // remaining legs must cover the remaining stability deficit
    std::size_t deficit = 0;
    for (std::size_t v = 0; v < nv; ++v) {
      std::size_t have = deg[v] + legs_on[v] + 2 * static_cast<std::size_t>(weights[v]);
      if (have < 3) deficit += 3 - have;
    }
    if (deficit > nl - l) return;
    for (std::size_t v = 0; v < nv; ++v) {
      leg_at[l] = v;
      ++legs_on[v];
      place_leg(l + 1);
      --legs_on[v];
    }
  };

  std::function<void(std::size_t, int)> place_weight = [&](std::size_t v, int left) {
    if (v + 1 == nv) {
      weights[v] = left;
      place_leg(0);
      return;
    }
    for (int w = 0; w <= left; ++w) {
      weights[v] = w;
      place_weight(v + 1, left - w);
    }
  };
  place_weight(0, task.weight_total);
}

}  // namespace detail

/// Stable balanced types of genus g with extended degree (n zeros, then
/// nabla), at most max_edges edges and nonempty stratum, one canonical
/// representative per isomorphism class, sorted by canonical string.
///
/// Free edge slopes are searched in the box |s_k| <= sum_i |nabla_{i,k}|:
/// on a nonempty stratum the k-th slope coordinate is a flow along
/// increasing h_k, so it never exceeds the total leg flux.
inline std::vector<CombinatorialType> enumerate_types(const EnumerationOptions& opt) {
  std::size_t dim = opt.lattice_dim;
  for (const auto& d : opt.degree) {
    if (dim == 0) dim = d.size();
    if (d.size() != dim) throw Error(ErrorCode::DimMismatch, "degree entries have different lengths");
  }
  if (dim == 0) dim = 2;
  if (opt.genus < 0) throw Error(ErrorCode::InvalidArgument, "negative genus");

  std::vector<IntVector> ext(opt.contracted_legs, IntVector(dim, Int(0)));
  ext.insert(ext.end(), opt.degree.begin(), opt.degree.end());
  IntVector total(dim, Int(0)), bound(dim, Int(0));
  for (const auto& d : ext) {
    total = total + d;
    for (std::size_t k = 0; k < dim; ++k) bound[k] += abs(d[k]);
  }
  if (!is_zero(total)) return {};

  const std::size_t nl = ext.size();
  detail::MultigraphCatalog catalog;
  std::vector<detail::EnumerationTask> tasks;
  for (std::size_t e = 0; e <= opt.max_edges; ++e)
    for (int w = 0; w <= opt.genus; ++w) {
      long v = static_cast<long>(e) + 1 + w - opt.genus;
      if (v < 1) continue;
      if (2 * e + nl + 2 * static_cast<std::size_t>(w) < 3 * static_cast<std::size_t>(v)) continue;
      for (const auto& edges : catalog.get(static_cast<std::size_t>(v), e))
        tasks.push_back({static_cast<std::size_t>(v), edges, w});
    }

  std::vector<std::map<std::string, CombinatorialType>> results(tasks.size());
  parallel_for(tasks.size(), opt.threads,
               [&](std::size_t i) { detail::enumerate_over_graph(tasks[i], ext, dim, bound, results[i]); });

  std::map<std::string, CombinatorialType> merged;
  for (auto& r : results)
    for (auto& [k, t] : r) merged.emplace(k, std::move(t));
  std::vector<CombinatorialType> out;
  for (auto& [k, t] : merged) out.push_back(canonical_type(t));
  return out;
}

// ---------------------------------------------------------------------------
// Wall graphs

struct WallGraph {
  struct Node {
    std::string id;
    std::string canonical;
    CombinatorialType type;
  };
  struct Wall {
    std::string id;
    std::string canonical;
    CombinatorialType type;
    std::size_t four_valent_vertex = 0;
    std::vector<std::size_t> resolutions;  // node indices, sorted
  };
  std::vector<Node> nodes;
  std::vector<Wall> walls;

  std::optional<std::size_t> node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].id == id) return i;
    return std::nullopt;
  }
};

/// Nodes are the given weightless 3-valent types; walls are the weightless
/// almost 3-valent types with nonempty stratum obtained by collapsing one
/// edge of a node, joined to every node among their resolutions.
inline WallGraph wall_graph(const std::vector<CombinatorialType>& types) {
  WallGraph wg;
  if (types.empty()) return wg;
  const int g0 = genus(types.front().graph);
  for (const auto& t : types) {
    if (t.lattice_dim != types.front().lattice_dim || t.leg_slopes != types.front().leg_slopes ||
        genus(t.graph) != g0)
      throw Error(ErrorCode::MixedInvariants, "types do not share genus and extended degree");
    if (classify(t).kind != WallKind::Weightless3Valent)
      throw Error(ErrorCode::InvalidArgument, "wall graph nodes must be weightless 3-valent");
  }
  std::map<std::string, CombinatorialType> nodes;
  for (const auto& t : types) nodes.emplace(canonical_string(t), canonical_type(t));
  std::map<std::string, std::size_t> node_at;
  for (auto& [k, t] : nodes) {
    node_at[k] = wg.nodes.size();
    wg.nodes.push_back({"N" + std::to_string(wg.nodes.size()), k, t});
  }

  std::map<std::string, CombinatorialType> walls;
  for (const auto& n : wg.nodes)
    for (std::size_t e = 0; e < n.type.graph.edges.size(); ++e) {
      if (n.type.graph.edges[e].is_loop()) continue;
      auto w = contract_edges(n.type, {e}).type;
      if (classify(w).kind != WallKind::WeightlessAlmost3Valent) continue;
      auto key = canonical_string(w);
      if (walls.count(key)) continue;
      if (!positive_cycle_lengths(w)) continue;
      walls.emplace(std::move(key), canonical_type(w));
    }
  for (auto& [k, t] : walls) {
    WallGraph::Wall wall{"W" + std::to_string(wg.walls.size()), k, t, *classify(t).four_valent_vertex, {}};
    std::set<std::size_t> inc;
    for (const auto& r : resolve_4valent(t, wall.four_valent_vertex)) {
      auto it = node_at.find(canonical_string(r));
      if (it != node_at.end()) inc.insert(it->second);
    }
    wall.resolutions.assign(inc.begin(), inc.end());
    wg.walls.push_back(std::move(wall));
  }
  return wg;
}

/// Alternating node/wall/node id path from a to b, or nothing.
inline std::optional<std::vector<std::string>> connected_through_walls(const WallGraph& wg, const std::string& a,
                                                                       const std::string& b) {
  auto ia = wg.node_index(a), ib = wg.node_index(b);
  if (!ia) throw Error(ErrorCode::SeedNotInGraph, "no node '" + a + "'");
  if (!ib) throw Error(ErrorCode::SeedNotInGraph, "no node '" + b + "'");
  std::vector<std::vector<std::size_t>> walls_at(wg.nodes.size());
  for (std::size_t w = 0; w < wg.walls.size(); ++w)
    for (auto n : wg.walls[w].resolutions) walls_at[n].push_back(w);
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> via(wg.nodes.size());  // (prev node, wall)
  std::vector<bool> seen(wg.nodes.size(), false);
  std::deque<std::size_t> queue{*ia};
  seen[*ia] = true;
  while (!queue.empty()) {
    auto x = queue.front();
    queue.pop_front();
    if (x == *ib) break;
    for (auto w : walls_at[x])
      for (auto y : wg.walls[w].resolutions)
        if (!seen[y]) {
          seen[y] = true;
          via[y] = std::make_pair(x, w);
          queue.push_back(y);
        }
  }
  if (!seen[*ib]) return std::nullopt;
  std::vector<std::string> path{wg.nodes[*ib].id};
  for (auto x = *ib; via[x];) {
    auto [prev, w] = *via[x];
    path.push_back(wg.walls[w].id);
    path.push_back(wg.nodes[prev].id);
    x = prev;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace tropmoduli
