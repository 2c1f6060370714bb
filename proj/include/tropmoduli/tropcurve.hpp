#pragma once

// Weighted graphs, combinatorial types and parameterized tropical curves:
// genus, stability, balancing, realization and stabilization.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tropmoduli/error.hpp"
#include "tropmoduli/exact_linalg.hpp"
#include "tropmoduli/report.hpp"

namespace tropmoduli {

struct GraphVertex {
  std::string id;
  int weight = 0;
};

/// Endpoints are vertex indices; u == v is a loop.
struct GraphEdge {
  std::string id;
  std::size_t u = 0;
  std::size_t v = 0;
  bool is_loop() const { return u == v; }
};

struct GraphLeg {
  std::string id;
  std::size_t v = 0;
};

/// Legs are ordered; their position in `legs` is part of the data.
struct WeightedGraph {
  std::vector<GraphVertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<GraphLeg> legs;

  std::optional<std::size_t> vertex_index(const std::string& id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].id == id) return i;
    return std::nullopt;
  }
  std::size_t vertex_at(const std::string& id) const {
    auto i = vertex_index(id);
    if (!i) throw Error(ErrorCode::UnknownVertex, "no vertex '" + id + "'");
    return *i;
  }
  std::optional<std::size_t> edge_index(const std::string& id) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (edges[i].id == id) return i;
    return std::nullopt;
  }
  std::size_t edge_at(const std::string& id) const {
    auto i = edge_index(id);
    if (!i) throw Error(ErrorCode::UnknownEdge, "no edge '" + id + "'");
    return *i;
  }

  /// |Star(v)|: edge ends (a loop counts twice) plus legs.
  std::size_t valence(std::size_t v) const {
    std::size_t n = 0;
    for (const auto& e : edges) n += (e.u == v) + (e.v == v);
    for (const auto& l : legs) n += (l.v == v);
    return n;
  }

  int total_weight() const {
    int w = 0;
    for (const auto& v : vertices) w += v.weight;
    return w;
  }

  bool connected() const {
    if (vertices.empty()) return false;
    std::vector<std::vector<std::size_t>> adj(vertices.size());
    for (const auto& e : edges) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::vector<bool> seen(vertices.size(), false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
      auto x = queue.front();
      queue.pop_front();
      for (auto y : adj[x])
        if (!seen[y]) {
          seen[y] = true;
          ++count;
          queue.push_back(y);
        }
    }
    return count == vertices.size();
  }
};

inline int genus(const WeightedGraph& g) {
  if (!g.connected()) throw Error(ErrorCode::Disconnected, "genus of a disconnected (or empty) graph");
  return static_cast<int>(g.edges.size()) - static_cast<int>(g.vertices.size()) + 1 + g.total_weight();
}

inline bool is_stable(const WeightedGraph& g) {
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (g.valence(v) + 2 * static_cast<std::size_t>(g.vertices[v].weight) < 3) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Combinatorial types

/// Edge slopes are stored along each edge's own orientation u -> v; the
/// reverse orientation has the negated slope. Leg slopes point away from
/// their vertex.
struct CombinatorialType {
  WeightedGraph graph;
  std::size_t lattice_dim = 2;
  std::vector<IntVector> edge_slopes;
  std::vector<IntVector> leg_slopes;

  /// Slope of edge e leaving vertex `from`; for loops, along u -> v.
  IntVector slope_from(std::size_t e, std::size_t from) const {
    const auto& ed = graph.edges[e];
    if (ed.u == from) return edge_slopes[e];
    if (ed.v == from) return -edge_slopes[e];
    throw Error(ErrorCode::InvalidArgument, "vertex is not an endpoint of edge '" + ed.id + "'");
  }

  /// Sum of outgoing slopes at v.
  IntVector balance_at(std::size_t v) const {
    IntVector s(lattice_dim, Int(0));
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      const auto& ed = graph.edges[e];
      if (ed.is_loop()) continue;
      if (ed.u == v) s = s + edge_slopes[e];
      if (ed.v == v) s = s - edge_slopes[e];
    }
    for (std::size_t l = 0; l < graph.legs.size(); ++l)
      if (graph.legs[l].v == v) s = s + leg_slopes[l];
    return s;
  }
};

struct Degree {
  std::vector<IntVector> extended;
  std::vector<IntVector> reduced;
};

inline Degree degree_of(const CombinatorialType& t) {
  Degree d{t.leg_slopes, {}};
  for (const auto& s : t.leg_slopes)
    if (!is_zero(s)) d.reduced.push_back(s);
  return d;
}

/// Ids, endpoints and slope lengths; rule "STRUCTURE".
inline ValidationReport check_structure(const CombinatorialType& t) {
  ValidationReport r;
  const auto& g = t.graph;
  std::set<std::string> ids;
  for (const auto& v : g.vertices) {
    if (!ids.insert("v:" + v.id).second) r.add("STRUCTURE", v.id, "duplicate vertex id");
    if (v.weight < 0) r.add("STRUCTURE", v.id, "negative weight");
  }
  for (const auto& e : g.edges) {
    if (!ids.insert("e:" + e.id).second) r.add("STRUCTURE", e.id, "duplicate edge id");
    if (e.u >= g.vertices.size() || e.v >= g.vertices.size()) r.add("STRUCTURE", e.id, "endpoint out of range");
  }
  for (const auto& l : g.legs) {
    if (!ids.insert("l:" + l.id).second) r.add("STRUCTURE", l.id, "duplicate leg id");
    if (l.v >= g.vertices.size()) r.add("STRUCTURE", l.id, "leg vertex out of range");
  }
  if (t.edge_slopes.size() != g.edges.size()) r.add("STRUCTURE", "edges", "one slope per edge required");
  if (t.leg_slopes.size() != g.legs.size()) r.add("STRUCTURE", "legs", "one slope per leg required");
  for (const auto& s : t.edge_slopes)
    if (s.size() != t.lattice_dim) r.add("STRUCTURE", "edges", "slope has wrong dimension");
  for (const auto& s : t.leg_slopes)
    if (s.size() != t.lattice_dim) r.add("STRUCTURE", "legs", "slope has wrong dimension");
  if (g.vertices.empty()) r.add("STRUCTURE", "graph", "no vertices");
  else if (r.ok() && !g.connected()) r.add("STRUCTURE", "graph", "graph is disconnected");
  return r;
}

inline ValidationReport check_balanced(const CombinatorialType& t) {
  ValidationReport r;
  for (std::size_t v = 0; v < t.graph.vertices.size(); ++v) {
    auto s = t.balance_at(v);
    if (!is_zero(s)) r.add("BALANCING", t.graph.vertices[v].id, "outgoing slopes sum to " + to_string(s));
  }
  return r;
}

inline bool is_balanced(const CombinatorialType& t) { return check_balanced(t).ok(); }

// ---------------------------------------------------------------------------
// Parameterized tropical curves

struct ParameterizedTropicalCurve {
  CombinatorialType type;
  std::vector<Rat> lengths;          // per edge
  std::vector<RatVector> positions;  // per vertex, in N_R
};

inline const CombinatorialType& type_of(const ParameterizedTropicalCurve& p) { return p.type; }

namespace detail {

struct SpanningTree {
  std::vector<std::optional<std::size_t>> parent_edge;  // edge to parent, none at root
  std::vector<std::size_t> parent;
  std::vector<std::size_t> order;  // BFS order from the root
  std::vector<std::size_t> depth;
  std::vector<bool> in_tree;       // per edge
};

inline SpanningTree spanning_tree(const WeightedGraph& g, std::size_t root = 0) {
  SpanningTree t;
  const std::size_t n = g.vertices.size();
  t.parent_edge.assign(n, std::nullopt);
  t.parent.assign(n, root);
  t.depth.assign(n, 0);
  t.in_tree.assign(g.edges.size(), false);
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    incident[g.edges[e].u].push_back(e);
    if (!g.edges[e].is_loop()) incident[g.edges[e].v].push_back(e);
  }
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{root};
  seen[root] = true;
  while (!queue.empty()) {
    auto x = queue.front();
    queue.pop_front();
    t.order.push_back(x);
    for (auto e : incident[x]) {
      auto y = g.edges[e].u == x ? g.edges[e].v : g.edges[e].u;
      if (seen[y]) continue;
      seen[y] = true;
      t.parent_edge[y] = e;
      t.parent[y] = x;
      t.depth[y] = t.depth[x] + 1;
      t.in_tree[e] = true;
      queue.push_back(y);
    }
  }
  if (t.order.size() != n) throw Error(ErrorCode::Disconnected, "graph is disconnected");
  return t;
}

/// Edges of the fundamental cycle of non-tree edge e with the sign of each
/// when the cycle is traversed along e from u to v and back through the tree.
inline std::vector<std::pair<std::size_t, int>> fundamental_cycle(const WeightedGraph& g, const SpanningTree& t,
                                                                  std::size_t e) {
  std::vector<std::pair<std::size_t, int>> cycle{{e, 1}};
  std::size_t a = g.edges[e].v, b = g.edges[e].u;
  // walk a (end of e) back to b through the tree: a -> ... -> lca -> ... -> b
  std::vector<std::pair<std::size_t, int>> from_a, from_b;
  while (a != b) {
    if (t.depth[a] >= t.depth[b]) {
      auto pe = *t.parent_edge[a];
      // moving a -> parent(a); sign +1 if that is the edge's orientation
      from_a.push_back({pe, g.edges[pe].u == a ? 1 : -1});
      a = t.parent[a];
    } else {
      auto pe = *t.parent_edge[b];
      // traversed parent(b) -> b at the end of the cycle
      from_b.push_back({pe, g.edges[pe].v == b ? 1 : -1});
      b = t.parent[b];
    }
  }
  cycle.insert(cycle.end(), from_a.begin(), from_a.end());
  cycle.insert(cycle.end(), from_b.rbegin(), from_b.rend());
  return cycle;
}

}  // namespace detail

/// Positions from the root along a spanning tree; every other edge must close
/// up, otherwise CycleInconsistency names the offending cycle.
inline ParameterizedTropicalCurve realize(const CombinatorialType& t, const std::vector<Rat>& lengths,
                                          const RatVector& root_position) {
  auto structure = check_structure(t);
  if (!structure.ok())
    throw Error(structure.violations.front().detail == "graph is disconnected" ? ErrorCode::Disconnected
                                                                                : ErrorCode::InvalidArgument,
                structure.violations.front().where + ": " + structure.violations.front().detail);
  auto bal = check_balanced(t);
  if (!bal.ok())
    throw Error(ErrorCode::UnbalancedType, bal.violations.front().where + ": " + bal.violations.front().detail);
  if (lengths.size() != t.graph.edges.size())
    throw Error(ErrorCode::DimMismatch, "one length per edge required");
  if (root_position.size() != t.lattice_dim) throw Error(ErrorCode::DimMismatch, "root position has wrong dimension");
  for (std::size_t e = 0; e < lengths.size(); ++e)
    if (lengths[e] <= 0)
      throw Error(ErrorCode::InvalidArgument, "edge '" + t.graph.edges[e].id + "' has nonpositive length");

  const auto& g = t.graph;
  auto tree = detail::spanning_tree(g);
  std::vector<RatVector> pos(g.vertices.size());
  pos[tree.order.front()] = root_position;
  for (std::size_t i = 1; i < tree.order.size(); ++i) {
    auto v = tree.order[i];
    auto e = *tree.parent_edge[v];
    auto p = tree.parent[v];
    pos[v] = pos[p] + scaled(t.slope_from(e, p), lengths[e]);
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (tree.in_tree[e]) continue;
    const auto& ed = g.edges[e];
    auto gap = pos[ed.v] - pos[ed.u] - scaled(t.edge_slopes[e], lengths[e]);
    if (is_zero(gap)) continue;
    std::string witness;
    if (ed.is_loop()) {
      witness = ed.id;
    } else {
      for (const auto& [ce, sign] : detail::fundamental_cycle(g, tree, e))
        witness += (witness.empty() ? "" : " ") + std::string(sign > 0 ? "+" : "-") + g.edges[ce].id;
    }
    RatVector sum(t.lattice_dim, Rat(0));
    if (ed.is_loop()) {
      sum = scaled(t.edge_slopes[e], lengths[e]);
    } else {
      for (const auto& [ce, sign] : detail::fundamental_cycle(g, tree, e))
        sum = sum + scaled(t.edge_slopes[ce], Rat(lengths[ce] * sign));
    }
    std::string s = "(";
    for (std::size_t k = 0; k < sum.size(); ++k) s += (k ? "," : "") + to_string(sum[k]);
    throw Error(ErrorCode::CycleInconsistency, "cycle [" + witness + "] has length-weighted slope sum " + s + ")");
  }
  return {t, lengths, std::move(pos)};
}

inline ValidationReport validate_curve(const ParameterizedTropicalCurve& p) {
  ValidationReport r = check_structure(p.type);
  if (!r.ok()) return r;
  r.merge(check_balanced(p.type));
  const auto& g = p.type.graph;
  if (p.lengths.size() != g.edges.size()) {
    r.add("LENGTH", "edges", "one length per edge required");
    return r;
  }
  if (p.positions.size() != g.vertices.size()) {
    r.add("POSITION", "vertices", "one position per vertex required");
    return r;
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (p.positions[v].size() != p.type.lattice_dim) {
      r.add("POSITION", g.vertices[v].id, "position has wrong dimension");
      return r;
    }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    if (p.lengths[e] <= 0) r.add("LENGTH", ed.id, "length " + to_string(p.lengths[e]) + " is not positive");
    auto gap = p.positions[ed.v] - p.positions[ed.u] - scaled(p.type.edge_slopes[e], p.lengths[e]);
    if (!is_zero(gap)) r.add("EDGE-RELATION", ed.id, "h(v) - h(u) differs from length * slope");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Stabilization

/// How a type stabilizes: the stable type plus, for each of its vertices
/// and edges, where it came from. Merged edges list their pieces; lengths
/// of the result are sums over the pieces.
struct StabilizationPlan {
  CombinatorialType result;
  std::vector<std::size_t> vertex_origin;
  std::vector<std::vector<std::size_t>> edge_origin;
};

inline StabilizationPlan stabilization_plan(const CombinatorialType& t) {
  // Work on a mutable copy with origin bookkeeping and alive flags.
  struct E {
    std::size_t u, v;
    IntVector slope;
    std::vector<std::size_t> origin;
    bool alive = true;
  };
  const auto& g = t.graph;
  std::vector<E> edges;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    edges.push_back({g.edges[e].u, g.edges[e].v, t.edge_slopes[e], {e}, true});
  std::vector<bool> vertex_alive(g.vertices.size(), true);
  std::vector<std::size_t> legs_at(g.vertices.size(), 0);
  for (const auto& l : g.legs) ++legs_at[l.v];

  auto incident = [&](std::size_t v) {
    std::vector<std::size_t> ends;  // edge index, repeated for loops
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!edges[e].alive) continue;
      if (edges[e].u == v) ends.push_back(e);
      if (edges[e].v == v) ends.push_back(e);
    }
    return ends;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < g.vertices.size() && !changed; ++v) {
      if (!vertex_alive[v] || g.vertices[v].weight != 0 || legs_at[v] != 0) continue;
      auto ends = incident(v);
      if (ends.size() == 1 && is_zero(edges[ends[0]].slope)) {
        std::size_t alive = std::count(vertex_alive.begin(), vertex_alive.end(), true);
        if (alive == 1) continue;
        edges[ends[0]].alive = false;
        vertex_alive[v] = false;
        changed = true;
      } else if (ends.size() == 2 && ends[0] != ends[1]) {
        auto a = ends[0], b = ends[1];
        if (a > b) std::swap(a, b);
        // orient a into v and b out of v
        auto orient_into = [&](E& e) {
          if (e.v != v) {
            std::swap(e.u, e.v);
            e.slope = -e.slope;
          }
        };
        auto orient_out = [&](E& e) {
          if (e.u != v) {
            std::swap(e.u, e.v);
            e.slope = -e.slope;
          }
        };
        orient_into(edges[a]);
        orient_out(edges[b]);
        if (edges[a].slope != edges[b].slope) continue;  // unbalanced; leave for the stability check
        edges[a].v = edges[b].v;
        edges[a].origin.insert(edges[a].origin.end(), edges[b].origin.begin(), edges[b].origin.end());
        edges[b].alive = false;
        vertex_alive[v] = false;
        changed = true;
      }
    }
  }

  StabilizationPlan plan;
  plan.result.lattice_dim = t.lattice_dim;
  std::vector<std::size_t> new_index(g.vertices.size(), 0);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (!vertex_alive[v]) continue;
    new_index[v] = plan.result.graph.vertices.size();
    plan.result.graph.vertices.push_back(g.vertices[v]);
    plan.vertex_origin.push_back(v);
  }
  for (auto& e : edges) {
    if (!e.alive) continue;
    auto first = e.origin.front();
    plan.result.graph.edges.push_back({g.edges[first].id, new_index[e.u], new_index[e.v]});
    plan.result.edge_slopes.push_back(e.slope);
    plan.edge_origin.push_back(e.origin);
  }
  for (std::size_t l = 0; l < g.legs.size(); ++l) {
    plan.result.graph.legs.push_back({g.legs[l].id, new_index[g.legs[l].v]});
    plan.result.leg_slopes.push_back(t.leg_slopes[l]);
  }
  if (!is_stable(plan.result.graph))
    throw Error(ErrorCode::Unstabilizable, "no stable model: pruning and smoothing leave an unstable vertex");
  return plan;
}

/// Orientation of each merged piece relative to the merged edge does not
/// matter for lengths, which simply add.
inline ParameterizedTropicalCurve stabilize(const ParameterizedTropicalCurve& p) {
  auto plan = stabilization_plan(p.type);
  ParameterizedTropicalCurve out{plan.result, {}, {}};
  for (const auto& pieces : plan.edge_origin) {
    Rat len = 0;
    for (auto e : pieces) len += p.lengths[e];
    out.lengths.push_back(len);
  }
  for (auto v : plan.vertex_origin) out.positions.push_back(p.positions[v]);
  return out;
}

}  // namespace tropmoduli
