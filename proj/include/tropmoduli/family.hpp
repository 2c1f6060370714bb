#pragma once

// Families of parameterized tropical curves over a polyhedral complex:
// validation, fibers, the induced map to the moduli space, verdicts at
// walls and closure propagation through wall graphs.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tropmoduli/error.hpp"
#include "tropmoduli/exact_linalg.hpp"
#include "tropmoduli/moduli.hpp"
#include "tropmoduli/parallel.hpp"
#include "tropmoduli/polyhedral.hpp"
#include "tropmoduli/report.hpp"
#include "tropmoduli/tropcurve.hpp"

namespace tropmoduli {

/// Integral affine function on a face chart: q -> <linear, q> + offset.
struct LengthFunction {
  IntVector linear;
  Rat offset;

  Rat operator()(const RatVector& q) const { return dot(linear, q) + offset; }
  bool operator==(const LengthFunction& o) const { return linear == o.linear && offset == o.offset; }
};

struct FamilyFace {
  std::string face;
  CombinatorialType type;
  std::map<std::string, LengthFunction> lengths;  // edge id -> l_W(edge, .)
  std::map<std::string, AffineMap> positions;     // vertex id -> h_W(vertex, .)
};

/// Weighted contraction from the graph over `super` to the graph over `sub`.
/// A null edge image means the edge is contracted.
struct FamilyContraction {
  std::string sub;
  std::string super;
  std::map<std::string, std::string> vertex_map;
  std::map<std::string, std::optional<std::string>> edge_map;
};

struct FamilyDatum {
  PolyhedralComplex base;
  std::vector<IntVector> extended_degree;
  std::vector<FamilyFace> faces;
  std::vector<FamilyContraction> contractions;

  const FamilyFace* data_for(const std::string& face) const {
    for (const auto& f : faces)
      if (f.face == face) return &f;
    return nullptr;
  }
  const FamilyContraction* contraction_for(const std::string& sub, const std::string& super) const {
    for (const auto& c : contractions)
      if (c.sub == sub && c.super == super) return &c;
    return nullptr;
  }
};

namespace detail {

/// Evaluates the fiber data of one face at chart coordinates q.
inline ParameterizedTropicalCurve evaluate_face(const FamilyFace& ff, const RatVector& q) {
  ParameterizedTropicalCurve p{ff.type, {}, {}};
  for (const auto& e : ff.type.graph.edges) p.lengths.push_back(ff.lengths.at(e.id)(q));
  for (const auto& v : ff.type.graph.vertices) p.positions.push_back(ff.positions.at(v.id)(q));
  return p;
}

inline std::string point_string(const RatVector& q) {
  std::string s = "(";
  for (std::size_t i = 0; i < q.size(); ++i) s += (i ? "," : "") + to_string(q[i]);
  return s + ")";
}

/// Data completeness and shapes; rule "FAMILY-DATA".
inline bool check_face_data(const FamilyDatum& f, const Face& face, const FamilyFace& ff, ValidationReport& r) {
  bool ok = true;
  auto s = check_structure(ff.type);
  for (const auto& v : s.violations) r.add("FAMILY(1)", face.id + "/" + v.where, v.detail);
  if (!s.ok()) return false;
  if (ff.type.leg_slopes != f.extended_degree) {
    r.add("DEGREE", face.id, "extended degree of the type differs from the family's");
  }
  for (const auto& e : ff.type.graph.edges) {
    auto it = ff.lengths.find(e.id);
    if (it == ff.lengths.end()) {
      r.add("FAMILY-DATA", face.id + "/" + e.id, "no length function");
      ok = false;
    } else if (it->second.linear.size() != face.lattice_rank) {
      r.add("FAMILY-DATA", face.id + "/" + e.id, "length function has the wrong number of coefficients");
      ok = false;
    }
  }
  for (const auto& v : ff.type.graph.vertices) {
    auto it = ff.positions.find(v.id);
    if (it == ff.positions.end()) {
      r.add("FAMILY-DATA", face.id + "/" + v.id, "no position function");
      ok = false;
    } else if (it->second.source_dim() != face.lattice_rank || it->second.target_dim() != ff.type.lattice_dim ||
               it->second.offset.size() != ff.type.lattice_dim) {
      r.add("FAMILY-DATA", face.id + "/" + v.id, "position function has the wrong shape");
      ok = false;
    }
  }
  for (const auto& [id, fn] : ff.lengths)
    if (!ff.type.graph.edge_index(id)) r.add("FAMILY-DATA", face.id + "/" + id, "length for an unknown edge");
  for (const auto& [id, fn] : ff.positions)
    if (!ff.type.graph.vertex_index(id)) r.add("FAMILY-DATA", face.id + "/" + id, "position for an unknown vertex");
  return ok;
}

/// Condition (1): balanced type, nonnegative lengths on the closed face,
/// positive on its interior, and the edge relation everywhere.
inline void check_condition_one(const Face& face, const FamilyFace& ff, ValidationReport& r) {
  for (const auto& v : check_balanced(ff.type).violations) r.add("FAMILY(1)", face.id + "/" + v.where, v.detail);
  const auto& g = face.chart.vrep();
  auto interior = face.chart.interior_point();
  for (const auto& e : ff.type.graph.edges) {
    const auto& len = ff.lengths.at(e.id);
    for (const auto& p : g.points)
      if (len(p) < 0)
        r.add("FAMILY(1)", face.id + "/" + e.id, "length " + to_string(len(p)) + " at " + point_string(p));
    for (const auto& ray : g.rays)
      if (dot(len.linear, ray) < 0)
        r.add("FAMILY(1)", face.id + "/" + e.id, "length decreases along ray " + point_string(ray));
    for (const auto& line : g.lines)
      if (dot(len.linear, line) != 0)
        r.add("FAMILY(1)", face.id + "/" + e.id, "length is not constant along line " + point_string(line));
    if (len(interior) <= 0)
      r.add("FAMILY(1)", face.id + "/" + e.id,
            "length " + to_string(len(interior)) + " at interior point " + point_string(interior));
  }
  for (const auto& q : face.chart.generating_points()) {
    auto p = evaluate_face(ff, q);
    for (std::size_t e = 0; e < ff.type.graph.edges.size(); ++e) {
      const auto& ed = ff.type.graph.edges[e];
      auto gap = p.positions[ed.v] - p.positions[ed.u] - scaled(ff.type.edge_slopes[e], p.lengths[e]);
      if (!is_zero(gap))
        r.add("FAMILY(1)", face.id + "/" + ed.id, "edge relation fails at " + point_string(q));
    }
  }
}

/// Structural checks on a weighted contraction; rule "CONTRACTION".
inline bool check_contraction(const FamilyContraction& c, const CombinatorialType& super,
                              const CombinatorialType& sub, ValidationReport& r) {
  const std::string where = c.sub + "<-" + c.super;
  const auto& gs = super.graph;
  const auto& gt = sub.graph;
  bool ok = true;
  auto fail = [&](const std::string& detail) {
    r.add("CONTRACTION", where, detail);
    ok = false;
  };
  std::vector<std::size_t> vmap(gs.vertices.size(), 0);
  std::vector<bool> hit(gt.vertices.size(), false);
  for (std::size_t v = 0; v < gs.vertices.size(); ++v) {
    auto it = c.vertex_map.find(gs.vertices[v].id);
    if (it == c.vertex_map.end()) {
      fail("vertex '" + gs.vertices[v].id + "' has no image");
      continue;
    }
    auto w = gt.vertex_index(it->second);
    if (!w) {
      fail("vertex '" + gs.vertices[v].id + "' maps to unknown vertex '" + it->second + "'");
      continue;
    }
    vmap[v] = *w;
    hit[*w] = true;
  }
  if (!ok) return false;
  for (std::size_t w = 0; w < gt.vertices.size(); ++w)
    if (!hit[w]) fail("vertex '" + gt.vertices[w].id + "' is not hit");

  std::vector<std::optional<std::size_t>> emap(gs.edges.size());
  std::vector<int> edge_hits(gt.edges.size(), 0);
  for (std::size_t e = 0; e < gs.edges.size(); ++e) {
    const auto& ed = gs.edges[e];
    auto it = c.edge_map.find(ed.id);
    if (it == c.edge_map.end()) {
      fail("edge '" + ed.id + "' has no image");
      continue;
    }
    if (!it->second) {
      if (vmap[ed.u] != vmap[ed.v]) fail("contracted edge '" + ed.id + "' has endpoints with different images");
      continue;
    }
    auto f = gt.edge_index(*it->second);
    if (!f) {
      fail("edge '" + ed.id + "' maps to unknown edge '" + *it->second + "'");
      continue;
    }
    emap[e] = *f;
    ++edge_hits[*f];
    const auto& fd = gt.edges[*f];
    std::size_t a = vmap[ed.u], b = vmap[ed.v];
    bool match;
    if (a == b)
      match = fd.is_loop() && fd.u == a && detail::loop_normal(super.edge_slopes[e]) == detail::loop_normal(sub.edge_slopes[*f]);
    else if (fd.u == a && fd.v == b)
      match = super.edge_slopes[e] == sub.edge_slopes[*f];
    else if (fd.u == b && fd.v == a)
      match = super.edge_slopes[e] == IntVector(-sub.edge_slopes[*f]);
    else
      match = false;
    if (!match) fail("edge '" + ed.id + "' does not map onto '" + fd.id + "' with matching endpoints and slope");
  }
  for (std::size_t f = 0; f < gt.edges.size(); ++f)
    if (edge_hits[f] != 1)
      fail("edge '" + gt.edges[f].id + "' is the image of " + std::to_string(edge_hits[f]) + " edges");
  if (!ok) return false;

  // weights: each fiber is connected through contracted edges and carries
  // the weight sum plus its first Betti number
  for (std::size_t w = 0; w < gt.vertices.size(); ++w) {
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < gs.vertices.size(); ++v)
      if (vmap[v] == w) members.push_back(v);
    int weight = 0, contracted = 0;
    for (auto v : members) weight += gs.vertices[v].weight;
    std::map<std::size_t, std::size_t> parent;
    for (auto v : members) parent[v] = v;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t e = 0; e < gs.edges.size(); ++e)
      if (!emap[e] && vmap[gs.edges[e].u] == w) {
        ++contracted;
        parent[find(gs.edges[e].u)] = find(gs.edges[e].v);
      }
    std::set<std::size_t> roots;
    for (auto v : members) roots.insert(find(v));
    if (roots.size() != 1) {
      fail("preimage of vertex '" + gt.vertices[w].id + "' is not connected by contracted edges");
      continue;
    }
    int expected = weight + contracted - static_cast<int>(members.size()) + 1;
    if (gt.vertices[w].weight != expected)
      fail("vertex '" + gt.vertices[w].id + "' has weight " + std::to_string(gt.vertices[w].weight) + ", expected " +
           std::to_string(expected));
  }
  if (gs.legs.size() != gt.legs.size()) {
    fail("leg counts differ");
  } else {
    for (std::size_t l = 0; l < gs.legs.size(); ++l)
      if (vmap[gs.legs[l].v] != gt.legs[l].v) fail("leg " + std::to_string(l) + " is not carried along the contraction");
  }
  return ok;
}

}  // namespace detail

inline ValidationReport validate_family(const FamilyDatum& f) {
  ValidationReport r;
  auto base = validate_complex(f.base);
  r.merge(base, "BASE:");
  if (!base.ok()) return r;

  std::map<std::string, const FamilyFace*> data;
  for (const auto& ff : f.faces) {
    if (!f.base.find(ff.face)) r.add("FAMILY-DATA", ff.face, "data for an unknown face");
    else if (!data.emplace(ff.face, &ff).second) r.add("FAMILY-DATA", ff.face, "face has two data entries");
  }
  std::set<std::string> good;
  for (const auto& face : f.base.faces) {
    auto it = data.find(face.id);
    if (it == data.end()) {
      r.add("FAMILY-DATA", face.id, "no fiber data over this face");
      continue;
    }
    if (!detail::check_face_data(f, face, *it->second, r)) continue;
    detail::check_condition_one(face, *it->second, r);
    good.insert(face.id);
  }

  for (const auto& inc : f.base.inclusions) {
    const std::string where = inc.sub + "<-" + inc.super;
    const auto* c = f.contraction_for(inc.sub, inc.super);
    if (!c) {
      r.add("CONTRACTION", where, "no weighted contraction for this inclusion");
      continue;
    }
    if (!good.count(inc.sub) || !good.count(inc.super)) continue;
    const auto& sub = *data.at(inc.sub);
    const auto& super = *data.at(inc.super);
    if (!detail::check_contraction(*c, super.type, sub.type, r)) continue;

    const auto& sub_face = f.base.face(inc.sub);
    auto points = sub_face.chart.generating_points();
    for (const auto& e : super.type.graph.edges) {
      const auto& len = super.lengths.at(e.id);
      const auto& image = c->edge_map.at(e.id);
      bool vanishes = true;
      for (const auto& q : points) {
        Rat value = len(inc.embed(q));
        if (value != 0) vanishes = false;
        if (image && sub.lengths.at(*image)(q) != value)
          r.add("FAMILY(2)", where + "/" + e.id, "lengths differ at " + detail::point_string(q));
        if (!image && value != 0)
          r.add("ZERO-LOCUS", where + "/" + e.id,
                "contracted edge has length " + to_string(value) + " at " + detail::point_string(q));
      }
      if (image && vanishes) r.add("ZERO-LOCUS", where + "/" + e.id, "length vanishes on the subface but the edge is kept");
    }
    for (const auto& v : super.type.graph.vertices) {
      const auto& pos = super.positions.at(v.id);
      const auto& image = sub.positions.at(c->vertex_map.at(v.id));
      for (const auto& q : points)
        if (pos(inc.embed(q)) != image(q))
          r.add("FAMILY(3)", where + "/" + v.id, "positions differ at " + detail::point_string(q));
    }
  }
  for (const auto& c : f.contractions) {
    bool listed = std::any_of(f.base.inclusions.begin(), f.base.inclusions.end(),
                              [&](const FaceInclusion& inc) { return inc.sub == c.sub && inc.super == c.super; });
    if (!listed) r.add("CONTRACTION", c.sub + "<-" + c.super, "contraction for a pair that is not an inclusion");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Fibers

struct FiberResult {
  std::string face;  // face whose interior contains the point
  RatVector coords;  // in that face's chart
  ParameterizedTropicalCurve curve;
};

/// The fiber over the point with chart coordinates q in face `face`. Points
/// on the boundary are moved to the subface whose relative interior
/// contains them.
inline FiberResult fiber(const FamilyDatum& f, const std::string& face, const RatVector& q) {
  auto fi = f.base.find(face);
  if (!fi) throw Error(ErrorCode::UnknownFace, "no face '" + face + "'");
  const auto& chart = f.base.faces[*fi].chart;
  if (q.size() != chart.ambient_dim() || !chart.contains(q))
    throw Error(ErrorCode::PointNotInComplex, detail::point_string(q) + " is not in face '" + face + "'");
  std::string where = face;
  RatVector coords = q;
  if (!chart.interior_contains(q)) {
    auto idx = index_complex(f.base);
    std::optional<std::size_t> best;
    for (auto s : idx.subfaces_of(*fi)) {
      auto x = preimage(*idx.embed(s, *fi), q);
      if (!x || !f.base.faces[s].chart.interior_contains(*x)) continue;
      if (!best || f.base.faces[s].lattice_rank < f.base.faces[*best].lattice_rank) {
        best = s;
        coords = *x;
      }
    }
    if (!best)
      throw Error(ErrorCode::PointNotInComplex, detail::point_string(q) + " lies on no face interior of '" + face + "'");
    where = f.base.faces[*best].id;
  }
  const auto* ff = f.data_for(where);
  if (!ff) throw Error(ErrorCode::InvalidFamily, "no fiber data over face '" + where + "'");
  return {where, coords, detail::evaluate_face(*ff, coords)};
}

// ---------------------------------------------------------------------------
// The induced map to the moduli space

/// Over one face: the stabilized type (canonical representative) and the
/// integral affine lift of the chart into its stratum coordinates
/// (canonical edge lengths, then canonical vertex positions).
struct FaceLift {
  std::string face;
  CombinatorialType type;
  std::string canonical;
  AffineMap lift;
};

struct InducedMap {
  std::vector<FaceLift> faces;

  const FaceLift& on(const std::string& face) const {
    for (const auto& l : faces)
      if (l.face == face) return l;
    throw Error(ErrorCode::UnknownFace, "no lift over face '" + face + "'");
  }
};

inline FaceLift lift_face(const Face& face, const FamilyFace& ff) {
  auto plan = stabilization_plan(ff.type);
  auto lab = canonical_labeling(plan.result);
  FaceLift out{face.id, canonical_type(plan.result), lab.text, {}};
  const std::size_t n = ff.type.lattice_dim;
  const std::size_t ne = lab.edge_order.size(), nv = lab.vertex_order.size();
  out.lift = {IntMatrix(ne + n * nv, face.lattice_rank), RatVector(ne + n * nv, Rat(0))};
  for (std::size_t i = 0; i < ne; ++i)
    for (auto piece : plan.edge_origin[lab.edge_order[i]]) {
      const auto& len = ff.lengths.at(ff.type.graph.edges[piece].id);
      for (std::size_t j = 0; j < face.lattice_rank; ++j) out.lift.linear(i, j) += len.linear[j];
      out.lift.offset[i] += len.offset;
    }
  for (std::size_t i = 0; i < nv; ++i) {
    auto v = plan.vertex_origin[lab.vertex_order[i]];
    const auto& pos = ff.positions.at(ff.type.graph.vertices[v].id);
    for (std::size_t k = 0; k < n; ++k) {
      auto row = ne + i * n + k;
      for (std::size_t j = 0; j < face.lattice_rank; ++j) out.lift.linear(row, j) = pos.linear(k, j);
      out.lift.offset[row] = pos.offset[k];
    }
  }
  return out;
}

inline InducedMap induced_alpha(const FamilyDatum& f, unsigned threads = 0) {
  auto report = validate_family(f);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::InvalidFamily, v.rule + " violated at " + v.where + ": " + v.detail);
  }
  InducedMap m;
  m.faces.resize(f.base.faces.size());
  parallel_for(f.base.faces.size(), threads, [&](std::size_t i) {
    const auto& face = f.base.faces[i];
    try {
      m.faces[i] = lift_face(face, *f.data_for(face.id));
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidFamily, "face '" + face.id + "': " + e.what());
    }
  });
  return m;
}

/// Moves lift coordinates along an automorphism of the target type.
inline AffineMap permute_lift(const AffineMap& lift, const TypeIso& g, std::size_t lattice_dim) {
  const std::size_t ne = g.edge_map.size();
  AffineMap out{IntMatrix(lift.target_dim(), lift.source_dim()), RatVector(lift.target_dim(), Rat(0))};
  auto copy_row = [&](std::size_t from, std::size_t to) {
    for (std::size_t j = 0; j < lift.source_dim(); ++j) out.linear(to, j) = lift.linear(from, j);
    out.offset[to] = lift.offset[from];
  };
  for (std::size_t e = 0; e < ne; ++e) copy_row(e, g.edge_map[e]);
  for (std::size_t v = 0; v < g.vertex_map.size(); ++v)
    for (std::size_t k = 0; k < lattice_dim; ++k) copy_row(ne + v * lattice_dim + k, ne + g.vertex_map[v] * lattice_dim + k);
  return out;
}

/// The super-face lift, moved by some automorphism, restricts to the
/// sub-face lift; nothing when no automorphism makes them agree.
inline std::optional<AffineMap> aligned_lift(const FaceLift& sub, const FaceLift& super, const AffineMap& embed) {
  if (sub.canonical != super.canonical) return std::nullopt;
  for (const auto& g : automorphisms(super.type)) {
    auto moved = permute_lift(super.lift, g, super.type.lattice_dim);
    if (compose(moved, embed) == sub.lift) return moved;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Verdicts at walls

enum class VerdictKind { Harmonic, QuasiHarmonic, LocallyCombinatoriallySurjective, Inconclusive };

constexpr const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Harmonic: return "Harmonic";
    case VerdictKind::QuasiHarmonic: return "QuasiHarmonic";
    case VerdictKind::LocallyCombinatoriallySurjective: return "LocallyCombinatoriallySurjective";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct WallVerdict {
  std::string face;
  VerdictKind verdict = VerdictKind::Inconclusive;
  std::string reason;
  std::string wall_type;  // canonical string of the type over the face
  // harmonicity certificate
  std::vector<std::string> cofacets;
  std::vector<RatVector> derivatives;
  std::optional<IntVector> coefficients;
  std::vector<RatVector> image_span;  // basis of Lin of the image of the face
  // surjectivity certificate: resolution canonical string -> witnessing cofacet
  std::vector<std::pair<std::string, std::string>> witnesses;
  std::vector<std::string> uncovered;
};

inline WallVerdict wall_verdict(const FamilyDatum& f, const InducedMap& alpha, const std::string& w) {
  auto wi = f.base.find(w);
  if (!wi) throw Error(ErrorCode::UnknownFace, "no face '" + w + "'");
  auto idx = index_complex(f.base);
  auto st = star(f.base, idx, w);
  const auto& wall = alpha.on(w);
  WallVerdict out;
  out.face = w;
  out.wall_type = wall.canonical;
  if (st.directions.empty()) {
    out.reason = "face has no codimension-one cofacets";
    return out;
  }

  bool same = std::all_of(st.directions.begin(), st.directions.end(),
                          [&](const StarDirection& d) { return alpha.on(d.cofacet).canonical == wall.canonical; });
  if (same) {
    PIAMap local;
    local.target_dim = wall.lift.target_dim();
    local.source.faces.push_back(f.base.faces[*wi]);
    local.per_face[w] = wall.lift;
    for (const auto& d : st.directions) {
      auto co = f.base.find(d.cofacet);
      const auto& embed = *idx.embed(*wi, *co);
      auto moved = aligned_lift(wall, alpha.on(d.cofacet), embed);
      if (!moved) {
        out.reason = "lift over cofacet '" + d.cofacet + "' does not restrict to the lift over the face";
        return out;
      }
      local.source.faces.push_back(f.base.faces[*co]);
      local.source.inclusions.push_back({w, d.cofacet, embed});
      local.per_face[d.cofacet] = *moved;
    }
    auto h = harmonicity_at(local, w);
    out.cofacets = h.cofacets;
    out.derivatives = h.derivatives;
    out.coefficients = h.coefficients;
    out.image_span = h.image_span.basis();
    switch (h.verdict) {
      case Harmonicity::Harmonic:
        out.verdict = VerdictKind::Harmonic;
        out.reason = "derivatives sum into the span of the image";
        break;
      case Harmonicity::QuasiHarmonicOnly:
        out.verdict = VerdictKind::QuasiHarmonic;
        out.reason = "a positive integer combination of derivatives lies in the span of the image";
        break;
      case Harmonicity::NotQuasiHarmonic:
        out.reason = "no positive combination of derivatives lies in the span of the image";
        break;
    }
    return out;
  }

  auto cls = classify(wall.type);
  if (cls.kind != WallKind::WeightlessAlmost3Valent) {
    out.reason = "cofacet types differ and the type over the face is not weightless almost 3-valent";
    return out;
  }
  std::vector<std::string> required;
  std::set<std::string> allowed{wall.canonical};
  for (const auto& r : resolve_4valent(wall.type, *cls.four_valent_vertex)) {
    auto key = canonical_string(r);
    allowed.insert(key);
    if (positive_cycle_lengths(r)) required.push_back(key);
  }
  for (const auto& d : st.directions)
    if (!allowed.count(alpha.on(d.cofacet).canonical)) {
      out.reason = "cofacet '" + d.cofacet + "' maps to a type that is neither the wall nor one of its resolutions";
      return out;
    }
  for (const auto& key : required) {
    auto it = std::find_if(st.directions.begin(), st.directions.end(),
                           [&](const StarDirection& d) { return alpha.on(d.cofacet).canonical == key; });
    if (it == st.directions.end())
      out.uncovered.push_back(key);
    else
      out.witnesses.push_back({key, it->cofacet});
  }
  if (out.uncovered.empty()) {
    out.verdict = VerdictKind::LocallyCombinatoriallySurjective;
    out.reason = "every resolution of the wall is attained by a cofacet";
  } else {
    out.reason = std::to_string(out.uncovered.size()) + " resolution(s) of the wall are not attained";
  }
  return out;
}

/// Re-checks a verdict's certificate by substitution.
inline bool verify_verdict(const FamilyDatum& f, const InducedMap& alpha, const WallVerdict& v) {
  switch (v.verdict) {
    case VerdictKind::Harmonic:
    case VerdictKind::QuasiHarmonic: {
      if (!v.coefficients || v.coefficients->size() != v.derivatives.size() || v.derivatives.empty()) return false;
      if (v.verdict == VerdictKind::Harmonic &&
          std::any_of(v.coefficients->begin(), v.coefficients->end(), [](const Int& a) { return a != 1; }))
        return false;
      const std::size_t dim = v.derivatives.front().size();
      RatVector sum(dim, Rat(0));
      for (std::size_t i = 0; i < v.derivatives.size(); ++i) {
        if ((*v.coefficients)[i] <= 0) return false;
        sum = sum + scaled(v.derivatives[i], Rat((*v.coefficients)[i]));
      }
      return span_membership(sum, Subspace::span(dim, v.image_span));
    }
    case VerdictKind::LocallyCombinatoriallySurjective: {
      if (!v.uncovered.empty()) return false;
      const auto& wall = alpha.on(v.face);
      auto cls = classify(wall.type);
      if (cls.kind != WallKind::WeightlessAlmost3Valent) return false;
      std::set<std::string> witnessed;
      for (const auto& [key, cofacet] : v.witnesses) {
        if (alpha.on(cofacet).canonical != key) return false;
        if (!f.base.find(cofacet)) return false;
        witnessed.insert(key);
      }
      for (const auto& r : resolve_4valent(wall.type, *cls.four_valent_vertex))
        if (positive_cycle_lengths(r) && !witnessed.count(canonical_string(r))) return false;
      return true;
    }
    case VerdictKind::Inconclusive:
      return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Image strata

struct ImageStratum {
  std::string canonical;
  CombinatorialType type;
  std::size_t image_dim = 0;  // max rank of a lift onto this stratum
  int stratum_dim = -1;
  bool full_dimensional = false;
  std::vector<std::string> faces;
};

inline std::vector<ImageStratum> image_strata(const InducedMap& alpha) {
  std::map<std::string, ImageStratum> groups;
  for (const auto& l : alpha.faces) {
    auto [it, inserted] = groups.try_emplace(l.canonical);
    auto& g = it->second;
    if (inserted) {
      g.canonical = l.canonical;
      g.type = l.type;
      g.stratum_dim = dim_stratum(l.type).value_or(-1);
    }
    g.image_dim = std::max(g.image_dim, rank(l.lift.linear));
    g.faces.push_back(l.face);
  }
  std::vector<ImageStratum> out;
  for (auto& [k, g] : groups) {
    g.full_dimensional = static_cast<int>(g.image_dim) == g.stratum_dim;
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Propagation through walls

struct PropagationStep {
  std::string wall;
  std::string trigger;             // node already in the set
  std::vector<std::string> added;  // nodes added through the wall
};

struct PropagationResult {
  std::vector<std::string> nodes;  // in node order
  std::vector<PropagationStep> trace;
};

/// Closes the seed set under: a wall touching the set brings in all of its
/// resolutions. Walls are scanned in order until nothing changes.
inline PropagationResult propagate_closure(const WallGraph& wg, const std::vector<std::string>& seeds) {
  std::vector<bool> in(wg.nodes.size(), false);
  for (const auto& s : seeds) {
    auto i = wg.node_index(s);
    if (!i) throw Error(ErrorCode::SeedNotInGraph, "no node '" + s + "'");
    in[*i] = true;
  }
  PropagationResult out;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& wall : wg.walls) {
      auto trigger = std::find_if(wall.resolutions.begin(), wall.resolutions.end(), [&](std::size_t n) { return in[n]; });
      if (trigger == wall.resolutions.end()) continue;
      PropagationStep step{wall.id, wg.nodes[*trigger].id, {}};
      for (auto n : wall.resolutions)
        if (!in[n]) {
          in[n] = true;
          step.added.push_back(wg.nodes[n].id);
        }
      if (step.added.empty()) continue;
      out.trace.push_back(std::move(step));
      changed = true;
    }
  }
  for (std::size_t i = 0; i < wg.nodes.size(); ++i)
    if (in[i]) out.nodes.push_back(wg.nodes[i].id);
  return out;
}

}  // namespace tropmoduli
