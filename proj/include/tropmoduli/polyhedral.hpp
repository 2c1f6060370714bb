#pragma once

// Polyhedral complexes with integral structure, piecewise integral affine
// maps on them, Star(W) and (quasi-)harmonicity, and skeletons of strictly
// semistable pairs given combinatorially.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
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

// ---------------------------------------------------------------------------
// Polyhedra

/// <normal, x> >= offset (inequality) or <normal, x> == offset (equality).
struct LinearConstraint {
  IntVector normal;
  Rat offset;
};

/// Vertex/ray/line description. With lines present the "points" are one
/// representative per minimal face.
struct VRep {
  std::vector<RatVector> points;
  std::vector<RatVector> rays;
  std::vector<RatVector> lines;
};

namespace detail {

struct ConeGenerators {
  std::vector<RatVector> rays;
  std::vector<RatVector> lines;
};

inline RatVector normalized_ray(const RatVector& r) { return to_rat(clear_denominators(r)); }

inline void dedupe(std::vector<RatVector>& rays) {
  std::sort(rays.begin(), rays.end());
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
}

/// Double description of {x : eq . x = 0, ineq . x >= 0} in Q^dim. Starts from
/// the whole space as lineality and cuts one constraint at a time; adjacency
/// of rays is decided combinatorially on zero sets.
inline ConeGenerators double_description(std::size_t dim, const std::vector<RatVector>& equalities,
                                         const std::vector<RatVector>& inequalities) {
  ConeGenerators g;
  for (std::size_t i = 0; i < dim; ++i) {
    RatVector e(dim, Rat(0));
    e[i] = 1;
    g.lines.push_back(std::move(e));
  }
  std::vector<RatVector> processed;  // inequalities already intersected

  auto zero_set = [&](const RatVector& r) {
    std::vector<std::size_t> z;
    for (std::size_t i = 0; i < processed.size(); ++i)
      if (dot(processed[i], r) == 0) z.push_back(i);
    return z;
  };

  auto cut = [&](const RatVector& a, bool equality) {
    std::size_t pick = g.lines.size();
    for (std::size_t i = 0; i < g.lines.size(); ++i)
      if (dot(a, g.lines[i]) != 0) {
        pick = i;
        break;
      }

    if (pick != g.lines.size()) {
      RatVector l0 = g.lines[pick];
      Rat al0 = dot(a, l0);
      if (al0 < 0) {
        l0 = -l0;
        al0 = -al0;
      }
      g.lines.erase(g.lines.begin() + static_cast<std::ptrdiff_t>(pick));
      for (auto& l : g.lines) {
        Rat c = dot(a, l);
        if (c != 0) l = l - scaled(l0, c / al0);
      }
      for (auto& r : g.rays) {
        Rat c = dot(a, r);
        if (c != 0) r = normalized_ray(r - scaled(l0, c / al0));
      }
      if (!equality) g.rays.push_back(normalized_ray(l0));
    } else {
      std::vector<std::size_t> pos, neg;
      std::vector<RatVector> next;
      std::vector<Rat> value(g.rays.size());
      for (std::size_t i = 0; i < g.rays.size(); ++i) {
        value[i] = dot(a, g.rays[i]);
        if (value[i] > 0) {
          pos.push_back(i);
          if (!equality) next.push_back(g.rays[i]);
        } else if (value[i] < 0) {
          neg.push_back(i);
        } else {
          next.push_back(g.rays[i]);
        }
      }
      std::vector<std::vector<std::size_t>> zeros(g.rays.size());
      for (std::size_t i = 0; i < g.rays.size(); ++i) zeros[i] = zero_set(g.rays[i]);
      for (auto p : pos)
        for (auto n : neg) {
          std::vector<std::size_t> common;
          std::set_intersection(zeros[p].begin(), zeros[p].end(), zeros[n].begin(), zeros[n].end(),
                                std::back_inserter(common));
          bool adjacent = true;
          for (std::size_t r = 0; r < g.rays.size() && adjacent; ++r) {
            if (r == p || r == n) continue;
            if (std::includes(zeros[r].begin(), zeros[r].end(), common.begin(), common.end())) adjacent = false;
          }
          if (!adjacent) continue;
          next.push_back(normalized_ray(scaled(g.rays[n], value[p]) - scaled(g.rays[p], value[n])));
        }
      g.rays = std::move(next);
    }
    if (!equality) processed.push_back(a);
    dedupe(g.rays);
  };

  for (const auto& e : equalities) cut(e, true);
  for (const auto& a : inequalities) cut(a, false);
  return g;
}

struct VRepCache {
  std::once_flag once;
  VRep value;
};

}  // namespace detail

struct PolyhedronFace {
  std::vector<std::size_t> tight;  // inequalities tight on the whole face (closed set)
  VRep generators;
  int dim = -1;
};

class Polyhedron {
 public:
  Polyhedron() : Polyhedron(0, {}, {}) {}
  Polyhedron(std::size_t ambient_dim, std::vector<LinearConstraint> inequalities,
             std::vector<LinearConstraint> equalities = {})
      : ambient_dim_(ambient_dim),
        inequalities_(std::move(inequalities)),
        equalities_(std::move(equalities)),
        cache_(std::make_shared<detail::VRepCache>()) {
    for (const auto* list : {&inequalities_, &equalities_})
      for (const auto& c : *list)
        if (c.normal.size() != ambient_dim_)
          throw Error(ErrorCode::DimMismatch, "constraint normal of length " + std::to_string(c.normal.size()) +
                                                  " in R^" + std::to_string(ambient_dim_));
  }

  /// The closed orthant R^dim_{>=0}.
  static Polyhedron orthant(std::size_t dim) {
    std::vector<LinearConstraint> ineqs;
    for (std::size_t i = 0; i < dim; ++i) {
      IntVector n(dim, Int(0));
      n[i] = 1;
      ineqs.push_back({n, Rat(0)});
    }
    return Polyhedron(dim, std::move(ineqs));
  }

  /// Closed interval [lo, hi] in R^1.
  static Polyhedron interval(const Rat& lo, const Rat& hi) {
    return Polyhedron(1, {{IntVector{1}, lo}, {IntVector{-1}, -hi}});
  }

  std::size_t ambient_dim() const { return ambient_dim_; }
  const std::vector<LinearConstraint>& inequalities() const { return inequalities_; }
  const std::vector<LinearConstraint>& equalities() const { return equalities_; }

  bool contains(const RatVector& x) const {
    if (x.size() != ambient_dim_) throw Error(ErrorCode::DimMismatch, "point has wrong dimension");
    for (const auto& c : equalities_)
      if (dot(c.normal, x) != c.offset) return false;
    for (const auto& c : inequalities_)
      if (dot(c.normal, x) < c.offset) return false;
    return true;
  }

  /// Strict on every inequality. Only meaningful for full-dimensional charts.
  bool interior_contains(const RatVector& x) const {
    if (x.size() != ambient_dim_) throw Error(ErrorCode::DimMismatch, "point has wrong dimension");
    for (const auto& c : equalities_)
      if (dot(c.normal, x) != c.offset) return false;
    for (const auto& c : inequalities_)
      if (dot(c.normal, x) <= c.offset) return false;
    return true;
  }

  bool recedes_along(const RatVector& r) const {
    for (const auto& c : equalities_)
      if (dot(c.normal, r) != 0) return false;
    for (const auto& c : inequalities_)
      if (dot(c.normal, r) < 0) return false;
    return true;
  }

  bool contains_line(const RatVector& l) const { return recedes_along(l) && recedes_along(-l); }

  const VRep& vrep() const {
    std::call_once(cache_->once, [this] { cache_->value = compute_vrep(); });
    return cache_->value;
  }

  bool empty() const { return vrep().points.empty(); }

  /// Affine dimension; -1 for the empty set.
  int dimension() const { return generator_dimension(vrep()); }

  static int generator_dimension(const VRep& g) {
    if (g.points.empty()) return -1;
    if (g.points.front().empty()) return 0;
    std::vector<RatVector> dirs;
    for (std::size_t i = 1; i < g.points.size(); ++i) dirs.push_back(g.points[i] - g.points[0]);
    dirs.insert(dirs.end(), g.rays.begin(), g.rays.end());
    dirs.insert(dirs.end(), g.lines.begin(), g.lines.end());
    return static_cast<int>(rank_of(g.points.front().size(), dirs));
  }

  /// A point of the relative interior.
  RatVector interior_point() const {
    const auto& g = vrep();
    if (g.points.empty()) throw Error(ErrorCode::InvalidArgument, "interior point of an empty polyhedron");
    RatVector p(ambient_dim_, Rat(0));
    for (const auto& v : g.points) p = p + v;
    p = scaled(p, Rat(1, static_cast<long>(g.points.size())));
    for (const auto& r : g.rays) p = p + r;
    return p;
  }

  /// Points on which an affine function is determined and whose values
  /// certify nonnegativity: minimal-face points, point + ray, point +/- line,
  /// and an interior point.
  std::vector<RatVector> generating_points() const {
    const auto& g = vrep();
    std::vector<RatVector> pts = g.points;
    if (g.points.empty()) return pts;
    for (const auto& r : g.rays) pts.push_back(g.points.front() + r);
    for (const auto& l : g.lines) {
      pts.push_back(g.points.front() + l);
      pts.push_back(g.points.front() - l);
    }
    auto inside = interior_point();
    if (std::find(pts.begin(), pts.end(), inside) == pts.end()) pts.push_back(std::move(inside));
    return pts;
  }

  /// Every nonempty face, the polyhedron itself included (first entry).
  std::vector<PolyhedronFace> faces() const {
    const auto& g = vrep();
    std::vector<PolyhedronFace> out;
    if (g.points.empty()) return out;

    auto restrict_to = [&](const VRep& from, std::size_t i) {
      const auto& c = inequalities_[i];
      VRep to;
      for (const auto& p : from.points)
        if (dot(c.normal, p) == c.offset) to.points.push_back(p);
      for (const auto& r : from.rays)
        if (dot(c.normal, r) == 0) to.rays.push_back(r);
      to.lines = from.lines;
      return to;
    };
    auto closure = [&](const VRep& gen) {
      std::vector<std::size_t> tight;
      for (std::size_t i = 0; i < inequalities_.size(); ++i) {
        const auto& c = inequalities_[i];
        bool all = std::all_of(gen.points.begin(), gen.points.end(),
                               [&](const RatVector& p) { return dot(c.normal, p) == c.offset; }) &&
                   std::all_of(gen.rays.begin(), gen.rays.end(),
                               [&](const RatVector& r) { return dot(c.normal, r) == 0; });
        if (all) tight.push_back(i);
      }
      return tight;
    };

    std::set<std::vector<std::size_t>> seen;
    std::deque<std::size_t> queue;
    PolyhedronFace whole{closure(g), g, generator_dimension(g)};
    seen.insert(whole.tight);
    out.push_back(whole);
    queue.push_back(0);
    while (!queue.empty()) {
      std::size_t f = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < inequalities_.size(); ++i) {
        if (std::binary_search(out[f].tight.begin(), out[f].tight.end(), i)) continue;
        VRep sub = restrict_to(out[f].generators, i);
        if (sub.points.empty()) continue;
        auto tight = closure(sub);
        if (!seen.insert(tight).second) continue;
        // regenerate from the full set so the face keeps all its generators
        VRep gen;
        for (const auto& p : g.points)
          if (std::all_of(tight.begin(), tight.end(), [&](std::size_t j) {
                return dot(inequalities_[j].normal, p) == inequalities_[j].offset;
              }))
            gen.points.push_back(p);
        for (const auto& r : g.rays)
          if (std::all_of(tight.begin(), tight.end(),
                          [&](std::size_t j) { return dot(inequalities_[j].normal, r) == 0; }))
            gen.rays.push_back(r);
        gen.lines = g.lines;
        int d = generator_dimension(gen);
        out.push_back({std::move(tight), std::move(gen), d});
        queue.push_back(out.size() - 1);
      }
    }
    return out;
  }

 private:
  VRep compute_vrep() const {
    const std::size_t d = ambient_dim_ + 1;
    auto homogenize = [&](const LinearConstraint& c) {
      RatVector row(d);
      for (std::size_t i = 0; i < ambient_dim_; ++i) row[i] = c.normal[i];
      row[ambient_dim_] = -c.offset;
      return row;
    };
    std::vector<RatVector> eqs, ineqs;
    for (const auto& c : equalities_) eqs.push_back(homogenize(c));
    RatVector t_nonneg(d, Rat(0));
    t_nonneg[ambient_dim_] = 1;
    ineqs.push_back(t_nonneg);
    for (const auto& c : inequalities_) ineqs.push_back(homogenize(c));

    auto cone = detail::double_description(d, eqs, ineqs);
    VRep out;
    for (const auto& r : cone.rays) {
      RatVector x(r.begin(), r.end() - 1);
      const Rat& t = r.back();
      if (t > 0)
        out.points.push_back(scaled(x, 1 / t));
      else
        out.rays.push_back(detail::normalized_ray(x));
    }
    for (const auto& l : cone.lines) out.lines.emplace_back(l.begin(), l.end() - 1);
    std::sort(out.points.begin(), out.points.end());
    detail::dedupe(out.rays);
    return out;
  }

  std::size_t ambient_dim_;
  std::vector<LinearConstraint> inequalities_;
  std::vector<LinearConstraint> equalities_;
  std::shared_ptr<detail::VRepCache> cache_;
};

// ---------------------------------------------------------------------------
// Integral affine maps

/// x -> linear * x + offset with an integral linear part.
struct AffineMap {
  IntMatrix linear;
  RatVector offset;

  static AffineMap identity(std::size_t dim) { return {IntMatrix::identity(dim), RatVector(dim, Rat(0))}; }
  static AffineMap constant(std::size_t source_dim, RatVector value) {
    return {IntMatrix(value.size(), source_dim), std::move(value)};
  }

  std::size_t source_dim() const { return linear.cols(); }
  std::size_t target_dim() const { return linear.rows(); }

  RatVector operator()(const RatVector& x) const { return linear * x + offset; }
  RatVector apply_linear(const RatVector& x) const { return linear * x; }

  bool operator==(const AffineMap& o) const { return linear == o.linear && offset == o.offset; }
};

/// outer o inner
inline AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  if (outer.source_dim() != inner.target_dim())
    throw Error(ErrorCode::DimMismatch, "composing affine maps of incompatible dimensions");
  return {outer.linear * inner.linear, outer.linear * inner.offset + outer.offset};
}

/// Preimage of y under an injective affine map, if any.
inline std::optional<RatVector> preimage(const AffineMap& m, const RatVector& y) {
  return solve(to_rat(m.linear), y - m.offset);
}

// ---------------------------------------------------------------------------
// Abstract polyhedral complexes

struct Face {
  std::string id;
  std::size_t lattice_rank = 0;
  Polyhedron chart;  // in R^lattice_rank, image of mu_W
  std::string label;
};

/// sub is a face of super; embed maps sub's chart coordinates into super's.
struct FaceInclusion {
  std::string sub;
  std::string super;
  AffineMap embed;
};

struct PolyhedralComplex {
  std::vector<Face> faces;
  std::vector<FaceInclusion> inclusions;

  std::optional<std::size_t> find(const std::string& id) const {
    for (std::size_t i = 0; i < faces.size(); ++i)
      if (faces[i].id == id) return i;
    return std::nullopt;
  }

  const Face& face(const std::string& id) const {
    auto i = find(id);
    if (!i) throw Error(ErrorCode::UnknownFace, "no face '" + id + "'");
    return faces[*i];
  }

  /// Faces that are not a proper face of anything.
  std::vector<std::string> maximal_faces() const {
    std::set<std::string> subs;
    for (const auto& inc : inclusions) subs.insert(inc.sub);
    std::vector<std::string> out;
    for (const auto& f : faces)
      if (!subs.count(f.id)) out.push_back(f.id);
    return out;
  }
};

/// Transitive closure of the inclusion relation with composed embeddings.
struct ComplexIndex {
  std::map<std::pair<std::size_t, std::size_t>, AffineMap> embeds;  // (sub, super) -> embed
  ValidationReport problems;  // malformed references, cycles, inconsistent compositions

  const AffineMap* embed(std::size_t sub, std::size_t super) const {
    auto it = embeds.find({sub, super});
    return it == embeds.end() ? nullptr : &it->second;
  }

  std::vector<std::size_t> subfaces_of(std::size_t super) const {
    std::vector<std::size_t> out;
    for (const auto& [key, m] : embeds)
      if (key.second == super) out.push_back(key.first);
    return out;
  }

  std::vector<std::size_t> superfaces_of(std::size_t sub) const {
    std::vector<std::size_t> out;
    for (const auto& [key, m] : embeds)
      if (key.first == sub) out.push_back(key.second);
    return out;
  }
};

inline ComplexIndex index_complex(const PolyhedralComplex& c) {
  ComplexIndex idx;
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < c.faces.size(); ++i)
    if (!by_id.emplace(c.faces[i].id, i).second) idx.problems.add("REFERENCE", c.faces[i].id, "duplicate face id");

  // direct[s] = list of (super, embed)
  std::vector<std::vector<std::pair<std::size_t, AffineMap>>> direct(c.faces.size());
  for (const auto& inc : c.inclusions) {
    auto s = by_id.find(inc.sub), t = by_id.find(inc.super);
    std::string where = inc.sub + "->" + inc.super;
    if (s == by_id.end() || t == by_id.end()) {
      idx.problems.add("REFERENCE", where, "inclusion names an unknown face");
      continue;
    }
    const auto& fs = c.faces[s->second];
    const auto& ft = c.faces[t->second];
    if (inc.embed.source_dim() != fs.lattice_rank || inc.embed.target_dim() != ft.lattice_rank ||
        inc.embed.offset.size() != ft.lattice_rank) {
      idx.problems.add("REFERENCE", where, "embedding has shape incompatible with the face ranks");
      continue;
    }
    if (fs.lattice_rank >= ft.lattice_rank) {
      idx.problems.add("AXIOM(4)", where, "sub face rank is not smaller than super face rank");
      continue;
    }
    direct[s->second].push_back({t->second, inc.embed});
  }

  // Ranks strictly increase along direct inclusions, so processing faces by
  // decreasing rank composes every path exactly once per start face.
  std::vector<std::size_t> order(c.faces.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return c.faces[a].lattice_rank > c.faces[b].lattice_rank;
  });
  for (auto s : order) {
    for (const auto& [t, m] : direct[s]) {
      auto record = [&](std::size_t target, const AffineMap& map, const std::string& via) {
        auto [it, inserted] = idx.embeds.emplace(std::make_pair(s, target), map);
        if (!inserted && !(it->second == map))
          idx.problems.add("AXIOM(4)", c.faces[s].id + "->" + c.faces[target].id,
                           "embeddings along different paths disagree (via " + via + ")");
      };
      record(t, m, "direct");
      std::vector<std::pair<std::size_t, AffineMap>> ups;
      for (const auto& [key, up] : idx.embeds)
        if (key.first == t) ups.push_back({key.second, up});
      for (const auto& [u, up] : ups) record(u, compose(up, m), c.faces[t].id);
    }
  }
  return idx;
}

namespace detail {

/// Index into `faces` of the face equal to the image of `sub` under `embed`,
/// or nothing when the image is not a face of the chart.
inline std::optional<std::size_t> image_face(const Polyhedron& sub, const AffineMap& embed, const Polyhedron& super,
                                             const std::vector<PolyhedronFace>& faces) {
  const auto& g = sub.vrep();
  VRep img;
  for (const auto& p : g.points) img.points.push_back(embed(p));
  for (const auto& r : g.rays) img.rays.push_back(embed.apply_linear(r));
  for (const auto& l : g.lines) img.lines.push_back(embed.apply_linear(l));
  for (const auto& p : img.points)
    if (!super.contains(p)) return std::nullopt;
  for (const auto& r : img.rays)
    if (!super.recedes_along(r)) return std::nullopt;
  for (const auto& l : img.lines)
    if (!super.contains_line(l)) return std::nullopt;

  std::vector<std::size_t> tight;
  for (std::size_t i = 0; i < super.inequalities().size(); ++i) {
    const auto& c = super.inequalities()[i];
    bool all = std::all_of(img.points.begin(), img.points.end(),
                           [&](const RatVector& p) { return dot(c.normal, p) == c.offset; }) &&
               std::all_of(img.rays.begin(), img.rays.end(),
                           [&](const RatVector& r) { return dot(c.normal, r) == 0; }) &&
               std::all_of(img.lines.begin(), img.lines.end(),
                           [&](const RatVector& l) { return dot(c.normal, l) == 0; });
    if (all) tight.push_back(i);
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].tight != tight) continue;
    // the smallest face containing the image must itself lie in the image
    for (const auto& p : faces[f].generators.points) {
      auto x = preimage(embed, p);
      if (!x || !sub.contains(*x)) return std::nullopt;
    }
    for (const auto& r : faces[f].generators.rays) {
      auto x = solve(to_rat(embed.linear), r);
      if (!x || !sub.recedes_along(*x)) return std::nullopt;
    }
    for (const auto& l : faces[f].generators.lines) {
      auto x = solve(to_rat(embed.linear), l);
      if (!x || !sub.contains_line(*x)) return std::nullopt;
    }
    return f;
  }
  return std::nullopt;
}

}  // namespace detail

/// Checks the axioms of a polyhedral complex with integral structure. The
/// cover axiom is checked combinatorially: every proper face of a chart must
/// be the image of exactly one subface.
inline ValidationReport validate_complex(const PolyhedralComplex& c) {
  ValidationReport report;
  if (c.faces.empty()) {
    report.add("CONNECTED", "complex", "complex has no faces");
    return report;
  }
  auto idx = index_complex(c);
  report.merge(idx.problems);

  std::vector<bool> chart_ok(c.faces.size(), false);
  for (std::size_t i = 0; i < c.faces.size(); ++i) {
    const auto& f = c.faces[i];
    if (f.chart.ambient_dim() != f.lattice_rank) {
      report.add("AXIOM(1)", f.id,
                 "chart lives in R^" + std::to_string(f.chart.ambient_dim()) + " but N_W has rank " +
                     std::to_string(f.lattice_rank));
      continue;
    }
    int d = f.chart.dimension();
    if (d < 0) {
      report.add("AXIOM(2)", f.id, "chart is empty");
      continue;
    }
    if (static_cast<std::size_t>(d) != f.lattice_rank) {
      report.add("AXIOM(2)", f.id,
                 "chart has dimension " + std::to_string(d) + " but rank is " + std::to_string(f.lattice_rank));
      continue;
    }
    chart_ok[i] = true;
  }

  for (const auto& [key, embed] : idx.embeds) {
    auto [s, t] = key;
    std::vector<IntVector> cols;
    for (std::size_t j = 0; j < embed.linear.cols(); ++j) cols.push_back(embed.linear.column(j));
    std::string where = "inclusion " + c.faces[s].id + "->" + c.faces[t].id;
    if (rank(embed.linear) != cols.size()) {
      report.add("AXIOM(5)", where, "linear part is not injective");
      continue;
    }
    if (!is_saturated(cols, embed.linear.rows()))
      report.add("AXIOM(5)", where,
                 "image of N_W' is not saturated (elementary divisors " +
                     to_string(elementary_divisors(embed.linear)) + ")");
  }

  for (std::size_t t = 0; t < c.faces.size(); ++t) {
    if (!chart_ok[t]) continue;
    const auto& super = c.faces[t];
    auto faces = super.chart.faces();
    std::vector<std::vector<std::string>> covered(faces.size());
    for (auto s : idx.subfaces_of(t)) {
      if (!chart_ok[s]) continue;
      const auto& embed = *idx.embed(s, t);
      if (rank(embed.linear) != embed.linear.cols()) continue;
      auto f = detail::image_face(c.faces[s].chart, embed, super.chart, faces);
      std::string where = "inclusion " + c.faces[s].id + "->" + super.id;
      if (!f) {
        report.add("AXIOM(3)", where, "image of the sub chart is not a face of the super chart");
        continue;
      }
      if (*f == 0) {
        report.add("AXIOM(3)", where, "image of the sub chart is the whole super chart");
        continue;
      }
      covered[*f].push_back(c.faces[s].id);
    }
    for (std::size_t f = 1; f < faces.size(); ++f) {
      if (covered[f].size() == 1) continue;
      std::string detail = "chart face of dimension " + std::to_string(faces[f].dim) + " (tight constraints";
      for (auto i : faces[f].tight) detail += " " + std::to_string(i);
      detail += ") is the image of " + std::to_string(covered[f].size()) + " subfaces";
      for (const auto& id : covered[f]) detail += " " + id;
      report.add("AXIOM(3)", super.id, detail);
    }
  }

  // connectivity of the incidence graph
  std::vector<std::vector<std::size_t>> adj(c.faces.size());
  for (const auto& [key, m] : idx.embeds) {
    adj[key.first].push_back(key.second);
    adj[key.second].push_back(key.first);
  }
  std::vector<bool> seen(c.faces.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    auto f = queue.front();
    queue.pop_front();
    for (auto g : adj[f])
      if (!seen[g]) {
        seen[g] = true;
        queue.push_back(g);
      }
  }
  for (std::size_t i = 0; i < c.faces.size(); ++i)
    if (!seen[i]) report.add("CONNECTED", c.faces[i].id, "face is not connected to " + c.faces[0].id);
  return report;
}

// ---------------------------------------------------------------------------
// Star(W)

struct StarDirection {
  std::string cofacet;
  IntVector primitive;  // representative in N_cofacet of the generator of N_cofacet / N_W
};

struct StarData {
  std::string face;
  std::vector<StarDirection> directions;
};

namespace detail {

/// Integer vector v with f . v == 1 for a primitive integer functional f.
inline IntVector unit_preimage(const IntVector& f) {
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f[j] == 1 || f[j] == -1) {
      IntVector v(f.size(), Int(0));
      v[j] = f[j];
      return v;
    }
  // extended Euclid across the entries
  IntVector v(f.size(), Int(0));
  Int g = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j] == 0) continue;
    if (g == 0) {
      g = f[j];
      v[j] = 1;
      continue;
    }
    // find x, y with x g + y f[j] = gcd(g, f[j])
    Int a = g, b = f[j], x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
      Int q = a / b;
      Int t = a - q * b;
      a = b;
      b = t;
      t = x0 - q * x1;
      x0 = x1;
      x1 = t;
      t = y0 - q * y1;
      y0 = y1;
      y1 = t;
    }
    for (auto& e : v) e *= x0;
    v[j] = y0;
    g = a;
  }
  if (g < 0) v = -v;
  return v;
}

}  // namespace detail

inline StarData star(const PolyhedralComplex& c, const ComplexIndex& idx, const std::string& w) {
  auto wi = c.find(w);
  if (!wi) throw Error(ErrorCode::UnknownFace, "no face '" + w + "'");
  StarData out{w, {}};
  const auto& face = c.faces[*wi];
  for (auto t : idx.superfaces_of(*wi)) {
    const auto& co = c.faces[t];
    if (co.lattice_rank != face.lattice_rank + 1) continue;
    const auto& embed = *idx.embed(*wi, t);
    // primitive functional vanishing on the image of N_W
    auto ker = nullspace(to_rat(embed.linear.transpose()));
    if (ker.size() != 1) throw Error(ErrorCode::InvalidArgument, "inclusion " + w + "->" + co.id + " is degenerate");
    IntVector f = clear_denominators(ker.front());
    IntVector e = detail::unit_preimage(f);
    // orient e into the cofacet
    Rat side = dot(f, co.chart.interior_point() - embed.offset);
    if (side < 0) e = -e;
    out.directions.push_back({co.id, std::move(e)});
  }
  return out;
}

inline StarData star(const PolyhedralComplex& c, const std::string& w) { return star(c, index_complex(c), w); }

// ---------------------------------------------------------------------------
// Piecewise integral affine maps to R^n and harmonicity

struct PIAMap {
  PolyhedralComplex source;
  std::size_t target_dim = 0;
  std::map<std::string, AffineMap> per_face;

  const AffineMap& on(const std::string& face) const {
    auto it = per_face.find(face);
    if (it == per_face.end()) throw Error(ErrorCode::UnknownFace, "map has no component on face '" + face + "'");
    return it->second;
  }
};

/// Per-face maps must agree along every inclusion.
inline ValidationReport check_compatibility(const PIAMap& m) {
  ValidationReport report;
  auto idx = index_complex(m.source);
  for (const auto& f : m.source.faces) {
    auto it = m.per_face.find(f.id);
    if (it == m.per_face.end()) {
      report.add("PIA", f.id, "no affine map on this face");
      continue;
    }
    if (it->second.source_dim() != f.lattice_rank || it->second.target_dim() != m.target_dim)
      report.add("PIA", f.id, "affine map has the wrong shape");
  }
  if (!report.ok()) return report;
  for (const auto& [key, embed] : idx.embeds) {
    const auto& sub = m.source.faces[key.first];
    const auto& super = m.source.faces[key.second];
    if (!(compose(m.on(super.id), embed) == m.on(sub.id)))
      report.add("PIA", sub.id + "->" + super.id, "restriction of the super-face map differs from the sub-face map");
  }
  return report;
}

inline Subspace lin_of_image(const PIAMap& m, const std::string& w) {
  const auto& face = m.source.face(w);
  const auto& map = m.on(w);
  std::vector<RatVector> cols;
  for (std::size_t j = 0; j < face.lattice_rank; ++j) cols.push_back(to_rat(map.linear.column(j)));
  return Subspace::span(m.target_dim, cols);
}

enum class Harmonicity { Harmonic, QuasiHarmonicOnly, NotQuasiHarmonic };

constexpr const char* to_string(Harmonicity h) {
  switch (h) {
    case Harmonicity::Harmonic: return "Harmonic";
    case Harmonicity::QuasiHarmonicOnly: return "QuasiHarmonicOnly";
    case Harmonicity::NotQuasiHarmonic: return "NotQuasiHarmonic";
  }
  return "?";
}

struct HarmonicityResult {
  Harmonicity verdict = Harmonicity::NotQuasiHarmonic;
  std::vector<std::string> cofacets;
  std::vector<RatVector> derivatives;  // d beta / d e_i per star direction
  std::optional<IntVector> coefficients;  // all ones when harmonic, LP certificate when quasi
  Subspace image_span;
};

inline HarmonicityResult harmonicity_at(const PIAMap& m, const std::string& w) {
  if (!m.source.find(w)) throw Error(ErrorCode::UnknownFace, "no face '" + w + "'");
  auto s = star(m.source, w);
  if (s.directions.empty()) throw Error(ErrorCode::NoCofacets, "face '" + w + "' has no codimension-one cofacets");

  HarmonicityResult out;
  out.image_span = lin_of_image(m, w);
  RatVector sum(m.target_dim, Rat(0));
  for (const auto& d : s.directions) {
    RatVector der = m.on(d.cofacet).apply_linear(to_rat(d.primitive));
    sum = sum + der;
    out.cofacets.push_back(d.cofacet);
    out.derivatives.push_back(std::move(der));
  }
  if (span_membership(sum, out.image_span)) {
    out.verdict = Harmonicity::Harmonic;
    out.coefficients = IntVector(out.derivatives.size(), Int(1));
    return out;
  }
  out.coefficients = strict_positive_combination(out.derivatives, out.image_span);
  out.verdict = out.coefficients ? Harmonicity::QuasiHarmonicOnly : Harmonicity::NotQuasiHarmonic;
  return out;
}

// ---------------------------------------------------------------------------
// Skeletons of strictly semistable pairs

struct PairStratum {
  std::string id;
  std::vector<std::string> vertical;    // V_S, |V_S| = a + 1 >= 1
  std::vector<std::string> horizontal;  // H_S, |H_S| = b
  Rat length;                           // nu(lambda)
};

struct SemistablePairData {
  std::vector<std::string> vertical_components;
  std::vector<std::string> horizontal_components;
  std::vector<PairStratum> strata;
  std::vector<std::pair<std::string, std::string>> order;  // (S, T) means S <= T, i.e. S in closure(T)
};

namespace detail {

/// Chart coordinates of Delta_S x R^b: the verticals after the first, then
/// the horizontals, all sorted. The first vertical coordinate is recovered
/// from the sum constraint.
inline std::vector<std::string> chart_coordinates(const PairStratum& s) {
  std::vector<std::string> coords(s.vertical.begin() + 1, s.vertical.end());
  coords.insert(coords.end(), s.horizontal.begin(), s.horizontal.end());
  return coords;
}

inline Polyhedron simplex_chart(std::size_t a, std::size_t b, const Rat& length) {
  const std::size_t dim = a + b;
  std::vector<LinearConstraint> ineqs;
  for (std::size_t i = 0; i < dim; ++i) {
    IntVector n(dim, Int(0));
    n[i] = 1;
    ineqs.push_back({n, Rat(0)});
  }
  if (a > 0) {
    IntVector n(dim, Int(0));
    for (std::size_t i = 0; i < a; ++i) n[i] = -1;
    ineqs.push_back({n, -length});
  }
  return Polyhedron(dim, std::move(ineqs));
}

}  // namespace detail

inline PolyhedralComplex build_skeleton(SemistablePairData d) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InconsistentStrata, msg); };
  std::set<std::string> vertical(d.vertical_components.begin(), d.vertical_components.end());
  std::set<std::string> horizontal(d.horizontal_components.begin(), d.horizontal_components.end());
  for (const auto& h : horizontal)
    if (vertical.count(h)) fail("component '" + h + "' is both vertical and horizontal");

  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < d.strata.size(); ++i) {
    auto& s = d.strata[i];
    if (!by_id.emplace(s.id, i).second) fail("duplicate stratum id '" + s.id + "'");
    std::sort(s.vertical.begin(), s.vertical.end());
    std::sort(s.horizontal.begin(), s.horizontal.end());
    if (std::adjacent_find(s.vertical.begin(), s.vertical.end()) != s.vertical.end() ||
        std::adjacent_find(s.horizontal.begin(), s.horizontal.end()) != s.horizontal.end())
      fail("stratum '" + s.id + "' lists a component twice");
    if (s.vertical.empty()) fail("stratum '" + s.id + "' has no vertical support");
    for (const auto& v : s.vertical)
      if (!vertical.count(v)) fail("stratum '" + s.id + "' uses unknown vertical component '" + v + "'");
    for (const auto& h : s.horizontal)
      if (!horizontal.count(h)) fail("stratum '" + s.id + "' uses unknown horizontal component '" + h + "'");
    if (s.length <= 0) fail("stratum '" + s.id + "' has nonpositive length");
  }

  const std::size_t n = d.strata.size();
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
  for (const auto& [s, t] : d.order) {
    auto si = by_id.find(s), ti = by_id.find(t);
    if (si == by_id.end() || ti == by_id.end()) fail("order relation names unknown stratum '" + s + "' or '" + t + "'");
    le[si->second][ti->second] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (le[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (le[k][j]) le[i][j] = true;

  auto subset = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !le[i][j]) continue;
      const auto& s = d.strata[i];
      const auto& t = d.strata[j];
      if (le[j][i]) fail("strata '" + s.id + "' and '" + t.id + "' precede each other");
      if (!subset(t.vertical, s.vertical) || !subset(t.horizontal, s.horizontal))
        fail("'" + s.id + "' <= '" + t.id + "' but the components of '" + t.id + "' are not a subset");
      if (t.vertical == s.vertical && t.horizontal == s.horizontal)
        fail("'" + s.id + "' <= '" + t.id + "' with identical component sets");
      if (t.vertical.size() >= 2 && t.length != s.length)
        fail("'" + s.id + "' <= '" + t.id + "' share a vertical pair but have lengths " + to_string(s.length) +
             " and " + to_string(t.length));
    }

  // Locally at S the strata above S are exactly the partial intersections
  // of its components, one for each choice.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = d.strata[i];
    std::map<std::pair<std::vector<std::string>, std::vector<std::string>>, std::string> above;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !le[i][j]) continue;
      const auto& t = d.strata[j];
      auto [it, inserted] = above.emplace(std::make_pair(t.vertical, t.horizontal), t.id);
      if (!inserted) fail("strata '" + it->second + "' and '" + t.id + "' both sit above '" + s.id + "' with the same components");
    }
    const std::size_t nv = s.vertical.size(), nh = s.horizontal.size();
    for (std::size_t vm = 1; vm < (std::size_t{1} << nv); ++vm)
      for (std::size_t hm = 0; hm < (std::size_t{1} << nh); ++hm) {
        if (vm + 1 == (std::size_t{1} << nv) && hm + 1 == (std::size_t{1} << nh)) continue;
        std::vector<std::string> vs, hs;
        for (std::size_t k = 0; k < nv; ++k)
          if (vm >> k & 1) vs.push_back(s.vertical[k]);
        for (std::size_t k = 0; k < nh; ++k)
          if (hm >> k & 1) hs.push_back(s.horizontal[k]);
        if (!above.count({vs, hs})) {
          std::string what;
          for (const auto& x : vs) what += " " + x;
          for (const auto& x : hs) what += " " + x;
          fail("no stratum above '" + s.id + "' with components" + what);
        }
      }
  }

  PolyhedralComplex c;
  for (const auto& s : d.strata) {
    const std::size_t a = s.vertical.size() - 1, b = s.horizontal.size();
    c.faces.push_back({s.id, a + b, detail::simplex_chart(a, b, s.length),
                       "Delta(" + std::to_string(a) + "," + to_string(s.length) + ") x R^" + std::to_string(b)});
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !le[i][j]) continue;
      const auto& big = d.strata[i];    // S: Delta_T is a face of Delta_S
      const auto& small = d.strata[j];  // T
      auto big_coords = detail::chart_coordinates(big);
      auto small_coords = detail::chart_coordinates(small);
      const std::size_t small_a = small.vertical.size() - 1;
      AffineMap m{IntMatrix(big_coords.size(), small_coords.size()), RatVector(big_coords.size(), Rat(0))};
      for (std::size_t r = 0; r < big_coords.size(); ++r) {
        const auto& name = big_coords[r];
        if (name == small.vertical.front()) {
          // recovered coordinate: length minus the other vertical coordinates of T
          m.offset[r] = big.length;
          for (std::size_t k = 0; k < small_a; ++k) m.linear(r, k) = -1;
          continue;
        }
        auto it = std::find(small_coords.begin(), small_coords.end(), name);
        if (it != small_coords.end()) m.linear(r, static_cast<std::size_t>(it - small_coords.begin())) = 1;
      }
      c.inclusions.push_back({small.id, big.id, std::move(m)});
    }
  return c;
}

}  // namespace tropmoduli
