#pragma once

// Hand-built types, complexes and families shared by the unit tests, the
// acceptance binary and the sample documents in data/.

#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tropmoduli/family.hpp"
#include "tropmoduli/moduli.hpp"
#include "tropmoduli/polyhedral.hpp"
#include "tropmoduli/tropcurve.hpp"

namespace fixtures {

using namespace tropmoduli;

inline IntVector iv(std::initializer_list<long> xs) {
  IntVector v;
  for (auto x : xs) v.push_back(Int(x));
  return v;
}

inline RatVector rv(std::initializer_list<long> xs) {
  RatVector v;
  for (auto x : xs) v.push_back(Rat(x));
  return v;
}

struct TypeBuilder {
  CombinatorialType t;

  TypeBuilder& vertex(const std::string& id, int weight = 0) {
    t.graph.vertices.push_back({id, weight});
    return *this;
  }
  TypeBuilder& edge(const std::string& id, const std::string& u, const std::string& v, IntVector slope) {
    t.graph.edges.push_back({id, t.graph.vertex_at(u), t.graph.vertex_at(v)});
    t.edge_slopes.push_back(std::move(slope));
    return *this;
  }
  TypeBuilder& leg(const std::string& id, const std::string& v, IntVector slope) {
    t.graph.legs.push_back({id, t.graph.vertex_at(v)});
    t.leg_slopes.push_back(std::move(slope));
    return *this;
  }
  CombinatorialType build(std::size_t dim = 2) {
    t.lattice_dim = dim;
    return t;
  }
};

/// One vertex with legs (1,0), (0,1), (-1,-1).
inline CombinatorialType tripod() {
  return TypeBuilder{}.vertex("v0").leg("l0", "v0", iv({1, 0})).leg("l1", "v0", iv({0, 1})).leg("l2", "v0", iv({-1, -1})).build();
}

inline std::vector<IntVector> cross_degree() { return {iv({1, 0}), iv({0, 1}), iv({-1, 0}), iv({0, -1})}; }

/// One 4-valent vertex with legs (1,0), (0,1), (-1,0), (0,-1).
inline CombinatorialType cross() {
  TypeBuilder b;
  b.vertex("v0");
  auto d = cross_degree();
  for (std::size_t i = 0; i < d.size(); ++i) b.leg("l" + std::to_string(i), "v0", d[i]);
  return b.build();
}

/// The resolution of the cross putting legs i, j on vertex "a" and the
/// other two on "b", joined by "e" from a to b.
inline CombinatorialType cross_resolution(int i, int j) {
  auto d = cross_degree();
  IntVector out(2, Int(0));
  out = -(d[i] + d[j]);
  TypeBuilder b;
  b.vertex("a").vertex("b").edge("e", "a", "b", out);
  for (int k = 0; k < 4; ++k) b.leg("l" + std::to_string(k), (k == i || k == j) ? "a" : "b", d[k]);
  return b.build();
}

inline LengthFunction length(std::initializer_list<long> linear, long offset) { return {iv(linear), Rat(offset)}; }

/// Position h(q) = linear * q + offset on a chart of rank `rank`.
inline AffineMap position(std::size_t rank, const std::vector<std::vector<long>>& linear, std::initializer_list<long> offset) {
  IntMatrix m(offset.size(), rank);
  for (std::size_t r = 0; r < linear.size(); ++r)
    for (std::size_t c = 0; c < linear[r].size(); ++c) m(r, c) = linear[r][c];
  return {m, rv(offset)};
}

inline Face point_face(const std::string& id) { return {id, 0, Polyhedron(0, {}), ""}; }
inline Face ray_face(const std::string& id) { return {id, 1, Polyhedron::orthant(1), ""}; }
inline FaceInclusion origin_of_ray(const std::string& o, const std::string& r) { return {o, r, {IntMatrix(1, 0), rv({0})}}; }

/// Origin "o" with rays "r1".."rk" glued at it.
inline PolyhedralComplex rays(std::size_t k) {
  PolyhedralComplex c;
  c.faces.push_back(point_face("o"));
  for (std::size_t i = 1; i <= k; ++i) {
    auto id = "r" + std::to_string(i);
    c.faces.push_back(ray_face(id));
    c.inclusions.push_back(origin_of_ray("o", id));
  }
  return c;
}

/// The closed quadrant with its four faces.
inline PolyhedralComplex quadrant() {
  PolyhedralComplex c;
  c.faces.push_back(point_face("o"));
  c.faces.push_back(ray_face("x"));
  c.faces.push_back(ray_face("y"));
  c.faces.push_back({"q", 2, Polyhedron::orthant(2), ""});
  c.inclusions.push_back(origin_of_ray("o", "x"));
  c.inclusions.push_back(origin_of_ray("o", "y"));
  c.inclusions.push_back({"o", "q", {IntMatrix(2, 0), rv({0, 0})}});
  IntMatrix ex(2, 1), ey(2, 1);
  ex(0, 0) = 1;
  ey(1, 0) = 1;
  c.inclusions.push_back({"x", "q", {ex, rv({0, 0})}});
  c.inclusions.push_back({"y", "q", {ey, rv({0, 0})}});
  return c;
}

/// A point base carrying one tripod at the origin.
inline FamilyDatum point_tripod_family() {
  FamilyDatum f;
  f.base.faces.push_back(point_face("p"));
  auto t = tripod();
  f.extended_degree = t.leg_slopes;
  f.faces.push_back({"p", t, {}, {{"v0", position(0, {}, {0, 0})}}});
  return f;
}

/// Over a point: a tripod with a bounded zero-slope tail of length 1.
inline FamilyDatum point_tail_family() {
  auto t = TypeBuilder{}
               .vertex("v0")
               .vertex("v1")
               .edge("e0", "v0", "v1", iv({0, 0}))
               .leg("l0", "v0", iv({1, 0}))
               .leg("l1", "v0", iv({0, 1}))
               .leg("l2", "v0", iv({-1, -1}))
               .build();
  FamilyDatum f;
  f.base.faces.push_back(point_face("p"));
  f.extended_degree = t.leg_slopes;
  f.faces.push_back({"p", t, {{"e0", length({}, 1)}}, {{"v0", position(0, {}, {0, 0})}, {"v1", position(0, {}, {0, 0})}}});
  return f;
}

/// Tripods over the quadrant with vertex position (x, y).
inline FamilyDatum quadrant_tripod_family() {
  FamilyDatum f;
  f.base = quadrant();
  auto t = tripod();
  f.extended_degree = t.leg_slopes;
  f.faces.push_back({"o", t, {}, {{"v0", position(0, {}, {0, 0})}}});
  f.faces.push_back({"x", t, {}, {{"v0", position(1, {{1}, {0}}, {0, 0})}}});
  f.faces.push_back({"y", t, {}, {{"v0", position(1, {{0}, {1}}, {0, 0})}}});
  f.faces.push_back({"q", t, {}, {{"v0", position(2, {{1, 0}, {0, 1}}, {0, 0})}}});
  for (const auto& inc : f.base.inclusions) f.contractions.push_back({inc.sub, inc.super, {{"v0", "v0"}}, {}});
  return f;
}

inline FamilyContraction collapse_new_edge(const std::string& sub, const std::string& super) {
  return {sub, super, {{"a", "v0"}, {"b", "v0"}}, {{"e", std::nullopt}}};
}

/// Resolution data over a ray: a fixed at the origin, new edge of length
/// offset + t.
inline FamilyFace resolution_over_ray(const std::string& face, int i, int j, long offset = 0) {
  auto t = cross_resolution(i, j);
  const auto& s = t.edge_slopes[0];
  long s0 = s[0].convert_to<long>(), s1 = s[1].convert_to<long>();
  return {face,
          t,
          {{"e", length({1}, offset)}},
          {{"a", position(1, {{0}, {0}}, {0, 0})}, {"b", position(1, {{s0}, {s1}}, {s0 * offset, s1 * offset})}}};
}

inline FamilyFace cross_over_origin() { return {"o", cross(), {}, {{"v0", position(0, {}, {0, 0})}}}; }

/// Ray base: the cross over the origin, a resolution with new edge length t
/// over the ray.
inline FamilyDatum ray_family(long offset = 0) {
  FamilyDatum f;
  f.base = rays(1);
  f.extended_degree = cross_degree();
  f.faces.push_back(cross_over_origin());
  f.faces.push_back(resolution_over_ray("r1", 0, 1, offset));
  f.contractions.push_back(collapse_new_edge("o", "r1"));
  return f;
}

/// Three rays, each carrying a different resolution of the cross.
inline FamilyDatum three_ray_family() {
  FamilyDatum f;
  f.base = rays(3);
  f.extended_degree = cross_degree();
  f.faces.push_back(cross_over_origin());
  const std::pair<int, int> pairings[] = {{0, 1}, {0, 2}, {0, 3}};
  for (int r = 0; r < 3; ++r) {
    auto id = "r" + std::to_string(r + 1);
    f.faces.push_back(resolution_over_ray(id, pairings[r].first, pairings[r].second));
    f.contractions.push_back(collapse_new_edge("o", id));
  }
  return f;
}

/// Two rays with the same resolution type, new edge of constant length 1,
/// the whole curve translated by +t e1 on one ray and -t e1 on the other.
inline FamilyDatum two_ray_family() {
  FamilyDatum f;
  f.base = rays(2);
  f.extended_degree = cross_degree();
  auto t = cross_resolution(0, 1);
  f.faces.push_back({"o", t, {{"e", length({}, 1)}}, {{"a", position(0, {}, {0, 0})}, {"b", position(0, {}, {-1, -1})}}});
  for (long sign : {1L, -1L}) {
    auto id = sign > 0 ? "r1" : "r2";
    f.faces.push_back({id,
                       t,
                       {{"e", length({0}, 1)}},
                       {{"a", position(1, {{sign}, {0}}, {0, 0})}, {"b", position(1, {{sign}, {0}}, {-1, -1})}}});
    f.contractions.push_back({"o", id, {{"a", "a"}, {"b", "b"}}, {{"e", std::string("e")}}});
  }
  return f;
}

/// Three vertical components meeting in three double curves and one
/// triple point, all of length 1.
inline SemistablePairData triangle_pair() {
  SemistablePairData d;
  d.vertical_components = {"D0", "D1", "D2"};
  d.strata = {{"S0", {"D0"}, {}, Rat(1)},          {"S1", {"D1"}, {}, Rat(1)},
              {"S2", {"D2"}, {}, Rat(1)},          {"S01", {"D0", "D1"}, {}, Rat(1)},
              {"S02", {"D0", "D2"}, {}, Rat(1)},   {"S12", {"D1", "D2"}, {}, Rat(1)},
              {"S012", {"D0", "D1", "D2"}, {}, Rat(1)}};
  for (const auto& [s, t] : std::vector<std::pair<std::string, std::string>>{{"S01", "S0"},
                                                                             {"S01", "S1"},
                                                                             {"S02", "S0"},
                                                                             {"S02", "S2"},
                                                                             {"S12", "S1"},
                                                                             {"S12", "S2"},
                                                                             {"S012", "S0"},
                                                                             {"S012", "S1"},
                                                                             {"S012", "S2"},
                                                                             {"S012", "S01"},
                                                                             {"S012", "S02"},
                                                                             {"S012", "S12"}})
    d.order.push_back({s, t});
  return d;
}

/// The map on rays(k) sending the origin to 0 and ray i along dirs[i].
inline PIAMap rays_map(const std::vector<IntVector>& dirs) {
  PIAMap m;
  m.source = rays(dirs.size());
  m.target_dim = dirs.empty() ? 2 : dirs.front().size();
  m.per_face["o"] = {IntMatrix(m.target_dim, 0), RatVector(m.target_dim, Rat(0))};
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    IntMatrix col(m.target_dim, 1);
    for (std::size_t k = 0; k < m.target_dim; ++k) col(k, 0) = dirs[i][k];
    m.per_face["r" + std::to_string(i + 1)] = {col, RatVector(m.target_dim, Rat(0))};
  }
  return m;
}

/// A random valid pair: a few maximal component sets, closed under taking
/// nonempty-vertical subsets. Strata with two or more verticals share one
/// length; one-vertical strata get their own.
inline SemistablePairData random_pair(std::mt19937_64& rng, std::size_t max_components = 5, std::size_t max_strata = 12) {
  using Key = std::pair<std::vector<std::string>, std::vector<std::string>>;
  std::uniform_int_distribution<int> coin(0, 1);
  while (true) {
    std::size_t nv = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(4, max_components))(rng);
    std::size_t nh = std::uniform_int_distribution<std::size_t>(0, max_components - nv)(rng);
    SemistablePairData d;
    for (std::size_t i = 0; i < nv; ++i) d.vertical_components.push_back("D" + std::to_string(i));
    for (std::size_t i = 0; i < nh; ++i) d.horizontal_components.push_back("H" + std::to_string(i));
    std::set<Key> strata;
    int maximal = std::uniform_int_distribution<int>(1, 3)(rng);
    std::set<std::string> used;
    for (int m = 0; m < maximal; ++m) {
      Key top;
      for (const auto& v : d.vertical_components)
        if (coin(rng)) top.first.push_back(v);
      // share a vertical with an earlier set so the skeleton is connected
      if (!used.empty()) {
        auto shared_v = *std::next(used.begin(), static_cast<long>(rng() % used.size()));
        if (std::find(top.first.begin(), top.first.end(), shared_v) == top.first.end()) top.first.push_back(shared_v);
        std::sort(top.first.begin(), top.first.end());
      }
      if (top.first.empty()) top.first.push_back(d.vertical_components[rng() % nv]);
      used.insert(top.first.begin(), top.first.end());
      for (const auto& h : d.horizontal_components)
        if (coin(rng)) top.second.push_back(h);
      const std::size_t a = top.first.size(), b = top.second.size();
      for (std::size_t vm = 1; vm < (std::size_t{1} << a); ++vm)
        for (std::size_t hm = 0; hm < (std::size_t{1} << b); ++hm) {
          Key k;
          for (std::size_t i = 0; i < a; ++i)
            if (vm >> i & 1) k.first.push_back(top.first[i]);
          for (std::size_t i = 0; i < b; ++i)
            if (hm >> i & 1) k.second.push_back(top.second[i]);
          strata.insert(k);
        }
    }
    if (strata.size() > max_strata) continue;
    Rat shared(Int(std::uniform_int_distribution<int>(1, 9)(rng)), Int(std::uniform_int_distribution<int>(1, 4)(rng)));
    std::vector<Key> keys(strata.begin(), strata.end());
    std::shuffle(keys.begin(), keys.end(), rng);
    auto name = [](const Key& k) {
      std::string s = "S";
      for (const auto& x : k.first) s += "_" + x;
      for (const auto& x : k.second) s += "_" + x;
      return s;
    };
    for (const auto& k : keys) {
      Rat len = k.first.size() >= 2 ? shared : Rat(std::uniform_int_distribution<int>(1, 5)(rng));
      d.strata.push_back({name(k), k.first, k.second, len});
    }
    auto subset = [](const std::vector<std::string>& x, const std::vector<std::string>& y) {
      return std::includes(y.begin(), y.end(), x.begin(), x.end());
    };
    for (const auto& s : keys)
      for (const auto& t : keys)
        if (s != t && subset(t.first, s.first) && subset(t.second, s.second) && coin(rng) + coin(rng) > 0)
          d.order.push_back({name(s), name(t)});
    // keep the order generated by covers at least
    for (const auto& s : keys)
      for (const auto& t : keys)
        if (s != t && subset(t.first, s.first) && subset(t.second, s.second) &&
            t.first.size() + t.second.size() + 1 == s.first.size() + s.second.size() &&
            std::find(d.order.begin(), d.order.end(), std::make_pair(name(s), name(t))) == d.order.end())
          d.order.push_back({name(s), name(t)});
    return d;
  }
}

}  // namespace fixtures
