#pragma once

// Exact rational linear algebra, integer lattices and strict-positivity
// feasibility. Nothing in here touches floating point.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "tropmoduli/error.hpp"

namespace tropmoduli {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

using IntVector = std::vector<Int>;
using RatVector = std::vector<Rat>;

// ---------------------------------------------------------------------------
// Scalars and vectors

inline std::string to_string(const Rat& q) {
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

inline std::string to_string(const Int& z) { return z.str(); }

/// Accepts "p/q", "p" and optional leading sign; the result is normalized.
inline Rat parse_rat(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rat(Int(text));
    Int den(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::SchemaError, "zero denominator in '" + text + "'");
    return Rat(Int(text.substr(0, slash)), den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::SchemaError, "malformed rational '" + text + "'");
  }
}

template <class T>
std::string to_string(const std::vector<T>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i].str();
  }
  return out + ")";
}

inline RatVector to_rat(const IntVector& v) { return RatVector(v.begin(), v.end()); }

inline bool is_integral(const Rat& q) { return boost::multiprecision::denominator(q) == 1; }

template <class T>
bool is_zero(const std::vector<T>& v) {
  return std::all_of(v.begin(), v.end(), [](const T& x) { return x == 0; });
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "dot product of vectors of different length");
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rat dot(const IntVector& a, const RatVector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "dot product of vectors of different length");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += Rat(a[i]) * b[i];
  return s;
}

template <class T>
std::vector<T> operator+(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "vector sum of different lengths");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

template <class T>
std::vector<T> operator-(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "vector difference of different lengths");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

template <class T>
std::vector<T> operator-(std::vector<T> a) {
  for (auto& x : a) x = -x;
  return a;
}

template <class T, class S>
std::vector<T> scaled(std::vector<T> a, const S& s) {
  for (auto& x : a) x *= s;
  return a;
}

inline RatVector scaled(const IntVector& a, const Rat& s) {
  RatVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = Rat(a[i]) * s;
  return out;
}

inline Int content(const IntVector& v) {
  Int g = 0;
  for (const auto& x : v) g = boost::multiprecision::gcd(g, x);
  return boost::multiprecision::abs(g);
}

/// v / gcd(entries), keeping direction.
inline IntVector primitive_vector(const IntVector& v) {
  Int g = content(v);
  if (g == 0) throw Error(ErrorCode::ZeroVector, "primitive_vector of the zero vector");
  IntVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / g;
  return out;
}

/// Smallest positive multiple of a rational vector that is integral with
/// content 1. The zero vector maps to the zero vector.
inline IntVector clear_denominators(const RatVector& v) {
  Int l = 1;
  for (const auto& x : v) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(x));
  IntVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = boost::multiprecision::numerator(v[i]) * (l / boost::multiprecision::denominator(v[i]));
  if (is_zero(out)) return out;
  return primitive_vector(out);
}

// ---------------------------------------------------------------------------
// Dense matrices

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(std::size_t cols, const std::vector<std::vector<T>>& rows) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw Error(ErrorCode::DimMismatch, "ragged matrix rows");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix from_columns(std::size_t rows, const std::vector<std::vector<T>>& cols) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw Error(ErrorCode::DimMismatch, "ragged matrix columns");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  std::vector<T> column(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  // row[dst] += factor * row[src]
  void add_row(std::size_t dst, std::size_t src, const T& factor) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += factor * (*this)(src, j);
  }
  void add_col(std::size_t dst, std::size_t src, const T& factor) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += factor * (*this)(i, src);
  }

  std::vector<T> operator*(const std::vector<T>& v) const {
    if (v.size() != cols_) throw Error(ErrorCode::DimMismatch, "matrix-vector size mismatch");
    std::vector<T> out(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw Error(ErrorCode::DimMismatch, "matrix product size mismatch");
    Matrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        if ((*this)(i, k) == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) out(i, j) += (*this)(i, k) * o(k, j);
      }
    return out;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

inline RatMatrix to_rat(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return r;
}

inline RatVector operator*(const IntMatrix& m, const RatVector& v) { return to_rat(m) * v; }

struct RowEchelon {
  RatMatrix reduced;                 // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
};

inline RowEchelon rref(RatMatrix m) {
  RowEchelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, r);
    Rat inv = 1 / m(r, c);
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (i != r && m(i, c) != 0) m.add_row(i, r, -m(i, c));
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = std::move(m);
  return out;
}

inline std::size_t rank(const RatMatrix& m) { return rref(m).pivots.size(); }
inline std::size_t rank(const IntMatrix& m) { return rank(to_rat(m)); }

/// Rank of a family of vectors of common length `dim`.
inline std::size_t rank_of(std::size_t dim, const std::vector<RatVector>& vectors) {
  if (vectors.empty()) return 0;
  return rank(RatMatrix::from_rows(dim, vectors));
}

/// Basis of {x : m x = 0}.
inline std::vector<RatVector> nullspace(const RatMatrix& m) {
  auto e = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<RatVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    RatVector v(m.cols(), Rat(0));
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Some solution of m x = b, if the system is consistent.
inline std::optional<RatVector> solve(const RatMatrix& m, const RatVector& b) {
  if (b.size() != m.rows()) throw Error(ErrorCode::DimMismatch, "right-hand side size mismatch");
  RatMatrix aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto e = rref(aug);
  if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
  RatVector x(m.cols(), Rat(0));
  for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.reduced(r, m.cols());
  return x;
}

// ---------------------------------------------------------------------------
// Linear subspaces of Q^n

class Subspace {
 public:
  explicit Subspace(std::size_t ambient_dim = 0) : ambient_dim_(ambient_dim) {}

  /// Rational span of arbitrary (possibly dependent) generators.
  static Subspace span(std::size_t ambient_dim, const std::vector<RatVector>& generators) {
    Subspace s(ambient_dim);
    if (generators.empty()) return s;
    auto e = rref(RatMatrix::from_rows(ambient_dim, generators));
    for (std::size_t r = 0; r < e.pivots.size(); ++r) s.basis_.push_back(e.reduced.row(r));
    return s;
  }

  static Subspace whole(std::size_t ambient_dim) {
    std::vector<RatVector> gens;
    for (std::size_t i = 0; i < ambient_dim; ++i) {
      RatVector v(ambient_dim, Rat(0));
      v[i] = 1;
      gens.push_back(std::move(v));
    }
    return span(ambient_dim, gens);
  }

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<RatVector>& basis() const { return basis_; }

  /// Rows spanning the orthogonal complement: v is in the subspace iff
  /// every row annihilates v.
  std::vector<RatVector> annihilator() const {
    if (basis_.empty()) return Subspace::whole(ambient_dim_).basis();
    return nullspace(RatMatrix::from_rows(ambient_dim_, basis_));
  }

 private:
  std::size_t ambient_dim_;
  std::vector<RatVector> basis_;
};

inline bool span_membership(const RatVector& v, const Subspace& s) {
  if (v.size() != s.ambient_dim())
    throw Error(ErrorCode::DimMismatch, "vector of length " + std::to_string(v.size()) +
                                            " tested against subspace of R^" + std::to_string(s.ambient_dim()));
  if (is_zero(v)) return true;
  if (s.dim() == 0) return false;
  auto gens = s.basis();
  gens.push_back(v);
  return rank_of(s.ambient_dim(), gens) == s.dim();
}

// ---------------------------------------------------------------------------
// Integer lattices

struct SmithForm {
  IntMatrix u;  // rows x rows, unimodular
  IntMatrix s;  // rows x cols, diagonal, d_1 | d_2 | ...
  IntMatrix v;  // cols x cols, unimodular
};

/// u * m * v == s. Pivots are chosen by minimal absolute value to keep
/// intermediate entries small.
inline SmithForm smith_normal_form(const IntMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  IntMatrix s = m;
  IntMatrix u = IntMatrix::identity(rows);
  IntMatrix v = IntMatrix::identity(cols);

  auto row_add = [&](std::size_t dst, std::size_t src, const Int& f) {
    s.add_row(dst, src, f);
    u.add_row(dst, src, f);
  };
  auto col_add = [&](std::size_t dst, std::size_t src, const Int& f) {
    s.add_col(dst, src, f);
    v.add_col(dst, src, f);
  };

  const std::size_t diag = std::min(rows, cols);
  for (std::size_t t = 0; t < diag; ++t) {
    while (true) {
      // minimal nonzero |entry| in the trailing block
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (s(i, j) != 0 && (pi == rows || abs(s(i, j)) < abs(s(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == rows) return {std::move(u), std::move(s), std::move(v)};
      if (pi != t) {
        s.swap_rows(pi, t);
        u.swap_rows(pi, t);
      }
      if (pj != t) {
        s.swap_cols(pj, t);
        v.swap_cols(pj, t);
      }

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (s(i, t) == 0) continue;
        Int q = s(i, t) / s(t, t);
        row_add(i, t, -q);
        if (s(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (s(t, j) == 0) continue;
        Int q = s(t, j) / s(t, t);
        col_add(j, t, -q);
        if (s(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // divisibility of the trailing block by the pivot
      std::size_t bad = rows;
      for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (s(i, j) % s(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad == rows) break;
      row_add(t, bad, Int(1));
    }
    if (s(t, t) < 0) {
      for (std::size_t j = 0; j < cols; ++j) s(t, j) = -s(t, j);
      for (std::size_t j = 0; j < rows; ++j) u(t, j) = -u(t, j);
    }
  }
  return {std::move(u), std::move(s), std::move(v)};
}

inline std::vector<Int> elementary_divisors(const IntMatrix& m) {
  auto snf = smith_normal_form(m);
  std::vector<Int> d;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i)
    if (snf.s(i, i) != 0) d.push_back(snf.s(i, i));
  return d;
}

/// Whether the lattice spanned by independent integer vectors equals its
/// rational span intersected with Z^ambient_dim.
inline bool is_saturated(const std::vector<IntVector>& generators, std::size_t ambient_dim) {
  if (generators.empty()) return true;
  for (const auto& g : generators)
    if (g.size() != ambient_dim) throw Error(ErrorCode::DimMismatch, "generator has wrong length");
  auto m = IntMatrix::from_rows(ambient_dim, generators);
  auto d = elementary_divisors(m);
  if (d.size() != generators.size())
    throw Error(ErrorCode::DependentGenerators,
                std::to_string(generators.size()) + " generators span a rank " + std::to_string(d.size()) +
                    " lattice");
  return std::all_of(d.begin(), d.end(), [](const Int& x) { return x == 1; });
}

// ---------------------------------------------------------------------------
// Exact feasibility

namespace detail {

/// Phase-one simplex with Bland's rule: a point x >= 0 with a x = b, or
/// nothing when the system is infeasible.
inline std::optional<RatVector> nonnegative_solution(const RatMatrix& a, const RatVector& b) {
  const std::size_t m = a.rows(), n = a.cols();
  if (b.size() != m) throw Error(ErrorCode::DimMismatch, "right-hand side size mismatch");
  if (m == 0) return RatVector(n, Rat(0));

  // columns: n structural, m artificial, then rhs
  const std::size_t width = n + m + 1;
  RatMatrix t(m, width);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rat sign = b[i] < 0 ? Rat(-1) : Rat(1);
    for (std::size_t j = 0; j < n; ++j) t(i, j) = sign * a(i, j);
    t(i, n + i) = 1;
    t(i, n + m) = sign * b[i];
    basis[i] = n + i;
  }
  // reduced costs of the phase-one objective (sum of artificials)
  std::vector<Rat> cost(width, Rat(0));
  for (std::size_t j = 0; j < width; ++j) {
    if (j >= n && j < n + m) continue;
    for (std::size_t i = 0; i < m; ++i) cost[j] -= t(i, j);
  }

  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < n + m; ++j)
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    if (enter == width) break;

    std::size_t leave = m;
    Rat best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t(i, enter) <= 0) continue;
      Rat ratio = t(i, n + m) / t(i, enter);
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen for phase one

    Rat inv = 1 / t(leave, enter);
    for (std::size_t j = 0; j < width; ++j) t(leave, j) *= inv;
    for (std::size_t i = 0; i < m; ++i)
      if (i != leave && t(i, enter) != 0) t.add_row(i, leave, -t(i, enter));
    Rat f = cost[enter];
    for (std::size_t j = 0; j < width; ++j) cost[j] -= f * t(leave, j);
    basis[leave] = enter;
  }

  if (cost[n + m] != 0) return std::nullopt;  // -cost[rhs] is the residual artificial mass
  RatVector x(n, Rat(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = t(i, n + m);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n && t(i, n + m) != 0) return std::nullopt;
  return x;
}

}  // namespace detail

/// Positive coefficients a_i with sum a_i v_i in `target`, cleared to
/// coprime integers. Homogeneity makes a_i >= 1 equivalent to a_i > 0,
/// which turns the strict system into an ordinary LP feasibility problem.
inline std::optional<IntVector> strict_positive_combination(const std::vector<RatVector>& vectors,
                                                            const Subspace& target) {
  const std::size_t k = vectors.size();
  for (const auto& v : vectors)
    if (v.size() != target.ambient_dim())
      throw Error(ErrorCode::DimMismatch, "vector length differs from target ambient dimension");
  if (k == 0) return std::nullopt;

  auto ann = target.annihilator();
  // rows: p . (sum a_i v_i) = 0 for every annihilator row p
  RatMatrix a(ann.size(), k);
  for (std::size_t r = 0; r < ann.size(); ++r)
    for (std::size_t i = 0; i < k; ++i) a(r, i) = dot(ann[r], vectors[i]);

  // substitute a = 1 + x, x >= 0
  RatVector rhs(ann.size(), Rat(0));
  for (std::size_t r = 0; r < ann.size(); ++r)
    for (std::size_t i = 0; i < k; ++i) rhs[r] -= a(r, i);
  auto x = detail::nonnegative_solution(a, rhs);
  if (!x) return std::nullopt;
  RatVector coeffs(k);
  for (std::size_t i = 0; i < k; ++i) coeffs[i] = (*x)[i] + 1;
  return clear_denominators(coeffs);
}

}  // namespace tropmoduli
