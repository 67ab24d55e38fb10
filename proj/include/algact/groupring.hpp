#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "algact/error.hpp"
#include "algact/groups.hpp"

namespace algact {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Distance from x to the nearest integer.
inline double frac_distance(double x) { return std::abs(x - std::nearbyint(x)); }
inline Rational frac_distance_exact(const Rational& x) {
  using boost::multiprecision::cpp_int;
  const cpp_int q = numerator(x) / denominator(x);  // truncates toward zero
  Rational lo = Rational(q);
  if (lo > x) lo -= 1;
  const Rational up = x - lo, down = lo + 1 - x;
  return up < down ? up : down;
}

// A finitely supported function G -> T with the convolution product
// (ab)(g) = sum_h a(h) b(h^-1 g). Zero coefficients are never stored.
template <class T>
class BasicRingElement {
 public:
  using Terms = std::map<Element, T>;

  explicit BasicRingElement(GroupSpec spec) : spec_(std::move(spec)) {}

  static BasicRingElement delta(const GroupSpec& spec, const Element& g, T c = T(1)) {
    BasicRingElement out(spec);
    out.add(g, c);
    return out;
  }

  const GroupSpec& spec() const { return spec_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  T coeff(const Element& g) const {
    auto it = terms_.find(g);
    return it == terms_.end() ? T(0) : it->second;
  }

  void add(const Element& g, const T& c) {
    if (!spec_.contains(g)) throw BackendMismatch("element does not belong to " + spec_.id());
    if (c == T(0)) return;
    auto [it, inserted] = terms_.emplace(g, c);
    if (!inserted) {
      it->second += c;
      if (it->second == T(0)) terms_.erase(it);
    }
  }

  void set(const Element& g, const T& c) {
    if (!spec_.contains(g)) throw BackendMismatch("element does not belong to " + spec_.id());
    if (c == T(0)) {
      terms_.erase(g);
    } else {
      terms_[g] = c;
    }
  }

  BasicRingElement& operator+=(const BasicRingElement& o) {
    require_same(spec_, o.spec_);
    for (const auto& [g, c] : o.terms_) add(g, c);
    return *this;
  }
  BasicRingElement& operator-=(const BasicRingElement& o) {
    require_same(spec_, o.spec_);
    for (const auto& [g, c] : o.terms_) add(g, -c);
    return *this;
  }
  BasicRingElement& operator*=(const T& s) {
    if (s == T(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [g, c] : terms_) c *= s;
    return *this;
  }

  friend BasicRingElement operator+(BasicRingElement a, const BasicRingElement& b) { return a += b; }
  friend BasicRingElement operator-(BasicRingElement a, const BasicRingElement& b) { return a -= b; }
  friend BasicRingElement operator-(BasicRingElement a) { return a *= T(-1); }
  friend BasicRingElement operator*(const T& s, BasicRingElement a) { return a *= s; }
  friend bool operator==(const BasicRingElement& a, const BasicRingElement& b) {
    return a.spec_ == b.spec_ && a.terms_ == b.terms_;
  }

 private:
  GroupSpec spec_;
  Terms terms_;
};

using RingElement = BasicRingElement<double>;
using ExactRingElement = BasicRingElement<Rational>;

template <class T>
BasicRingElement<T> convolve(const BasicRingElement<T>& a, const BasicRingElement<T>& b) {
  require_same(a.spec(), b.spec());
  const GroupSpec& spec = a.spec();
  std::map<Element, T> acc;
  for (const auto& [x, ax] : a.terms()) {
    for (const auto& [y, by] : b.terms()) acc[spec.multiply(x, y)] += ax * by;
  }
  BasicRingElement<T> out(spec);
  for (const auto& [g, c] : acc) out.set(g, c);
  return out;
}

template <class T>
BasicRingElement<T> star(const BasicRingElement<T>& a) {
  BasicRingElement<T> out(a.spec());
  for (const auto& [g, c] : a.terms()) out.set(a.spec().inverse(g), c);
  return out;
}

// (rho(g) a)(h) = a(h g).
template <class T>
BasicRingElement<T> translate_right(const BasicRingElement<T>& a, const Element& g) {
  const Element gi = a.spec().inverse(g);
  BasicRingElement<T> out(a.spec());
  for (const auto& [x, c] : a.terms()) out.set(a.spec().multiply(x, gi), c);
  return out;
}

// (g a)(h) = a(g^-1 h).
template <class T>
BasicRingElement<T> translate_left(const BasicRingElement<T>& a, const Element& g) {
  BasicRingElement<T> out(a.spec());
  for (const auto& [x, c] : a.terms()) out.set(a.spec().multiply(g, x), c);
  return out;
}

template <class T>
double l2_norm_sq(const BasicRingElement<T>& a) {
  double s = 0.0;
  for (const auto& [g, c] : a.terms()) {
    const double v = to_double(c);
    s += v * v;
  }
  return s;
}

template <class T>
double l2_norm(const BasicRingElement<T>& a) {
  return std::sqrt(l2_norm_sq(a));
}

template <class T>
int support_radius(const BasicRingElement<T>& a) {
  int r = 0;
  for (const auto& [g, c] : a.terms()) r = std::max(r, max_norm(a.spec(), g));
  return r;
}

// An m x k matrix over the group ring, stored row-major.
template <class T>
class BasicRingMatrix {
 public:
  BasicRingMatrix(GroupSpec spec, int rows, int cols)
      : spec_(std::move(spec)), rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw DimensionMismatch("matrix dimensions must be positive");
    entries_.assign(static_cast<std::size_t>(rows) * cols, BasicRingElement<T>(spec_));
  }

  // A 1 x 1 matrix holding a.
  explicit BasicRingMatrix(const BasicRingElement<T>& a) : BasicRingMatrix(a.spec(), 1, 1) {
    entries_[0] = a;
  }

  // delta_identity tensor id_n.
  static BasicRingMatrix identity(const GroupSpec& spec, int n) {
    BasicRingMatrix out(spec, n, n);
    for (int i = 0; i < n; ++i) out.at(i, i).add(spec.identity(), T(1));
    return out;
  }

  const GroupSpec& spec() const { return spec_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  BasicRingElement<T>& at(int i, int j) { return entries_.at(static_cast<std::size_t>(i) * cols_ + j); }
  const BasicRingElement<T>& at(int i, int j) const {
    return entries_.at(static_cast<std::size_t>(i) * cols_ + j);
  }
  void set(int i, int j, BasicRingElement<T> a) {
    require_same(spec_, a.spec());
    at(i, j) = std::move(a);
  }

  BasicRingMatrix& operator+=(const BasicRingMatrix& o) {
    check_shape(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    return *this;
  }
  BasicRingMatrix& operator-=(const BasicRingMatrix& o) {
    check_shape(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    return *this;
  }
  BasicRingMatrix& operator*=(const T& s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }

  friend BasicRingMatrix operator+(BasicRingMatrix a, const BasicRingMatrix& b) { return a += b; }
  friend BasicRingMatrix operator-(BasicRingMatrix a, const BasicRingMatrix& b) { return a -= b; }
  friend BasicRingMatrix operator*(const T& s, BasicRingMatrix a) { return a *= s; }
  friend bool operator==(const BasicRingMatrix& a, const BasicRingMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  void check_shape(const BasicRingMatrix& o) const {
    require_same(spec_, o.spec_);
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix shapes differ");
  }

  GroupSpec spec_;
  int rows_;
  int cols_;
  std::vector<BasicRingElement<T>> entries_;
};

using RingMatrix = BasicRingMatrix<double>;
using ExactRingMatrix = BasicRingMatrix<Rational>;

// A finitely supported map G -> T^k, stored as k component ring elements.
template <class T>
class BasicVector {
 public:
  BasicVector(GroupSpec spec, int components) : spec_(std::move(spec)) {
    if (components < 1) throw DimensionMismatch("vector needs at least one component");
    comps_.assign(components, BasicRingElement<T>(spec_));
  }
  explicit BasicVector(std::vector<BasicRingElement<T>> comps) : spec_(comps.at(0).spec()), comps_(std::move(comps)) {
    for (const auto& c : comps_) require_same(spec_, c.spec());
  }

  const GroupSpec& spec() const { return spec_; }
  int components() const { return static_cast<int>(comps_.size()); }
  BasicRingElement<T>& operator[](int l) { return comps_.at(l); }
  const BasicRingElement<T>& operator[](int l) const { return comps_.at(l); }

  bool is_zero() const {
    for (const auto& c : comps_)
      if (!c.is_zero()) return false;
    return true;
  }

  BasicVector& operator+=(const BasicVector& o) {
    check_shape(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  BasicVector& operator-=(const BasicVector& o) {
    check_shape(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  BasicVector& operator*=(const T& s) {
    for (auto& c : comps_) c *= s;
    return *this;
  }
  friend BasicVector operator+(BasicVector a, const BasicVector& b) { return a += b; }
  friend BasicVector operator-(BasicVector a, const BasicVector& b) { return a -= b; }
  friend BasicVector operator-(BasicVector a) { return a *= T(-1); }
  friend bool operator==(const BasicVector& a, const BasicVector& b) { return a.comps_ == b.comps_; }

 private:
  void check_shape(const BasicVector& o) const {
    require_same(spec_, o.spec_);
    if (comps_.size() != o.comps_.size()) throw DimensionMismatch("vector component counts differ");
  }

  GroupSpec spec_;
  std::vector<BasicRingElement<T>> comps_;
};

using VectorOverG = BasicVector<double>;
using ExactVector = BasicVector<Rational>;

template <class T>
BasicRingMatrix<T> star(const BasicRingMatrix<T>& a) {
  BasicRingMatrix<T> out(a.spec(), a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(j, i) = star(a.at(i, j));
  return out;
}

// (ab)_ij = sum_l a_il b_lj with entrywise convolution.
template <class T>
BasicRingMatrix<T> mat_product(const BasicRingMatrix<T>& a, const BasicRingMatrix<T>& b) {
  require_same(a.spec(), b.spec());
  if (a.cols() != b.rows()) throw DimensionMismatch("inner dimensions differ");
  BasicRingMatrix<T> out(a.spec(), a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      for (int l = 0; l < a.cols(); ++l) out.at(i, j) += convolve(a.at(i, l), b.at(l, j));
  return out;
}

template <class T>
BasicRingMatrix<T> mat_product_left(const BasicRingMatrix<T>& f, const BasicRingMatrix<T>& xi) {
  return mat_product(f, xi);
}
template <class T>
BasicRingMatrix<T> mat_product_right(const BasicRingMatrix<T>& xi, const BasicRingMatrix<T>& f) {
  return mat_product(xi, f);
}

// (r(xi) zeta)(g)(j) = sum_l sum_h zeta(h)(l) xi_lj(h^-1 g), xi of size k x m.
template <class T>
BasicVector<T> right_apply(const BasicRingMatrix<T>& xi, const BasicVector<T>& zeta) {
  require_same(xi.spec(), zeta.spec());
  if (xi.rows() != zeta.components()) throw DimensionMismatch("right_apply: rows of xi must match components");
  BasicVector<T> out(xi.spec(), xi.cols());
  for (int j = 0; j < xi.cols(); ++j)
    for (int l = 0; l < xi.rows(); ++l) out[j] += convolve(zeta[l], xi.at(l, j));
  return out;
}

// (lambda(xi) zeta)(g)(j) = sum_l sum_h xi_jl(h) zeta(h^-1 g)(l), xi of size m x k.
template <class T>
BasicVector<T> left_apply(const BasicRingMatrix<T>& xi, const BasicVector<T>& zeta) {
  require_same(xi.spec(), zeta.spec());
  if (xi.cols() != zeta.components()) throw DimensionMismatch("left_apply: cols of xi must match components");
  BasicVector<T> out(xi.spec(), xi.rows());
  for (int j = 0; j < xi.rows(); ++j)
    for (int l = 0; l < xi.cols(); ++l) out[j] += convolve(xi.at(j, l), zeta[l]);
  return out;
}

template <class T>
double l2_norm(const BasicRingMatrix<T>& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s += l2_norm_sq(a.at(i, j));
  return std::sqrt(s);
}

template <class T>
double l2_norm(const BasicVector<T>& v) {
  double s = 0.0;
  for (int l = 0; l < v.components(); ++l) s += l2_norm_sq(v[l]);
  return std::sqrt(s);
}

template <class T>
int support_radius(const BasicRingMatrix<T>& a) {
  int r = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r = std::max(r, support_radius(a.at(i, j)));
  return r;
}

// Largest distance of a coefficient to the nearest integer.
inline double max_frac_deviation(const VectorOverG& v) {
  double d = 0.0;
  for (int l = 0; l < v.components(); ++l)
    for (const auto& [g, c] : v[l].terms()) d = std::max(d, frac_distance(c));
  return d;
}

inline Rational max_frac_deviation(const ExactVector& v) {
  Rational d = 0;
  for (int l = 0; l < v.components(); ++l)
    for (const auto& [g, c] : v[l].terms()) {
      const Rational f = frac_distance_exact(c);
      if (f > d) d = f;
    }
  return d;
}

RingElement to_float(const ExactRingElement& a);
RingMatrix to_float(const ExactRingMatrix& a);
VectorOverG to_float(const ExactVector& a);

// True when every coefficient is an integer.
bool is_integral(const RingElement& a);
bool is_integral(const VectorOverG& v);

// Views a 1 x m (or m x 1) matrix as a vector with m components.
template <class T>
BasicVector<T> as_vector(const BasicRingMatrix<T>& a) {
  std::vector<BasicRingElement<T>> comps;
  if (a.rows() == 1) {
    for (int j = 0; j < a.cols(); ++j) comps.push_back(a.at(0, j));
  } else if (a.cols() == 1) {
    for (int i = 0; i < a.rows(); ++i) comps.push_back(a.at(i, 0));
  } else {
    throw DimensionMismatch("expected a row or column, got a matrix");
  }
  return BasicVector<T>(std::move(comps));
}

}  // namespace algact
