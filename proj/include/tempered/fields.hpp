#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tempered/errors.hpp"
#include "tempered/rational.hpp"

namespace tempered {

// Value of a norm. Ultrametric norms are q^{-exponent} with an exact rational
// exponent (integral for scalars, rational only after fitting); real norms
// carry a magnitude.
class NormValue {
 public:
  NormValue() = default;  // real zero
  static NormValue zero_ultrametric(long q) { return NormValue(q, 0, true); }
  static NormValue ultrametric(long q, Rational exponent) {
    return NormValue(q, std::move(exponent), false);
  }
  static NormValue real(double magnitude) {
    NormValue n;
    n.q_ = 0;
    n.magnitude_ = magnitude;
    return n;
  }

  bool is_ultrametric() const { return q_ != 0; }
  bool is_zero() const { return is_ultrametric() ? zero_ : magnitude_ == 0.0; }
  long q() const { return q_; }
  const Rational& exponent() const { return exponent_; }
  double magnitude() const { return magnitude_; }

  // log_q of the norm (= -exponent); -inf for zero.
  double log_q() const;
  double to_double() const;
  std::string to_string() const;

  friend bool operator==(const NormValue& a, const NormValue& b);
  friend bool operator<(const NormValue& a, const NormValue& b);
  friend bool operator>(const NormValue& a, const NormValue& b) { return b < a; }
  friend bool operator<=(const NormValue& a, const NormValue& b) { return !(b < a); }
  friend bool operator>=(const NormValue& a, const NormValue& b) { return !(a < b); }

 private:
  NormValue(long q, Rational e, bool zero)
      : q_(q), exponent_(std::move(e)), zero_(zero) {}

  long q_ = 0;
  Rational exponent_;
  bool zero_ = false;
  double magnitude_ = 0.0;
};

// ---------------------------------------------------------------------------
// p-adic numbers

// p^v * u with u a unit known modulo p^prec. A zero carries the absolute
// precision to which it is known; the exact zero has kInfiniteValuation.
class PadicScalar {
 public:
  PadicScalar() = default;

  static PadicScalar exact_zero(int p);
  static PadicScalar zero_to(int p, int absolute_precision);
  static PadicScalar from_integer(int p, int precision, const Integer& n);
  static PadicScalar from_rational(int p, int precision, const Rational& x);
  // p^v * unit, unit reduced modulo p^precision; unit must be coprime to p.
  static PadicScalar from_parts(int p, int v, const Integer& unit, int precision);

  int prime() const { return p_; }
  bool is_zero() const { return prec_ == 0; }
  bool is_exact_zero() const { return is_zero() && val_ >= kInfiniteValuation; }
  // Lower bound for an inexact zero.
  int valuation() const { return val_; }
  int precision() const { return prec_; }
  int absolute_precision() const { return is_zero() ? val_ : val_ + prec_; }
  const Integer& unit() const { return unit_; }

  // The rational p^v * u (the canonical representative of the known digits).
  Rational to_rational() const;
  // Residue in [0, p^k) of an integral scalar; PrecisionExhausted if fewer
  // than k absolute digits are known, std::domain_error if not integral.
  Integer residue(int k) const;
  // Reinterpret the known digits as exact and pad to the given relative
  // precision (or truncate when smaller).
  PadicScalar with_precision(int precision) const;
  // Forget digits beyond the given absolute precision.
  PadicScalar truncated_absolute(int absolute_precision) const;

  friend PadicScalar operator+(const PadicScalar& a, const PadicScalar& b);
  friend PadicScalar operator-(const PadicScalar& a, const PadicScalar& b);
  friend PadicScalar operator*(const PadicScalar& a, const PadicScalar& b);
  friend PadicScalar operator/(const PadicScalar& a, const PadicScalar& b);
  friend PadicScalar operator-(const PadicScalar& a);
  PadicScalar& operator+=(const PadicScalar& b) { return *this = *this + b; }
  PadicScalar& operator-=(const PadicScalar& b) { return *this = *this - b; }
  PadicScalar& operator*=(const PadicScalar& b) { return *this = *this * b; }

  std::string to_string() const;

 private:
  int p_ = 0;
  int val_ = kInfiniteValuation;
  int prec_ = 0;
  Integer unit_;
};

// Cached p^e for small p, e; shared read-only after first use per thread.
const Integer& cached_power(int p, int e);

class PadicField {
 public:
  using Scalar = PadicScalar;
  static constexpr bool is_ultrametric = true;

  PadicField(int p, int precision);

  int p() const { return p_; }
  long q() const { return p_; }
  int characteristic() const { return 0; }
  int precision() const { return precision_; }
  std::string describe() const;

  Scalar zero() const { return Scalar::exact_zero(p_); }
  Scalar one() const { return from_integer(1); }
  Scalar from_integer(const Integer& n) const {
    return Scalar::from_integer(p_, precision_, n);
  }
  Scalar from_rational(const Rational& x) const {
    return Scalar::from_rational(p_, precision_, x);
  }
  // pi^n, exact.
  Scalar uniformizer_power(int n) const;
  // Teichmuller-free digit representatives 0..p-1.
  std::vector<Scalar> residue_representatives() const;
  // Representative of the k-th residue class (0 <= k < q).
  Scalar residue_representative(long k) const { return from_integer(k); }
  // Inverse of residue(): the point whose first n digits are packed.
  Scalar from_residue(const Integer& packed, int /*n*/) const {
    return from_integer(packed);
  }

  int valuation(const Scalar& x) const { return x.valuation(); }
  bool is_zero(const Scalar& x) const { return x.is_zero(); }
  NormValue norm(const Scalar& x) const;
  // Digits 0..n-1 of an integral scalar as an integer in [0, q^n).
  Integer residue(const Scalar& x, int n) const { return x.residue(n); }
  Scalar with_precision(const Scalar& x, int precision) const {
    return x.with_precision(precision);
  }
  PadicField with_working_precision(int precision) const {
    return PadicField(p_, precision);
  }

 private:
  int p_;
  int precision_;
};

// ---------------------------------------------------------------------------
// Truncated Laurent series over F_q

// Addition and multiplication tables for F_q, q = p^e, elements indexed
// 0..q-1 by their coordinates in the basis 1, a, a^2, ... (base-p digits).
struct FiniteFieldTables {
  long p = 0;
  int e = 1;
  long q = 0;
  std::vector<long> modulus;  // monic irreducible of degree e over F_p
  std::vector<int> add, mul, neg, inv;

  static std::shared_ptr<const FiniteFieldTables> make(long p, int e);
  int sum(int a, int b) const { return add[a * q + b]; }
  int product(int a, int b) const { return mul[a * q + b]; }
};

class LaurentScalar {
 public:
  LaurentScalar() = default;

  static LaurentScalar exact_zero(std::shared_ptr<const FiniteFieldTables> t);
  static LaurentScalar zero_to(std::shared_ptr<const FiniteFieldTables> t,
                               int absolute_precision);
  // t^v * (c_0 + c_1 t + ...), c_0 != 0 required.
  static LaurentScalar from_coefficients(
      std::shared_ptr<const FiniteFieldTables> t, int v, std::vector<int> c);

  const FiniteFieldTables& tables() const { return *tables_; }
  const std::shared_ptr<const FiniteFieldTables>& tables_ptr() const {
    return tables_;
  }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_exact_zero() const { return is_zero() && val_ >= kInfiniteValuation; }
  int valuation() const { return val_; }
  int precision() const { return static_cast<int>(coeffs_.size()); }
  int absolute_precision() const {
    return is_zero() ? val_ : val_ + precision();
  }
  const std::vector<int>& coefficients() const { return coeffs_; }
  // Coefficient of t^k (0 outside the known window below absprec).
  int coefficient(int k) const;

  LaurentScalar with_precision(int precision) const;
  LaurentScalar truncated_absolute(int absolute_precision) const;

  friend LaurentScalar operator+(const LaurentScalar& a, const LaurentScalar& b);
  friend LaurentScalar operator-(const LaurentScalar& a, const LaurentScalar& b);
  friend LaurentScalar operator*(const LaurentScalar& a, const LaurentScalar& b);
  friend LaurentScalar operator/(const LaurentScalar& a, const LaurentScalar& b);
  friend LaurentScalar operator-(const LaurentScalar& a);
  LaurentScalar& operator+=(const LaurentScalar& b) { return *this = *this + b; }
  LaurentScalar& operator-=(const LaurentScalar& b) { return *this = *this - b; }
  LaurentScalar& operator*=(const LaurentScalar& b) { return *this = *this * b; }

  std::string to_string() const;

 private:
  static LaurentScalar normalized(std::shared_ptr<const FiniteFieldTables> t,
                                  int v, std::vector<int> c, int absprec);

  std::shared_ptr<const FiniteFieldTables> tables_;
  int val_ = kInfiniteValuation;
  std::vector<int> coeffs_;
};

class LaurentField {
 public:
  using Scalar = LaurentScalar;
  static constexpr bool is_ultrametric = true;

  LaurentField(long p, int precision, int degree = 1);

  long p() const { return tables_->p; }
  long q() const { return tables_->q; }
  int characteristic() const { return static_cast<int>(tables_->p); }
  int precision() const { return precision_; }
  std::string describe() const;

  Scalar zero() const { return Scalar::exact_zero(tables_); }
  Scalar one() const { return constant(1); }
  // Element of F_q (by table index) as a constant series.
  Scalar constant(int element) const;
  Scalar from_integer(const Integer& n) const;
  // Image of a rational in F_p; DivisionByZero when p divides the denominator.
  Scalar from_rational(const Rational& x) const;
  Scalar uniformizer_power(int n) const;
  std::vector<Scalar> residue_representatives() const;
  Scalar residue_representative(long k) const {
    return constant(static_cast<int>(k));
  }
  Scalar from_residue(const Integer& packed, int n) const;

  int valuation(const Scalar& x) const { return x.valuation(); }
  bool is_zero(const Scalar& x) const { return x.is_zero(); }
  NormValue norm(const Scalar& x) const;
  // Coefficients of t^0..t^{n-1}, packed base q.
  Integer residue(const Scalar& x, int n) const;
  Scalar with_precision(const Scalar& x, int precision) const {
    return x.with_precision(precision);
  }
  LaurentField with_working_precision(int precision) const;
  const std::shared_ptr<const FiniteFieldTables>& tables() const {
    return tables_;
  }

 private:
  std::shared_ptr<const FiniteFieldTables> tables_;
  int precision_;
};

// ---------------------------------------------------------------------------
// Reals

class RealField {
 public:
  using Scalar = double;
  static constexpr bool is_ultrametric = false;

  int characteristic() const { return 0; }
  std::string describe() const { return "real"; }
  Scalar zero() const { return 0.0; }
  Scalar one() const { return 1.0; }
  Scalar from_integer(const Integer& n) const { return n.get_d(); }
  Scalar from_rational(const Rational& x) const { return x.get_d(); }
  bool is_zero(Scalar x) const { return x == 0.0; }
  NormValue norm(Scalar x) const { return NormValue::real(std::fabs(x)); }
};

// ---------------------------------------------------------------------------
// Generic vector and matrix helpers

template <class Field>
using Vec = std::vector<typename Field::Scalar>;

template <class Field>
using Mat = std::vector<std::vector<typename Field::Scalar>>;

template <class Field>
NormValue vec_norm(const Field& k, std::span<const typename Field::Scalar> x) {
  if constexpr (Field::is_ultrametric) {
    NormValue best = NormValue::zero_ultrametric(k.q());
    for (const auto& xi : x) {
      NormValue n = k.norm(xi);
      if (best < n) best = n;
    }
    return best;
  } else {
    double best = 0.0;
    for (double xi : x) best = std::max(best, std::fabs(xi));
    return NormValue::real(best);
  }
}

template <class Field>
NormValue vec_norm(const Field& k, const Vec<Field>& x) {
  return vec_norm(k, std::span<const typename Field::Scalar>(x));
}

// Minimum valuation of a vector over an ultrametric field.
template <class Field>
int min_valuation(const Field& k, std::span<const typename Field::Scalar> x) {
  int best = kInfiniteValuation;
  for (const auto& xi : x) best = std::min(best, k.valuation(xi));
  return best;
}

template <class Field>
Vec<Field> mat_vec(const Field& k, const Mat<Field>& a, const Vec<Field>& x) {
  Vec<Field> out;
  out.reserve(a.size());
  for (const auto& row : a) {
    auto acc = k.zero();
    for (std::size_t j = 0; j < row.size(); ++j) acc = acc + row[j] * x[j];
    out.push_back(acc);
  }
  return out;
}

// Cofactor expansion along the first row.
template <class Field>
typename Field::Scalar determinant(const Field& k, const Mat<Field>& a) {
  const std::size_t n = a.size();
  if (n == 0) return k.one();
  if (n == 1) return a[0][0];
  if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  auto det = k.zero();
  for (std::size_t col = 0; col < n; ++col) {
    Mat<Field> minor;
    minor.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<typename Field::Scalar> row;
      row.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != col) row.push_back(a[i][j]);
      minor.push_back(std::move(row));
    }
    auto term = a[0][col] * determinant(k, minor);
    det = (col % 2 == 0) ? det + term : det - term;
  }
  return det;
}

// Classical adjugate: adj(A) A = det(A) I.
template <class Field>
Mat<Field> adjugate(const Field& k, const Mat<Field>& a) {
  const std::size_t n = a.size();
  Mat<Field> adj(n, Vec<Field>(n, k.zero()));
  if (n == 1) {
    adj[0][0] = k.one();
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Mat<Field> minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        Vec<Field> row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != j) row.push_back(a[r][c]);
        minor.push_back(std::move(row));
      }
      auto d = determinant(k, minor);
      adj[j][i] = ((i + j) % 2 == 0) ? d : k.zero() - d;
    }
  }
  return adj;
}

// Gaussian elimination choosing, in each column, the remaining entry of
// largest norm as pivot.
template <class Field>
Vec<Field> matrix_solve(const Field& k, Mat<Field> a, Vec<Field> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("matrix_solve: size mismatch");
  double real_scale = 0.0;
  if constexpr (!Field::is_ultrametric) {
    for (const auto& row : a)
      for (double v : row) real_scale = std::max(real_scale, std::fabs(v));
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    NormValue best = k.norm(a[col][col]);
    for (std::size_t i = col + 1; i < n; ++i) {
      NormValue cand = k.norm(a[i][col]);
      if (best < cand) {
        best = cand;
        pivot = i;
      }
    }
    bool singular = best.is_zero();
    if constexpr (!Field::is_ultrametric)
      singular = singular || best.magnitude() <= 1e-14 * real_scale;
    if (singular)
      throw SingularAtPrecision("no resolvable pivot in column " +
                                std::to_string(col));
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t i = col + 1; i < n; ++i) {
      auto factor = a[i][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[i][j] = a[i][j] - factor * a[col][j];
      b[i] = b[i] - factor * b[col];
    }
  }
  Vec<Field> x(n, k.zero());
  for (std::size_t i = n; i-- > 0;) {
    auto acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc = acc - a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

}  // namespace tempered
