#pragma once

#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tempered/fields.hpp"

namespace tempered {

using Exponent = std::vector<int>;

// Degree reported for the zero polynomial.
inline constexpr int kDegreeMinusInfinity = std::numeric_limits<int>::min();

// Sparse polynomial with exact rational coefficients in variables x0..x{m-1}.
// Terms are kept in lexicographic exponent order; zero coefficients are never
// stored.
class MultiPoly {
 public:
  explicit MultiPoly(int nvars = 0) : m_(nvars) {}

  static MultiPoly constant(int nvars, const Rational& c);
  static MultiPoly variable(int nvars, int index);
  static MultiPoly monomial(int nvars, Exponent exponent, const Rational& c);

  int nvars() const { return m_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_homogeneous() const;
  const std::map<Exponent, Rational>& terms() const { return terms_; }
  Rational coefficient(const Exponent& e) const;
  Rational constant_term() const { return coefficient(Exponent(m_, 0)); }

  // Sum of the terms of total degree e.
  MultiPoly homogeneous_part(int e) const;
  // Same polynomial viewed in more variables (appended, unused).
  MultiPoly extended(int nvars) const;

  void add_term(const Exponent& e, const Rational& c);

  MultiPoly& operator+=(const MultiPoly& g);
  MultiPoly& operator-=(const MultiPoly& g);
  MultiPoly& operator*=(const Rational& c);
  friend MultiPoly operator+(MultiPoly f, const MultiPoly& g) { return f += g; }
  friend MultiPoly operator-(MultiPoly f, const MultiPoly& g) { return f -= g; }
  friend MultiPoly operator-(const MultiPoly& f);
  friend MultiPoly operator*(const MultiPoly& f, const MultiPoly& g);
  friend MultiPoly operator*(MultiPoly f, const Rational& c) { return f *= c; }
  friend MultiPoly operator*(const Rational& c, MultiPoly f) { return f *= c; }
  friend bool operator==(const MultiPoly& f, const MultiPoly& g) {
    return f.m_ == g.m_ && f.terms_ == g.terms_;
  }
  MultiPoly pow(int e) const;

  Rational evaluate(const std::vector<Rational>& x) const;
  std::string to_string() const;

 private:
  int m_;
  std::map<Exponent, Rational> terms_;
};

// r component polynomials in a common set of m variables.
struct PolyMap {
  std::vector<MultiPoly> components;

  PolyMap() = default;
  explicit PolyMap(std::vector<MultiPoly> comps);

  int nvars() const { return components.empty() ? 0 : components[0].nvars(); }
  int rank() const { return static_cast<int>(components.size()); }
  std::vector<int> degrees() const;
  // D = product of the component degrees.
  long bezout() const;
  // Same map with variables permuted: new variable perm[i] is old variable i.
  PolyMap permuted(const std::vector<int>& perm) const;
  std::string to_string() const;
};

// Strictly increasing variable indices (0-based) solved for on a chart.
using ChartIndex = std::vector<int>;

// All r-subsets of {0..m-1} in lexicographic order.
std::vector<ChartIndex> all_charts(int m, int r);
// Indices not in J, increasing.
std::vector<int> chart_complement(const ChartIndex& j, int m);
std::string chart_to_string(const ChartIndex& j);

MultiPoly parse_poly(std::string_view text, int m);
PolyMap parse_poly_map(const std::vector<std::string>& texts, int m);

// Formal derivative. With characteristic p > 0, terms whose exponent in
// x_i is divisible by p are dropped.
MultiPoly partial(const MultiPoly& f, int i, int characteristic = 0);
// Hasse derivative: sum of binom(a, beta) c x^{a-beta}.
MultiPoly hasse_derivative(const MultiPoly& f, const Exponent& beta);
// Cofactor expansion; r is small.
MultiPoly poly_determinant(const std::vector<std::vector<MultiPoly>>& a, int nvars);
MultiPoly jacobian_minor(const PolyMap& F, const ChartIndex& j,
                         int characteristic = 0);

inline constexpr long kDefaultChartCap = 10000;
std::vector<std::pair<ChartIndex, MultiPoly>> generalized_gradient(
    const PolyMap& F, int characteristic = 0, long cap = kDefaultChartCap);

inline constexpr std::size_t kDefaultTermCap = 200000;
MultiPoly compose(const MultiPoly& f, const std::vector<MultiPoly>& subs,
                  std::size_t term_cap = kDefaultTermCap);
// sum_i x_i d_i f - deg(f) f.
MultiPoly euler_residual(const MultiPoly& f);

// ---------------------------------------------------------------------------
// Backend-compiled polynomial: coefficients pushed into a field once.

template <class Field>
class CompiledPoly {
 public:
  using Scalar = typename Field::Scalar;

  struct Term {
    Exponent exponent;
    Scalar coefficient;
  };

  CompiledPoly() = default;

  // Variables with index >= f.nvars() - params.size() are replaced by the
  // given scalars, so Laurent coefficients such as t^k can enter as values.
  CompiledPoly(const Field& k, const MultiPoly& f,
               const std::vector<Scalar>& params = {})
      : m_(f.nvars() - static_cast<int>(params.size())) {
    std::map<Exponent, Scalar> folded;
    for (const auto& [e, c] : f.terms()) {
      Scalar coeff = k.from_rational(c);
      for (std::size_t j = 0; j < params.size(); ++j)
        for (int rep = 0; rep < e[m_ + j]; ++rep) coeff = coeff * params[j];
      Exponent x_part(e.begin(), e.begin() + m_);
      auto it = folded.find(x_part);
      if (it == folded.end()) folded.emplace(std::move(x_part), coeff);
      else it->second = it->second + coeff;
    }
    for (auto& [e, c] : folded)
      if (!k.is_zero(c)) terms_.push_back({e, c});
    finish();
  }

  int nvars() const { return m_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Scalar eval(const Field& k, const std::vector<Scalar>& x) const {
    if (static_cast<int>(x.size()) < m_)
      throw std::invalid_argument("CompiledPoly::eval: too few coordinates");
    // Powers of each coordinate up to the largest exponent used.
    std::vector<std::vector<Scalar>> powers(m_);
    for (int i = 0; i < m_; ++i) {
      powers[i].reserve(max_exp_[i] + 1);
      powers[i].push_back(k.one());
      for (int e = 1; e <= max_exp_[i]; ++e)
        powers[i].push_back(powers[i].back() * x[i]);
    }
    Scalar acc = k.zero();
    for (const auto& t : terms_) {
      Scalar v = t.coefficient;
      for (int i = 0; i < m_; ++i)
        if (t.exponent[i] != 0) v = v * powers[i][t.exponent[i]];
      acc = acc + v;
    }
    return acc;
  }

  // G(u) = F(pi^{-t} u).
  CompiledPoly rescaled(const Field& k, int t) const {
    CompiledPoly g = *this;
    for (auto& term : g.terms_) {
      int deg = 0;
      for (int a : term.exponent) deg += a;
      term.coefficient = term.coefficient * k.uniformizer_power(-t * deg);
    }
    return g;
  }

  CompiledPoly scaled(const Scalar& s) const {
    CompiledPoly g = *this;
    for (auto& term : g.terms_) term.coefficient = term.coefficient * s;
    return g;
  }

  // Minimum coefficient valuation (ultrametric backends).
  int min_coefficient_valuation(const Field& k) const {
    int best = kInfiniteValuation;
    for (const auto& t : terms_) best = std::min(best, k.valuation(t.coefficient));
    return best;
  }

 private:
  void finish() {
    max_exp_.assign(m_, 0);
    for (const auto& t : terms_)
      for (int i = 0; i < m_; ++i)
        max_exp_[i] = std::max(max_exp_[i], t.exponent[i]);
  }

  int m_ = 0;
  std::vector<Term> terms_;
  std::vector<int> max_exp_;
};

template <class Field>
typename Field::Scalar eval(const Field& k, const MultiPoly& f,
                            const std::vector<typename Field::Scalar>& x) {
  return CompiledPoly<Field>(k, f).eval(k, x);
}

}  // namespace tempered
