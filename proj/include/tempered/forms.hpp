#pragma once

#include <vector>

#include "tempered/fields.hpp"
#include "tempered/poly.hpp"

namespace tempered {

// Degree-r unramified extension of Q_p in the power basis 1, a, ..., a^{r-1}
// where a is a root of a monic polynomial irreducible mod p.
struct ExtensionModel {
  int p = 0;
  int r = 1;
  std::vector<Integer> defining;  // monic, lowest degree first, length r + 1
  // e_i e_j = sum_k structure[i][j][k] e_k
  std::vector<std::vector<std::vector<Rational>>> structure;

  std::vector<Rational> multiply(const std::vector<Rational>& a,
                                 const std::vector<Rational>& b) const;
  std::string defining_to_string() const;
};

inline constexpr long kDefaultIrreducibleCap = 1000000;

// Binomials x^r + c (c = -1, 1, -2, 2, ...) first, then every monic
// polynomial with coefficients 0..p-1 in lexicographic order.
ExtensionModel build_extension(int p, int r, long cap = kDefaultIrreducibleCap);

// nu(x) = det lambda(x), lambda(x) the matrix of multiplication by x.
struct NormForm {
  ExtensionModel model;
  MultiPoly nu;
  std::vector<std::vector<MultiPoly>> lambda;
  // adj(lambda(x)) e_0, so x^{-1} = inverse_numerator(x) / nu(x).
  std::vector<MultiPoly> inverse_numerator;
};

NormForm build_norm_form(int p, int r, long cap = kDefaultIrreducibleCap);
NormForm norm_form_from_model(ExtensionModel model);

// |nu(x)|^{1/r} with the exact rational exponent val(nu(x)) / r.
template <class Field>
NormValue form_norm(const Field& k, const NormForm& nf, const Vec<Field>& x) {
  static_assert(Field::is_ultrametric, "form_norm needs an ultrametric field");
  auto v = eval(k, nf.nu, x);
  if (k.is_zero(v)) return NormValue::zero_ultrametric(k.q());
  Rational e(k.valuation(v), nf.model.r);
  e.canonicalize();
  return NormValue::ultrametric(k.q(), e);
}

template <class Field>
Vec<Field> extension_multiply(const Field& k, const ExtensionModel& model,
                              const Vec<Field>& a, const Vec<Field>& b) {
  Vec<Field> out(model.r, k.zero());
  for (int i = 0; i < model.r; ++i)
    for (int j = 0; j < model.r; ++j)
      for (int l = 0; l < model.r; ++l) {
        const Rational& c = model.structure[i][j][l];
        if (c != 0) out[l] = out[l] + k.from_rational(c) * a[i] * b[j];
      }
  return out;
}

template <class Field>
Vec<Field> extension_inverse(const Field& k, const NormForm& nf, const Vec<Field>& x) {
  auto nu = eval(k, nf.nu, x);
  if (k.is_zero(nu)) throw ZeroInverse("element has zero norm at working precision");
  Vec<Field> y;
  for (const auto& g : nf.inverse_numerator) y.push_back(eval(k, g, x) / nu);
  return y;
}

std::vector<Rational> extension_inverse_exact(const NormForm& nf,
                                              const std::vector<Rational>& x);

struct StarPoly {
  MultiPoly source;
  int degree = 0;
  MultiPoly result;
};

// f*(x) = f(x^{-1}) nu(x)^d, expanded as sum_e f_e(adj(lambda) e_0) nu^{d-e}.
StarPoly star_transform(const MultiPoly& f, const NormForm& nf,
                        std::size_t term_cap = kDefaultTermCap);

}  // namespace tempered
