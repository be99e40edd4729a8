#include "tempered/forms.hpp"

#include "tempered/fp_poly.hpp"

namespace tempered {

namespace {

fp::Poly reduce_mod_p(const std::vector<Integer>& f, long p) {
  fp::Poly out;
  for (const auto& c : f) {
    Integer r = c % p;
    if (r < 0) r += p;
    out.push_back(r.get_si());
  }
  return fp::trim(std::move(out));
}

bool irreducible_mod_p(const std::vector<Integer>& f, long p) {
  return fp::is_irreducible(reduce_mod_p(f, p), p);
}

ExtensionModel make_model(int p, int r, std::vector<Integer> defining) {
  ExtensionModel model;
  model.p = p;
  model.r = r;
  model.defining = std::move(defining);
  // Coordinates of a^k for k = 0 .. 2r - 2.
  std::vector<std::vector<Rational>> power(2 * r - 1, std::vector<Rational>(r, 0));
  for (int k = 0; k < r; ++k) power[k][k] = 1;
  for (int k = r; k <= 2 * r - 2; ++k) {
    // a^k = a * a^{k-1}; shift, then reduce a^r = -sum c_i a^i.
    const auto& prev = power[k - 1];
    std::vector<Rational> next(r, 0);
    for (int i = 0; i + 1 < r; ++i) next[i + 1] = prev[i];
    const Rational top = prev[r - 1];
    for (int i = 0; i < r; ++i) next[i] -= top * Rational(model.defining[i]);
    power[k] = std::move(next);
  }
  model.structure.assign(r, std::vector<std::vector<Rational>>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) model.structure[i][j] = power[i + j];
  return model;
}

}  // namespace

std::vector<Rational> ExtensionModel::multiply(const std::vector<Rational>& a,
                                               const std::vector<Rational>& b) const {
  std::vector<Rational> out(r, 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (a[i] == 0 || b[j] == 0) continue;
      for (int l = 0; l < r; ++l) out[l] += structure[i][j][l] * a[i] * b[j];
    }
  return out;
}

std::string ExtensionModel::defining_to_string() const {
  MultiPoly f(1);
  for (std::size_t i = 0; i < defining.size(); ++i)
    f.add_term({static_cast<int>(i)}, Rational(defining[i]));
  return f.to_string();
}

ExtensionModel build_extension(int p, int r, long cap) {
  if (r < 1) throw std::invalid_argument("extension degree must be >= 1");
  if (r == 1) return make_model(p, 1, {Integer(0), Integer(1)});
  // Binomials x^r + c.
  for (int step = 1; step <= p; ++step) {
    for (int sign : {-1, 1}) {
      std::vector<Integer> f(r + 1, Integer(0));
      f[0] = sign * step;
      f[r] = 1;
      if (irreducible_mod_p(f, p)) return make_model(p, r, std::move(f));
    }
  }
  Integer count = ipow(p, r);
  if (count > cap)
    throw IrreducibleNotFound("search space p^r = " + count.get_str() +
                              " exceeds the cap");
  long total = count.get_si();
  for (long lower = 0; lower < total; ++lower) {
    std::vector<Integer> f(r + 1, Integer(0));
    long rest = lower;
    for (int i = r - 1; i >= 0; --i) {
      f[i] = rest % p;
      rest /= p;
    }
    f[r] = 1;
    if (irreducible_mod_p(f, p)) return make_model(p, r, std::move(f));
  }
  throw IrreducibleNotFound("no monic irreducible of degree " + std::to_string(r));
}

NormForm norm_form_from_model(ExtensionModel model) {
  const int r = model.r;
  NormForm nf;
  nf.lambda.assign(r, std::vector<MultiPoly>(r, MultiPoly(r)));
  // Column j of lambda(x) is x * e_j = sum_i x_i e_i e_j.
  for (int l = 0; l < r; ++l)
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < r; ++i) {
        const Rational& c = model.structure[i][j][l];
        if (c != 0) nf.lambda[l][j] += MultiPoly::variable(r, i) * c;
      }
  nf.nu = poly_determinant(nf.lambda, r);
  // (adj lambda) e_0: entry l is the cofactor C_{0,l} of lambda.
  for (int l = 0; l < r; ++l) {
    std::vector<std::vector<MultiPoly>> minor;
    for (int row = 0; row < r; ++row) {
      if (row == 0) continue;
      std::vector<MultiPoly> cols;
      for (int col = 0; col < r; ++col)
        if (col != l) cols.push_back(nf.lambda[row][col]);
      minor.push_back(std::move(cols));
    }
    MultiPoly cof = poly_determinant(minor, r);
    if (l % 2 == 1) cof = -cof;
    nf.inverse_numerator.push_back(std::move(cof));
  }
  nf.model = std::move(model);
  return nf;
}

NormForm build_norm_form(int p, int r, long cap) {
  return norm_form_from_model(build_extension(p, r, cap));
}

std::vector<Rational> extension_inverse_exact(const NormForm& nf,
                                              const std::vector<Rational>& x) {
  Rational nu = nf.nu.evaluate(x);
  if (nu == 0) throw ZeroInverse("element has zero norm");
  std::vector<Rational> y;
  for (const auto& g : nf.inverse_numerator) y.push_back(g.evaluate(x) / nu);
  return y;
}

StarPoly star_transform(const MultiPoly& f, const NormForm& nf, std::size_t term_cap) {
  if (f.nvars() != nf.model.r)
    throw std::invalid_argument("star_transform: f must have r variables");
  StarPoly out;
  out.source = f;
  out.degree = std::max(f.degree(), 0);
  const int d = out.degree;
  MultiPoly result(f.nvars());
  std::vector<MultiPoly> nu_powers{MultiPoly::constant(f.nvars(), Rational(1))};
  for (int e = 1; e <= d; ++e) nu_powers.push_back(nu_powers.back() * nf.nu);
  for (int e = 0; e <= d; ++e) {
    MultiPoly part = f.homogeneous_part(e);
    if (part.is_zero()) continue;
    result += compose(part, nf.inverse_numerator, term_cap) * nu_powers[d - e];
    if (result.terms().size() > term_cap)
      throw CombinatorialBlowup("star transform exceeds the term cap");
  }
  out.result = std::move(result);
  return out;
}

}  // namespace tempered
