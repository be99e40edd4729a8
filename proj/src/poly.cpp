#include "tempered/poly.hpp"

#include <numeric>
#include <sstream>

namespace tempered {

MultiPoly MultiPoly::constant(int nvars, const Rational& c) {
  MultiPoly f(nvars);
  f.add_term(Exponent(nvars, 0), c);
  return f;
}

MultiPoly MultiPoly::variable(int nvars, int index) {
  Exponent e(nvars, 0);
  e.at(index) = 1;
  return monomial(nvars, std::move(e), Rational(1));
}

MultiPoly MultiPoly::monomial(int nvars, Exponent exponent, const Rational& c) {
  MultiPoly f(nvars);
  f.add_term(exponent, c);
  return f;
}

static int total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

int MultiPoly::degree() const {
  int d = kDegreeMinusInfinity;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

bool MultiPoly::is_homogeneous() const {
  if (terms_.empty()) return true;
  int d = total_degree(terms_.begin()->first);
  for (const auto& [e, c] : terms_)
    if (total_degree(e) != d) return false;
  return true;
}

Rational MultiPoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

MultiPoly MultiPoly::homogeneous_part(int e) const {
  MultiPoly g(m_);
  for (const auto& [ex, c] : terms_)
    if (total_degree(ex) == e) g.terms_.emplace(ex, c);
  return g;
}

MultiPoly MultiPoly::extended(int nvars) const {
  if (nvars < m_) throw std::invalid_argument("cannot drop variables");
  MultiPoly g(nvars);
  for (const auto& [e, c] : terms_) {
    Exponent ex = e;
    ex.resize(nvars, 0);
    g.terms_.emplace(std::move(ex), c);
  }
  return g;
}

void MultiPoly::add_term(const Exponent& e, const Rational& c) {
  if (static_cast<int>(e.size()) != m_)
    throw std::invalid_argument("exponent length does not match variable count");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

static void check_same_vars(const MultiPoly& f, const MultiPoly& g) {
  if (f.nvars() != g.nvars())
    throw std::invalid_argument("polynomials over different variable counts");
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& g) {
  check_same_vars(*this, g);
  for (const auto& [e, c] : g.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& g) {
  check_same_vars(*this, g);
  for (const auto& [e, c] : g.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coeff] : terms_) coeff *= c;
  return *this;
}

MultiPoly operator-(const MultiPoly& f) { return f * Rational(-1); }

MultiPoly operator*(const MultiPoly& f, const MultiPoly& g) {
  check_same_vars(f, g);
  MultiPoly h(f.nvars());
  Exponent e(f.nvars());
  for (const auto& [ef, cf] : f.terms_)
    for (const auto& [eg, cg] : g.terms_) {
      for (int i = 0; i < f.nvars(); ++i) e[i] = ef[i] + eg[i];
      h.add_term(e, cf * cg);
    }
  return h;
}

MultiPoly MultiPoly::pow(int e) const {
  if (e < 0) throw std::invalid_argument("negative polynomial power");
  MultiPoly result = constant(m_, Rational(1));
  MultiPoly base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

Rational MultiPoly::evaluate(const std::vector<Rational>& x) const {
  if (static_cast<int>(x.size()) != m_)
    throw std::invalid_argument("evaluate: wrong number of coordinates");
  Rational acc(0);
  for (const auto& [e, c] : terms_) {
    Rational v = c;
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < e[i]; ++k) v *= x[i];
    acc += v;
  }
  return acc;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest degree first reads naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool is_const = total_degree(e) == 0;
    bool wrote = false;
    if (mag != 1 || is_const) {
      os << mag.get_str();
      wrote = true;
    }
    for (int i = 0; i < m_; ++i) {
      if (e[i] == 0) continue;
      if (wrote) os << "*";
      os << "x" << i;
      if (e[i] > 1) os << "^" << e[i];
      wrote = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// PolyMap

PolyMap::PolyMap(std::vector<MultiPoly> comps) : components(std::move(comps)) {
  for (const auto& f : components)
    if (f.nvars() != nvars())
      throw std::invalid_argument("PolyMap components disagree on variables");
  if (rank() > nvars())
    throw std::invalid_argument("PolyMap needs r <= m");
}

std::vector<int> PolyMap::degrees() const {
  std::vector<int> d;
  for (const auto& f : components) d.push_back(f.degree());
  return d;
}

long PolyMap::bezout() const {
  long d = 1;
  for (const auto& f : components) d *= std::max(f.degree(), 0);
  return d;
}

PolyMap PolyMap::permuted(const std::vector<int>& perm) const {
  std::vector<MultiPoly> out;
  for (const auto& f : components) {
    MultiPoly g(f.nvars());
    for (const auto& [e, c] : f.terms()) {
      Exponent ne(e.size(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) ne[perm[i]] = e[i];
      g.add_term(ne, c);
    }
    out.push_back(std::move(g));
  }
  return PolyMap(std::move(out));
}

std::string PolyMap::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) s += "; ";
    s += components[i].to_string();
  }
  return s + ")";
}

std::vector<ChartIndex> all_charts(int m, int r) {
  std::vector<ChartIndex> out;
  ChartIndex j(r);
  std::iota(j.begin(), j.end(), 0);
  if (r > m || r < 0) return out;
  while (true) {
    out.push_back(j);
    int i = r - 1;
    while (i >= 0 && j[i] == m - r + i) --i;
    if (i < 0) break;
    ++j[i];
    for (int k = i + 1; k < r; ++k) j[k] = j[k - 1] + 1;
  }
  return out;
}

std::vector<int> chart_complement(const ChartIndex& j, int m) {
  std::vector<int> out;
  std::size_t pos = 0;
  for (int i = 0; i < m; ++i) {
    if (pos < j.size() && j[pos] == i) {
      ++pos;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

std::string chart_to_string(const ChartIndex& j) {
  std::string s = "{";
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(j[i]);
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// Calculus

MultiPoly partial(const MultiPoly& f, int i, int characteristic) {
  if (i < 0 || i >= f.nvars()) throw std::out_of_range("partial: bad variable");
  MultiPoly g(f.nvars());
  for (const auto& [e, c] : f.terms()) {
    if (e[i] == 0) continue;
    if (characteristic > 0 && e[i] % characteristic == 0) continue;
    Exponent ne = e;
    --ne[i];
    g.add_term(ne, c * e[i]);
  }
  return g;
}

static Integer binomial(int n, int k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

MultiPoly hasse_derivative(const MultiPoly& f, const Exponent& beta) {
  MultiPoly g(f.nvars());
  for (const auto& [e, c] : f.terms()) {
    Exponent ne = e;
    Rational coeff = c;
    bool vanishes = false;
    for (int i = 0; i < f.nvars(); ++i) {
      if (e[i] < beta[i]) {
        vanishes = true;
        break;
      }
      coeff *= Rational(binomial(e[i], beta[i]));
      ne[i] -= beta[i];
    }
    if (!vanishes) g.add_term(ne, coeff);
  }
  return g;
}

MultiPoly poly_determinant(const std::vector<std::vector<MultiPoly>>& a,
                           int nvars) {
  const std::size_t n = a.size();
  if (n == 0) return MultiPoly::constant(nvars, Rational(1));
  if (n == 1) return a[0][0];
  MultiPoly det(nvars);
  for (std::size_t col = 0; col < n; ++col) {
    if (a[0][col].is_zero()) continue;
    std::vector<std::vector<MultiPoly>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<MultiPoly> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != col) row.push_back(a[i][j]);
      minor.push_back(std::move(row));
    }
    MultiPoly term = a[0][col] * poly_determinant(minor, nvars);
    if (col % 2 == 0) det += term;
    else det -= term;
  }
  return det;
}

MultiPoly jacobian_minor(const PolyMap& F, const ChartIndex& j,
                         int characteristic) {
  if (static_cast<int>(j.size()) != F.rank())
    throw std::invalid_argument("chart size must equal the number of components");
  std::vector<std::vector<MultiPoly>> a;
  for (const auto& f : F.components) {
    std::vector<MultiPoly> row;
    for (int col : j) row.push_back(partial(f, col, characteristic));
    a.push_back(std::move(row));
  }
  return poly_determinant(a, F.nvars());
}

std::vector<std::pair<ChartIndex, MultiPoly>> generalized_gradient(
    const PolyMap& F, int characteristic, long cap) {
  Integer count = binomial(F.nvars(), F.rank());
  if (count > cap)
    throw CombinatorialBlowup(count.get_str() + " minors exceed the cap of " +
                              std::to_string(cap));
  std::vector<std::pair<ChartIndex, MultiPoly>> out;
  for (auto& j : all_charts(F.nvars(), F.rank()))
    out.emplace_back(j, jacobian_minor(F, j, characteristic));
  return out;
}

MultiPoly compose(const MultiPoly& f, const std::vector<MultiPoly>& subs,
                  std::size_t term_cap) {
  if (static_cast<int>(subs.size()) != f.nvars())
    throw std::invalid_argument("compose: need one substitution per variable");
  const int target = subs.empty() ? 0 : subs[0].nvars();
  for (const auto& s : subs)
    if (s.nvars() != target)
      throw std::invalid_argument("compose: substitutions disagree on variables");
  std::vector<std::vector<MultiPoly>> powers(subs.size());
  auto power = [&](std::size_t i, int e) -> const MultiPoly& {
    auto& pw = powers[i];
    if (pw.empty()) pw.push_back(MultiPoly::constant(target, Rational(1)));
    while (static_cast<int>(pw.size()) <= e) {
      pw.push_back(pw.back() * subs[i]);
      if (pw.back().terms().size() > term_cap)
        throw CombinatorialBlowup("substitution power exceeds the term cap");
    }
    return pw[e];
  };
  MultiPoly result(target);
  for (const auto& [e, c] : f.terms()) {
    MultiPoly term = MultiPoly::constant(target, c);
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (e[i] > 0) term = term * power(i, e[i]);
    result += term;
    if (result.terms().size() > term_cap)
      throw CombinatorialBlowup("composition exceeds the term cap");
  }
  return result;
}

MultiPoly euler_residual(const MultiPoly& f) {
  if (f.is_zero()) return f;
  MultiPoly sum(f.nvars());
  for (int i = 0; i < f.nvars(); ++i)
    sum += MultiPoly::variable(f.nvars(), i) * partial(f, i);
  return sum - f * Rational(f.degree());
}

}  // namespace tempered
