#include <sstream>

#include "tempered/fields.hpp"
#include "tempered/fp_poly.hpp"

namespace tempered {

namespace {

fp::Poly digits_to_poly(long index, long p, int e) {
  fp::Poly f(e, 0);
  for (int i = 0; i < e; ++i) {
    f[i] = index % p;
    index /= p;
  }
  return fp::trim(std::move(f));
}

long poly_to_digits(const fp::Poly& f, long p) {
  long index = 0;
  for (std::size_t i = f.size(); i-- > 0;) index = index * p + f[i];
  return index;
}

// First monic irreducible of degree e in lexicographic order of the
// lower coefficients.
fp::Poly find_irreducible(long p, int e) {
  long count = 1;
  for (int i = 0; i < e; ++i) count *= p;
  for (long lower = 0; lower < count; ++lower) {
    fp::Poly f = digits_to_poly(lower, p, e);
    f.resize(e + 1, 0);
    f[e] = 1;
    if (fp::is_irreducible(f, p)) return f;
  }
  throw std::logic_error("no irreducible polynomial found");
}

}  // namespace

std::shared_ptr<const FiniteFieldTables> FiniteFieldTables::make(long p, int e) {
  auto t = std::make_shared<FiniteFieldTables>();
  t->p = p;
  t->e = e;
  t->q = 1;
  for (int i = 0; i < e; ++i) t->q *= p;
  const long q = t->q;
  t->modulus = e == 1 ? fp::Poly{0, 1} : find_irreducible(p, e);
  t->add.assign(q * q, 0);
  t->mul.assign(q * q, 0);
  t->neg.assign(q, 0);
  t->inv.assign(q, 0);
  for (long a = 0; a < q; ++a) {
    fp::Poly fa = digits_to_poly(a, p, e);
    t->neg[a] = static_cast<int>(poly_to_digits(fp::sub({}, fa, p), p));
    for (long b = 0; b < q; ++b) {
      fp::Poly fb = digits_to_poly(b, p, e);
      t->add[a * q + b] = static_cast<int>(poly_to_digits(fp::add(fa, fb, p), p));
      fp::Poly prod = fp::rem(fp::mul(fa, fb, p), t->modulus, p);
      t->mul[a * q + b] = static_cast<int>(poly_to_digits(prod, p));
    }
  }
  for (long a = 1; a < q; ++a)
    for (long b = 1; b < q; ++b)
      if (t->mul[a * q + b] == 1) t->inv[a] = static_cast<int>(b);
  return t;
}

// ---------------------------------------------------------------------------
// LaurentScalar

LaurentScalar LaurentScalar::exact_zero(std::shared_ptr<const FiniteFieldTables> t) {
  LaurentScalar z;
  z.tables_ = std::move(t);
  return z;
}

LaurentScalar LaurentScalar::zero_to(std::shared_ptr<const FiniteFieldTables> t,
                                     int absolute_precision) {
  LaurentScalar z;
  z.tables_ = std::move(t);
  z.val_ = std::min(absolute_precision, kInfiniteValuation);
  return z;
}

LaurentScalar LaurentScalar::from_coefficients(
    std::shared_ptr<const FiniteFieldTables> t, int v, std::vector<int> c) {
  if (c.empty()) return zero_to(std::move(t), v);
  if (c.front() == 0)
    throw std::invalid_argument("leading Laurent coefficient must be nonzero");
  LaurentScalar s;
  s.tables_ = std::move(t);
  s.val_ = v;
  s.coeffs_ = std::move(c);
  return s;
}

LaurentScalar LaurentScalar::normalized(std::shared_ptr<const FiniteFieldTables> t,
                                        int v, std::vector<int> c, int absprec) {
  std::size_t first = 0;
  while (first < c.size() && c[first] == 0) ++first;
  if (first == c.size()) return zero_to(std::move(t), absprec);
  LaurentScalar s;
  s.tables_ = std::move(t);
  s.val_ = v + static_cast<int>(first);
  s.coeffs_.assign(c.begin() + static_cast<std::ptrdiff_t>(first), c.end());
  return s;
}

int LaurentScalar::coefficient(int k) const {
  if (is_zero() || k < val_ || k >= val_ + precision()) return 0;
  return coeffs_[k - val_];
}

LaurentScalar LaurentScalar::with_precision(int precision) const {
  if (is_zero()) return *this;
  LaurentScalar s = *this;
  s.coeffs_.resize(precision, 0);
  return s;
}

LaurentScalar LaurentScalar::truncated_absolute(int absprec) const {
  if (is_zero()) return zero_to(tables_, std::min(val_, absprec));
  if (absprec <= val_) return zero_to(tables_, absprec);
  int keep = std::min(precision(), absprec - val_);
  return with_precision(keep);
}

static const std::shared_ptr<const FiniteFieldTables>& common_tables(
    const LaurentScalar& a, const LaurentScalar& b) {
  if (!a.tables_ptr()) return b.tables_ptr();
  if (b.tables_ptr() && a.tables_ptr()->q != b.tables_ptr()->q)
    throw BackendMismatch("Laurent operands over different residue fields");
  return a.tables_ptr();
}

LaurentScalar operator+(const LaurentScalar& a, const LaurentScalar& b) {
  const auto& t = common_tables(a, b);
  const int absprec = std::min(a.absolute_precision(), b.absolute_precision());
  const int vmin = std::min(a.valuation(), b.valuation());
  if (absprec <= vmin) return LaurentScalar::zero_to(t, absprec);
  std::vector<int> c(absprec - vmin);
  for (std::size_t k = 0; k < c.size(); ++k) {
    int deg = vmin + static_cast<int>(k);
    c[k] = t->sum(a.coefficient(deg), b.coefficient(deg));
  }
  return LaurentScalar::normalized(t, vmin, std::move(c), absprec);
}

LaurentScalar operator-(const LaurentScalar& a) {
  if (a.is_zero()) return a;
  LaurentScalar r = a;
  for (auto& c : r.coeffs_) c = a.tables_->neg[c];
  return r;
}

LaurentScalar operator-(const LaurentScalar& a, const LaurentScalar& b) {
  return a + (-b);
}

static int sat_add(int a, int b) {
  if (a >= kInfiniteValuation || b >= kInfiniteValuation) return kInfiniteValuation;
  return a + b;
}

LaurentScalar operator*(const LaurentScalar& a, const LaurentScalar& b) {
  const auto& t = common_tables(a, b);
  if (a.is_zero() || b.is_zero()) {
    int abs_a = a.is_zero() ? sat_add(a.val_, b.val_) : kInfiniteValuation;
    int abs_b = b.is_zero() ? sat_add(b.val_, a.val_) : kInfiniteValuation;
    return LaurentScalar::zero_to(t, std::min(abs_a, abs_b));
  }
  const int prec = std::min(a.precision(), b.precision());
  std::vector<int> c(prec, 0);
  for (int i = 0; i < prec; ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (int j = 0; i + j < prec; ++j)
      c[i + j] = t->sum(c[i + j], t->product(a.coeffs_[i], b.coeffs_[j]));
  }
  LaurentScalar r;
  r.tables_ = t;
  r.val_ = a.val_ + b.val_;
  r.coeffs_ = std::move(c);
  return r;
}

LaurentScalar operator/(const LaurentScalar& a, const LaurentScalar& b) {
  const auto& t = common_tables(a, b);
  if (b.is_exact_zero()) throw DivisionByZero("Laurent division by zero");
  if (b.is_zero())
    throw PrecisionExhausted("divisor indistinguishable from zero");
  if (a.is_zero()) {
    if (a.is_exact_zero()) return LaurentScalar::exact_zero(t);
    return LaurentScalar::zero_to(t, a.val_ - b.val_);
  }
  const int prec = std::min(a.precision(), b.precision());
  // Power series inverse of the unit part of b.
  std::vector<int> inv(prec, 0);
  const int lead_inv = t->inv[b.coeffs_[0]];
  inv[0] = lead_inv;
  for (int k = 1; k < prec; ++k) {
    int acc = 0;
    for (int j = 1; j <= k; ++j)
      acc = t->sum(acc, t->product(b.coeffs_[j], inv[k - j]));
    inv[k] = t->product(t->neg[acc], lead_inv);
  }
  LaurentScalar unit_inv;
  unit_inv.tables_ = t;
  unit_inv.val_ = -b.val_;
  unit_inv.coeffs_ = std::move(inv);
  LaurentScalar lhs = a.with_precision(prec);
  return lhs * unit_inv;
}

std::string LaurentScalar::to_string() const {
  if (is_exact_zero()) return "0";
  if (is_zero()) return "O(t^" + std::to_string(val_) + ")";
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k < precision(); ++k) {
    if (coeffs_[k] == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << coeffs_[k] << "*t^" << (val_ + k);
  }
  os << " + O(t^" << absolute_precision() << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// LaurentField

LaurentField::LaurentField(long p, int precision, int degree)
    : precision_(precision) {
  Integer pp(p);
  if (p < 2 || mpz_probab_prime_p(pp.get_mpz_t(), 25) == 0)
    throw std::invalid_argument("characteristic must be prime");
  if (precision < 1) throw std::invalid_argument("precision must be positive");
  if (degree < 1) throw std::invalid_argument("residue degree must be >= 1");
  tables_ = FiniteFieldTables::make(p, degree);
}

std::string LaurentField::describe() const {
  std::string s = "laurent:p=" + std::to_string(tables_->p);
  if (tables_->e != 1) s += ",e=" + std::to_string(tables_->e);
  return s + ",N=" + std::to_string(precision_);
}

LaurentField LaurentField::with_working_precision(int precision) const {
  LaurentField k = *this;
  k.precision_ = precision;
  return k;
}

LaurentScalar LaurentField::constant(int element) const {
  if (element == 0) return zero();
  std::vector<int> c(precision_, 0);
  c[0] = element;
  return LaurentScalar::from_coefficients(tables_, 0, std::move(c));
}

LaurentScalar LaurentField::from_integer(const Integer& n) const {
  Integer r = n % tables_->p;
  if (r < 0) r += tables_->p;
  return constant(static_cast<int>(r.get_si()));
}

LaurentScalar LaurentField::from_rational(const Rational& x) const {
  const long p = tables_->p;
  Integer den = x.get_den() % p;
  if (den == 0)
    throw DivisionByZero("denominator divisible by the characteristic");
  Integer num = x.get_num() % p;
  if (num < 0) num += p;
  long v = fp::mod(num.get_si() * fp::inverse(den.get_si(), p), p);
  return constant(static_cast<int>(v));
}

LaurentScalar LaurentField::uniformizer_power(int n) const {
  std::vector<int> c(precision_, 0);
  c[0] = 1;
  return LaurentScalar::from_coefficients(tables_, n, std::move(c));
}

std::vector<LaurentScalar> LaurentField::residue_representatives() const {
  std::vector<LaurentScalar> reps;
  for (long k = 0; k < tables_->q; ++k) reps.push_back(constant(static_cast<int>(k)));
  return reps;
}

NormValue LaurentField::norm(const LaurentScalar& x) const {
  if (x.is_zero()) return NormValue::zero_ultrametric(tables_->q);
  return NormValue::ultrametric(tables_->q, Rational(x.valuation()));
}

LaurentScalar LaurentField::from_residue(const Integer& packed, int n) const {
  std::vector<int> c;
  Integer rest = packed;
  int first = -1;
  for (int k = 0; k < n && rest != 0; ++k) {
    Integer digit = rest % tables_->q;
    rest /= tables_->q;
    if (first < 0 && digit == 0) continue;
    if (first < 0) first = k;
    c.push_back(static_cast<int>(digit.get_si()));
  }
  if (first < 0) return zero();
  c.resize(precision_, 0);
  return LaurentScalar::from_coefficients(tables_, first, std::move(c));
}

Integer LaurentField::residue(const LaurentScalar& x, int n) const {
  if (n <= 0) return Integer(0);
  if (x.absolute_precision() < n)
    throw PrecisionExhausted("residue beyond known coefficients");
  if (!x.is_zero() && x.valuation() < 0)
    throw std::domain_error("residue of a non-integral series");
  Integer packed(0);
  for (int k = n - 1; k >= 0; --k) packed = packed * tables_->q + x.coefficient(k);
  return packed;
}

}  // namespace tempered
