#include "tempered/fields.hpp"

#include <limits>
#include <map>
#include <sstream>

namespace tempered {

// ---------------------------------------------------------------------------
// NormValue

double NormValue::log_q() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  if (is_ultrametric()) return -exponent_.get_d();
  return std::log(magnitude_);
}

double NormValue::to_double() const {
  if (!is_ultrametric()) return magnitude_;
  if (zero_) return 0.0;
  return std::pow(static_cast<double>(q_), -exponent_.get_d());
}

std::string NormValue::to_string() const {
  if (!is_ultrametric()) {
    std::ostringstream os;
    os.precision(17);
    os << magnitude_;
    return os.str();
  }
  if (zero_) return "0";
  return std::to_string(q_) + "^" + Rational(-exponent_).get_str();
}

static void check_comparable(const NormValue& a, const NormValue& b) {
  if (a.is_ultrametric() != b.is_ultrametric() ||
      (a.is_ultrametric() && a.q() != b.q()))
    throw BackendMismatch("comparing norms from different backends");
}

bool operator==(const NormValue& a, const NormValue& b) {
  check_comparable(a, b);
  if (!a.is_ultrametric()) return a.magnitude_ == b.magnitude_;
  if (a.zero_ || b.zero_) return a.zero_ == b.zero_;
  return a.exponent_ == b.exponent_;
}

bool operator<(const NormValue& a, const NormValue& b) {
  check_comparable(a, b);
  if (!a.is_ultrametric()) return a.magnitude_ < b.magnitude_;
  if (b.zero_) return false;
  if (a.zero_) return true;
  return a.exponent_ > b.exponent_;
}

// ---------------------------------------------------------------------------
// PadicScalar

const Integer& cached_power(int p, int e) {
  thread_local std::map<int, std::vector<Integer>> cache;
  auto& powers = cache[p];
  if (powers.empty()) powers.emplace_back(1);
  while (static_cast<int>(powers.size()) <= e)
    powers.push_back(powers.back() * p);
  return powers[e];
}

static int saturating_add(int a, int b) {
  if (a >= kInfiniteValuation || b >= kInfiniteValuation)
    return kInfiniteValuation;
  return a + b;
}

PadicScalar PadicScalar::exact_zero(int p) {
  PadicScalar z;
  z.p_ = p;
  return z;
}

PadicScalar PadicScalar::zero_to(int p, int absolute_precision) {
  PadicScalar z;
  z.p_ = p;
  z.val_ = std::min(absolute_precision, kInfiniteValuation);
  return z;
}

PadicScalar PadicScalar::from_parts(int p, int v, const Integer& unit,
                                    int precision) {
  if (precision <= 0) return zero_to(p, v);
  PadicScalar s;
  s.p_ = p;
  s.val_ = v;
  s.prec_ = precision;
  s.unit_ = unit % cached_power(p, precision);
  if (s.unit_ < 0) s.unit_ += cached_power(p, precision);
  if (s.unit_ % p == 0)
    throw std::invalid_argument("PadicScalar unit must be coprime to p");
  return s;
}

PadicScalar PadicScalar::from_integer(int p, int precision, const Integer& n) {
  return from_rational(p, precision, Rational(n));
}

PadicScalar PadicScalar::from_rational(int p, int precision,
                                       const Rational& x) {
  if (x == 0) return exact_zero(p);
  int v = tempered::valuation(x, p);
  Rational y = x;
  if (v > 0) y /= Rational(ipow(p, v));
  if (v < 0) y *= Rational(ipow(p, -v));
  PadicScalar s;
  s.p_ = p;
  s.val_ = v;
  s.prec_ = precision;
  s.unit_ = rational_mod(y, cached_power(p, precision));
  return s;
}

Rational PadicScalar::to_rational() const {
  if (is_zero()) return Rational(0);
  Rational r(unit_);
  if (val_ >= 0) r *= Rational(ipow(p_, val_));
  else r /= Rational(ipow(p_, -val_));
  return r;
}

Integer PadicScalar::residue(int k) const {
  if (k <= 0) return Integer(0);
  if (is_zero()) {
    if (val_ < k) throw PrecisionExhausted("residue beyond known digits");
    return Integer(0);
  }
  if (val_ < 0) throw std::domain_error("residue of a non-integral scalar");
  if (val_ >= k) return Integer(0);
  if (absolute_precision() < k)
    throw PrecisionExhausted("residue beyond known digits");
  return unit_ * cached_power(p_, val_) % cached_power(p_, k);
}

PadicScalar PadicScalar::with_precision(int precision) const {
  if (is_zero()) return *this;
  PadicScalar s = *this;
  if (precision < prec_) s.unit_ %= cached_power(p_, precision);
  s.prec_ = precision;
  return s;
}

PadicScalar PadicScalar::truncated_absolute(int absprec) const {
  if (is_zero()) return zero_to(p_, std::min(val_, absprec));
  if (absprec <= val_) return zero_to(p_, absprec);
  int keep = std::min(prec_, absprec - val_);
  if (keep == prec_) return *this;
  PadicScalar s = *this;
  s.prec_ = keep;
  s.unit_ %= cached_power(p_, keep);
  return s;
}

static int common_prime(const PadicScalar& a, const PadicScalar& b) {
  if (a.prime() == 0) return b.prime();
  if (b.prime() != 0 && a.prime() != b.prime())
    throw BackendMismatch("p-adic operands with different primes");
  return a.prime();
}

PadicScalar operator+(const PadicScalar& a, const PadicScalar& b) {
  const int p = common_prime(a, b);
  const int absprec = std::min(a.absolute_precision(), b.absolute_precision());
  if (a.is_zero() && b.is_zero()) return PadicScalar::zero_to(p, absprec);
  if (a.is_zero()) return b.truncated_absolute(absprec);
  if (b.is_zero()) return a.truncated_absolute(absprec);
  const int vmin = std::min(a.val_, b.val_);
  if (absprec <= vmin) return PadicScalar::zero_to(p, absprec);
  Integer s = a.unit_ * cached_power(p, a.val_ - vmin) +
              b.unit_ * cached_power(p, b.val_ - vmin);
  const Integer& m = cached_power(p, absprec - vmin);
  s %= m;
  if (s < 0) s += m;
  if (s == 0) return PadicScalar::zero_to(p, absprec);
  int w = 0;
  if (a.val_ == b.val_) {
    Integer pp(p);
    w = static_cast<int>(
        mpz_remove(s.get_mpz_t(), s.get_mpz_t(), pp.get_mpz_t()));
  }
  PadicScalar r;
  r.p_ = p;
  r.val_ = vmin + w;
  r.prec_ = absprec - r.val_;
  r.unit_ = std::move(s);
  return r;
}

PadicScalar operator-(const PadicScalar& a) {
  if (a.is_zero()) return a;
  PadicScalar r = a;
  r.unit_ = cached_power(a.p_, a.prec_) - a.unit_;
  return r;
}

PadicScalar operator-(const PadicScalar& a, const PadicScalar& b) {
  return a + (-b);
}

PadicScalar operator*(const PadicScalar& a, const PadicScalar& b) {
  const int p = common_prime(a, b);
  if (a.is_zero() || b.is_zero()) {
    // Known to (absprec of the zero) + (valuation of the other factor).
    int abs_a = a.is_zero() ? saturating_add(a.val_, b.val_) : kInfiniteValuation;
    int abs_b = b.is_zero() ? saturating_add(b.val_, a.val_) : kInfiniteValuation;
    return PadicScalar::zero_to(p, std::min(abs_a, abs_b));
  }
  PadicScalar r;
  r.p_ = p;
  r.val_ = a.val_ + b.val_;
  r.prec_ = std::min(a.prec_, b.prec_);
  r.unit_ = a.unit_ * b.unit_ % cached_power(p, r.prec_);
  return r;
}

PadicScalar operator/(const PadicScalar& a, const PadicScalar& b) {
  const int p = common_prime(a, b);
  if (b.is_exact_zero()) throw DivisionByZero("p-adic division by zero");
  if (b.is_zero())
    throw PrecisionExhausted("divisor indistinguishable from zero at " +
                             std::to_string(b.val_) + " digits");
  if (a.is_zero()) {
    if (a.is_exact_zero()) return PadicScalar::exact_zero(p);
    return PadicScalar::zero_to(p, a.val_ - b.val_);
  }
  PadicScalar r;
  r.p_ = p;
  r.val_ = a.val_ - b.val_;
  r.prec_ = std::min(a.prec_, b.prec_);
  const Integer& m = cached_power(p, r.prec_);
  r.unit_ = a.unit_ * mod_inverse(b.unit_ % m, m) % m;
  return r;
}

std::string PadicScalar::to_string() const {
  if (is_exact_zero()) return "0";
  if (is_zero()) return "O(" + std::to_string(p_) + "^" + std::to_string(val_) + ")";
  std::string s = unit_.get_str();
  if (val_ != 0) s += "*" + std::to_string(p_) + "^" + std::to_string(val_);
  s += " + O(" + std::to_string(p_) + "^" + std::to_string(absolute_precision()) + ")";
  return s;
}

// ---------------------------------------------------------------------------
// PadicField

PadicField::PadicField(int p, int precision) : p_(p), precision_(precision) {
  if (p < 2) throw std::invalid_argument("p-adic field needs p >= 2");
  if (precision < 1) throw std::invalid_argument("precision must be positive");
  Integer pp(p);
  if (mpz_probab_prime_p(pp.get_mpz_t(), 25) == 0)
    throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
}

std::string PadicField::describe() const {
  return "padic:p=" + std::to_string(p_) + ",N=" + std::to_string(precision_);
}

PadicScalar PadicField::uniformizer_power(int n) const {
  return PadicScalar::from_parts(p_, n, Integer(1), precision_);
}

std::vector<PadicScalar> PadicField::residue_representatives() const {
  std::vector<PadicScalar> reps;
  for (int k = 0; k < p_; ++k) reps.push_back(from_integer(k));
  return reps;
}

NormValue PadicField::norm(const PadicScalar& x) const {
  if (x.is_zero()) return NormValue::zero_ultrametric(p_);
  return NormValue::ultrametric(p_, Rational(x.valuation()));
}

}  // namespace tempered
