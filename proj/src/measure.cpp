#include "tempered/measure.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace tempered {

// ---------------------------------------------------------------------------
// Residue counting

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

struct ModTerm {
  std::vector<int> exponent;
  u64 coefficient;
};

u64 to_u64(const Integer& n) {
  Integer hi = n >> 32, lo = n - (hi << 32);
  return (static_cast<u64>(hi.get_ui()) << 32) | static_cast<u64>(lo.get_ui());
}

}  // namespace

Rational point_count_density(int p, const PolyMap& F, const std::vector<Rational>& c,
                             int t, int N, long node_cap) {
  const int m = F.nvars(), r = F.rank();
  if (static_cast<int>(c.size()) != r)
    throw std::invalid_argument("value c must have one entry per component");
  if (N < 1) throw std::invalid_argument("point_count_density needs N >= 1");
  if (N * std::log2(static_cast<double>(p)) > 62.0)
    throw BudgetExceeded("p^N does not fit the 64-bit residue arithmetic");
  const Integer modulus_z = ipow(p, N);
  const u64 modulus = to_u64(modulus_z);

  std::vector<std::vector<ModTerm>> comps(r);
  std::vector<u64> target(r);
  int shift_total = 0;
  for (int i = 0; i < r; ++i) {
    const MultiPoly& f = F.components[i];
    int low = kInfiniteValuation;
    for (const auto& [e, a] : f.terms()) {
      int deg = 0;
      for (int x : e) deg += x;
      low = std::min(low, valuation(a, p) - t * deg);
    }
    const int s = f.is_zero() ? 0 : -low;
    shift_total += s;
    Rational ci = c[i] * rpow(p, s);
    if (ci != 0 && valuation(ci, p) < 0) return Rational(0);
    target[i] = to_u64(rational_mod(ci, modulus_z));
    for (const auto& [e, a] : f.terms()) {
      int deg = 0;
      for (int x : e) deg += x;
      Rational b = a * rpow(p, s - t * deg);
      comps[i].push_back({e, to_u64(rational_mod(b, modulus_z))});
    }
  }

  std::vector<u64> x(m, 0);
  auto residual_ok = [&](u64 mod) {
    for (int i = 0; i < r; ++i) {
      u64 acc = 0;
      for (const auto& term : comps[i]) {
        u128 v = term.coefficient;
        for (int j = 0; j < m; ++j)
          for (int rep = 0; rep < term.exponent[j]; ++rep) v = v * x[j] % modulus;
        acc = static_cast<u64>((static_cast<u128>(acc) + v) % modulus);
      }
      if ((acc + modulus - target[i]) % modulus % mod != 0) return false;
    }
    return true;
  };

  long nodes = 0;
  Integer count = 0;
  std::vector<u64> powers(N + 1, 1);
  for (int k = 1; k <= N; ++k) powers[k] = powers[k - 1] * static_cast<u64>(p);
  // Digits of level `level` for coordinate j, prefix already fixed mod p^level.
  std::function<void(int, int)> descend = [&](int level, int j) {
    if (j == m) {
      if (++nodes > node_cap) throw BudgetExceeded("residue enumeration exceeds the node cap");
      if (!residual_ok(powers[level + 1])) return;
      if (level + 1 == N) {
        ++count;
        return;
      }
      descend(level + 1, 0);
      return;
    }
    const u64 saved = x[j];
    for (int d = 0; d < p; ++d) {
      x[j] = saved + static_cast<u64>(d) * powers[level];
      descend(level, j + 1);
    }
    x[j] = saved;
  };
  descend(0, 0);
  return Rational(count) * rpow(p, -N * (m - r)) * rpow(p, t * m - shift_total);
}

// ---------------------------------------------------------------------------
// Growth fitting and reports

void fit_growth(GrowthSeries& series) {
  std::vector<double> xs, ys;
  const double lq = std::log(static_cast<double>(series.q));
  for (const auto& gp : series.points) {
    double v = series.toward_origin ? gp.annulus : gp.measure;
    if (v > 0) {
      xs.push_back(gp.t);
      ys.push_back(std::log(v) / lq);
    }
  }
  series.slope = series.intercept = series.residual = 0.0;
  if (xs.size() >= 2) {
    Eigen::MatrixXd a(xs.size(), 2);
    Eigen::VectorXd b(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      a(i, 0) = xs[i];
      a(i, 1) = 1.0;
      b(i) = ys[i];
    }
    Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
    series.slope = sol(0);
    series.intercept = sol(1);
    series.residual = std::sqrt((a * sol - b).squaredNorm() / xs.size());
  } else if (xs.size() == 1) {
    series.intercept = ys[0];
  }
  series.gamma_fit = series.toward_origin ? 0.0 : series.slope - series.reference_slope;
}

TemperedReport tempered_report(const GrowthSeries& series, int alpha) {
  TemperedReport rep;
  rep.alpha = alpha;
  double sum = 0.0;
  for (const auto& gp : series.points) {
    double w = std::pow(1.0 + std::pow(static_cast<double>(series.q), 2.0 * gp.t), -alpha);
    double term = gp.annulus * w;
    rep.terms.push_back(term);
    sum += term;
    rep.partial_sums.push_back(sum);
  }
  for (std::size_t i = 1; i < rep.terms.size(); ++i)
    if (rep.terms[i - 1] > 0) rep.tail_ratios.push_back(rep.terms[i] / rep.terms[i - 1]);
  const std::size_t window = std::min<std::size_t>(3, rep.tail_ratios.size());
  bool all_zero = true;
  for (double t : rep.terms) all_zero = all_zero && t == 0.0;
  if (all_zero) {
    rep.verdict = "convergent";
  } else if (window == 0) {
    rep.verdict = "inconclusive";
  } else {
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = rep.tail_ratios.size() - window; i < rep.tail_ratios.size(); ++i) {
      lo = std::min(lo, rep.tail_ratios[i]);
      hi = std::max(hi, rep.tail_ratios[i]);
    }
    rep.verdict = hi < 0.95 ? "convergent" : lo >= 0.95 ? "divergent" : "inconclusive";
  }
  rep.note = std::string("resolution-bounded evidence over the observed ") +
             (series.toward_origin ? "shells toward the origin" : "radii") +
             ", not a proof; verdict from the last " + std::to_string(window) +
             " term ratios (threshold 0.95)";
  return rep;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string emit_plotdata(const GrowthSeries& series) {
  if (series.points.empty()) throw std::invalid_argument("emit_plotdata: empty series");
  std::ostringstream out;
  out << "t,log_q_measure,fitted_line\n";
  const double lq = std::log(static_cast<double>(series.q));
  for (const auto& gp : series.points) {
    double v = series.toward_origin ? gp.annulus : gp.measure;
    out << gp.t << ',' << (v > 0 ? fmt(std::log(v) / lq) : "-inf") << ','
        << fmt(series.intercept + series.slope * gp.t) << '\n';
  }
  return out.str();
}

std::string growth_csv(const GrowthSeries& series) {
  std::ostringstream out;
  out << "t,measure_numerator,measure_denominator,error_bound\n";
  for (const auto& gp : series.points) {
    if (series.exact)
      out << gp.t << ',' << gp.exact.get_num().get_str() << ','
          << gp.exact.get_den().get_str() << ',' << fmt(gp.error_bound) << '\n';
    else
      out << gp.t << ',' << fmt(gp.measure) << ",1," << fmt(gp.error_bound) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Real backend

namespace {

struct DTerm {
  std::vector<int> exponent;
  double coefficient;
};

struct DPoly {
  std::vector<DTerm> terms;

  DPoly() = default;
  explicit DPoly(const MultiPoly& f) {
    for (const auto& [e, c] : f.terms()) terms.push_back({e, c.get_d()});
  }
  double eval(const std::vector<double>& x) const {
    double acc = 0.0;
    for (const auto& t : terms) {
      double v = t.coefficient;
      for (std::size_t j = 0; j < x.size(); ++j)
        for (int rep = 0; rep < t.exponent[j]; ++rep) v *= x[j];
      acc += v;
    }
    return acc;
  }
};

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

// Real roots of sum a_k z^k, polished by Newton. Roots whose residual stays
// large are counted as failures and dropped.
std::vector<double> real_roots(std::vector<double> a, long& failures) {
  double amax = 0.0;
  for (double v : a) amax = std::max(amax, std::fabs(v));
  if (amax == 0.0) return {};
  while (!a.empty() && std::fabs(a.back()) <= 1e-14 * amax) a.pop_back();
  const int deg = static_cast<int>(a.size()) - 1;
  if (deg < 1) return {};
  std::vector<double> cand;
  if (deg == 1) {
    cand.push_back(-a[0] / a[1]);
  } else {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -a[i] / a[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < deg; ++i) {
      std::complex<double> z = es.eigenvalues()(i);
      if (std::fabs(z.imag()) <= 1e-7 * std::max(1.0, std::fabs(z.real())))
        cand.push_back(z.real());
    }
  }
  auto value = [&](double z, double& deriv, double& scale) {
    double v = 0.0;
    deriv = 0.0;
    scale = 0.0;
    for (int k = deg; k >= 0; --k) {
      deriv = deriv * z + v;
      v = v * z + a[k];
      scale = scale * std::fabs(z) + std::fabs(a[k]);
    }
    return v;
  };
  std::vector<double> roots;
  for (double z : cand) {
    double d, s, v = value(z, d, s);
    for (int it = 0; it < 8 && d != 0.0 && std::fabs(v) > 1e-15 * s; ++it) {
      z -= v / d;
      v = value(z, d, s);
    }
    if (std::fabs(v) > 1e-8 * std::max(s, 1e-300)) {
      ++failures;
      continue;
    }
    bool dup = false;
    for (double w : roots)
      if (std::fabs(w - z) <= 1e-10 * std::max(1.0, std::fabs(z))) dup = true;
    if (!dup) roots.push_back(z);
  }
  return roots;
}

// Lexicographically first coordinate (chart) of largest |minor|.
int real_argmax(const std::vector<double>& minors) {
  int best = 0;
  for (std::size_t i = 1; i < minors.size(); ++i)
    if (std::fabs(minors[i]) > std::fabs(minors[best])) best = static_cast<int>(i);
  return best;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xBF58476D1CE4E5B9ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// F - c with its Jacobian, evaluated in double precision.
struct RealSystem {
  int m = 0, r = 0;
  std::vector<MultiPoly> shifted;
  std::vector<DPoly> f;
  std::vector<std::vector<DPoly>> grad;

  RealSystem(const PolyMap& F, const std::vector<Rational>& c)
      : m(F.nvars()), r(F.rank()), grad(F.rank()) {
    for (int i = 0; i < r; ++i) {
      shifted.push_back(F.components[i] - MultiPoly::constant(m, c[i]));
      f.emplace_back(shifted.back());
      for (int j = 0; j < m; ++j) grad[i].emplace_back(partial(F.components[i], j));
    }
  }

  std::vector<double> minors(const std::vector<double>& x,
                             const std::vector<ChartIndex>& charts) const {
    std::vector<std::vector<double>> jac(r, std::vector<double>(m));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < m; ++j) jac[i][j] = grad[i][j].eval(x);
    std::vector<double> out;
    for (const auto& J : charts) {
      Eigen::MatrixXd a(r, r);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) a(i, j) = jac[i][J[j]];
      out.push_back(a.determinant());
    }
    return out;
  }

  // Coefficients of F_0 - c_0 as a polynomial in x_{J[0]} (r = 1 only).
  std::vector<DPoly> univariate(const ChartIndex& J) const {
    if (r != 1) return {};
    const int j = J[0];
    int deg = 0;
    for (const auto& [e, a] : shifted[0].terms()) deg = std::max(deg, e[j]);
    std::vector<DPoly> coeffs(deg + 1);
    for (const auto& [e, a] : shifted[0].terms()) {
      std::vector<int> e2 = e;
      e2[j] = 0;
      coeffs[e[j]].terms.push_back({e2, a.get_d()});
    }
    return coeffs;
  }

  // Solutions with the non-J coordinates of x frozen: polynomial roots
  // (r = 1) or Newton from a 3^r seed grid over the solved coordinates.
  template <class Bound>
  std::vector<std::vector<double>> solutions(const ChartIndex& J,
                                             const std::vector<DPoly>& coeffs,
                                             std::vector<double> x, const Bound& bound_of,
                                             long& failures) const {
    std::vector<std::vector<double>> points;
    if (r == 1) {
      std::vector<double> a;
      for (const auto& cp : coeffs) a.push_back(cp.eval(x));
      for (double z : real_roots(a, failures)) {
        x[J[0]] = z;
        points.push_back(x);
      }
      return points;
    }
    const int nseeds = static_cast<int>(std::pow(3, r));
    for (int sd = 0; sd < nseeds; ++sd) {
      std::vector<double> z = x;
      int code = sd;
      for (int i = 0; i < r; ++i, code /= 3) z[J[i]] = (code % 3 - 1) * 0.5 * bound_of(J[i]);
      bool ok = false;
      for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd val(r);
        Eigen::MatrixXd jac(r, r);
        for (int i = 0; i < r; ++i) {
          val(i) = f[i].eval(z);
          for (int j = 0; j < r; ++j) jac(i, j) = grad[i][J[j]].eval(z);
        }
        if (val.norm() < 1e-12) {
          ok = true;
          break;
        }
        Eigen::VectorXd step = jac.fullPivLu().solve(val);
        if (!step.allFinite()) break;
        for (int i = 0; i < r; ++i) z[J[i]] -= step(i);
      }
      if (!ok) continue;
      bool dup = false;
      for (const auto& pnt : points) {
        double dist = 0.0;
        for (int i = 0; i < m; ++i) dist = std::max(dist, std::fabs(pnt[i] - z[i]));
        if (dist < 1e-8) dup = true;
      }
      if (!dup) points.push_back(z);
    }
    return points;
  }
};

constexpr long kBlock = 4096;

}  // namespace

MeasureEstimate real_fiber_measure(const PolyMap& F, const std::vector<Rational>& c,
                                   const RealRegion& region, long samples,
                                   std::uint64_t seed, int threads) {
  const int m = F.nvars(), r = F.rank();
  if (static_cast<int>(c.size()) != r)
    throw std::invalid_argument("value c must have one entry per component");
  if (!(region.outer > region.inner) || region.inner < 0)
    throw std::invalid_argument("real region needs 0 <= inner < outer");
  const int dim = m - r;
  const auto charts = all_charts(m, r);
  std::vector<bool> in_norm(m, region.coords.empty());
  for (int j : region.coords) in_norm.at(j) = true;
  const double free_bound = region.free_bound > 0 ? region.free_bound : region.outer;
  auto bound_of = [&](int j) { return in_norm[j] ? region.outer : free_bound; };
  auto inside = [&](const std::vector<double>& x) {
    double norm = 0.0, other = 0.0;
    for (int j = 0; j < m; ++j) {
      if (in_norm[j]) norm = std::max(norm, std::fabs(x[j]));
      else other = std::max(other, std::fabs(x[j]));
    }
    return norm <= region.outer && norm >= region.inner && other <= free_bound;
  };

  RealSystem sys(F, c);
  auto minors_at = [&](const std::vector<double>& x) {
    return sys.minors(x, charts);
  };

  long grid = 1;
  if (dim > 0) {
    grid = std::max<long>(1, static_cast<long>(std::floor(
                                 std::pow(static_cast<double>(samples), 1.0 / dim) + 1e-9)));
  }
  long cells = 1;
  for (int i = 0; i < dim; ++i) cells *= grid;

  MeasureEstimate est;
  est.exact = false;
  est.normalization = kRealNormalization;
  double total = 0.0, var_total = 0.0;
  std::atomic<long> failures{0};

  for (std::size_t ci = 0; ci < charts.size(); ++ci) {
    const ChartIndex& J = charts[ci];
    const std::vector<int> rest = chart_complement(J, m);
    double box = 1.0;
    for (int j : rest) box *= 2.0 * bound_of(j);
    const double cell_volume = box / static_cast<double>(cells);

    const std::vector<DPoly> coeffs = sys.univariate(J);

    std::vector<double> values(cells, 0.0);
    const long blocks = (cells + kBlock - 1) / kBlock;
    std::atomic<long> next{0};
    auto worker = [&] {
      for (long b = next++; b < blocks; b = next++) {
        std::mt19937_64 rng(mix_seed(seed, ci, static_cast<std::uint64_t>(b)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        long local_fail = 0;
        for (long s = b * kBlock; s < std::min(cells, (b + 1) * kBlock); ++s) {
          std::vector<double> x(m, 0.0);
          long idx = s;
          for (int d = 0; d < dim; ++d) {
            const long cell = idx % grid;
            idx /= grid;
            const double lo = -bound_of(rest[d]);
            const double width = 2.0 * bound_of(rest[d]) / static_cast<double>(grid);
            x[rest[d]] = lo + (static_cast<double>(cell) + unit(rng)) * width;
          }
          std::vector<std::vector<double>> points =
              sys.solutions(J, coeffs, x, bound_of, local_fail);
          double w = 0.0;
          for (const auto& pnt : points) {
            if (!inside(pnt)) continue;
            auto minors = minors_at(pnt);
            if (real_argmax(minors) != static_cast<int>(ci)) continue;
            if (minors[ci] == 0.0) continue;
            w += 1.0 / std::fabs(minors[ci]);
          }
          values[s] = cell_volume * w;
        }
        failures += local_fail;
      }
    };
    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(blocks)));
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    const double sum = pairwise_sum(values.data(), values.size());
    const double mean = sum / static_cast<double>(cells);
    std::vector<double> sq(cells);
    for (long s = 0; s < cells; ++s) sq[s] = (values[s] - mean) * (values[s] - mean);
    const double var = cells > 1 ? pairwise_sum(sq.data(), sq.size()) / (cells - 1) : 0.0;
    // Variance of the sum of `cells` independent samples.
    var_total += var * static_cast<double>(cells);
    est.chart_approx[J] = sum;
    total += sum;
  }
  est.approx = total;
  est.value = Rational(0);
  est.samples = cells * static_cast<long>(charts.size());
  est.standard_error = std::sqrt(var_total);
  est.error_bound = 3.0 * est.standard_error;
  est.newton_failures = failures;
  est.flags.push_back("sampled");
  if (failures > std::max<long>(10, est.samples / 100)) est.flags.push_back("NewtonDivergence");
  return est;
}

GrowthSeries real_growth_series(const PolyMap& F, const std::vector<Rational>& c,
                                int t_min, int t_max, long samples, std::uint64_t seed,
                                int threads) {
  GrowthSeries s;
  s.q = 2;
  s.m = F.nvars();
  s.r = F.rank();
  s.reference_slope = s.m - s.r;
  s.normalization = kRealNormalization;
  double cumulative = 0.0, err = 0.0;
  for (int t = t_min; t <= t_max; ++t) {
    RealRegion region;
    region.outer = std::ldexp(1.0, t);
    region.inner = t == t_min ? 0.0 : std::ldexp(1.0, t - 1);
    MeasureEstimate est = real_fiber_measure(F, c, region, samples,
                                             mix_seed(seed, 7, static_cast<std::uint64_t>(t - t_min)),
                                             threads);
    cumulative += est.approx;
    err = std::sqrt(err * err + est.error_bound * est.error_bound);
    GrowthPoint gp;
    gp.t = t;
    gp.measure = cumulative;
    gp.annulus = est.approx;
    gp.error_bound = err;
    s.points.push_back(gp);
  }
  fit_growth(s);
  return s;
}

GrowthSeries real_origin_shells(const PolyMap& F, const std::vector<Rational>& c,
                                int j_max, long samples, std::uint64_t seed,
                                const std::vector<int>& coords, double free_factor,
                                int threads) {
  GrowthSeries s;
  s.q = 2;
  s.m = F.nvars();
  s.r = F.rank();
  s.reference_slope = s.m - s.r;
  s.toward_origin = true;
  s.normalization = kRealNormalization;
  double cumulative = 0.0;
  for (int j = 1; j <= j_max; ++j) {
    RealRegion region;
    region.outer = std::ldexp(1.0, -j);
    region.inner = std::ldexp(1.0, -j - 1);
    region.coords = coords;
    region.free_bound = free_factor * region.outer;
    MeasureEstimate est = real_fiber_measure(F, c, region, samples,
                                             mix_seed(seed, 11, static_cast<std::uint64_t>(j)),
                                             threads);
    cumulative += est.approx;
    GrowthPoint gp;
    gp.t = -j;
    gp.measure = cumulative;
    gp.annulus = est.approx;
    gp.error_bound = est.error_bound;
    s.points.push_back(gp);
  }
  fit_growth(s);
  return s;
}

std::vector<RealFiberPoint> real_fiber_points(const PolyMap& F, const std::vector<Rational>& c,
                                              const RealRegion& region, long samples,
                                              std::uint64_t seed) {
  const int m = F.nvars(), r = F.rank();
  if (static_cast<int>(c.size()) != r)
    throw std::invalid_argument("value c must have one entry per component");
  const auto charts = all_charts(m, r);
  std::vector<bool> in_norm(m, region.coords.empty());
  for (int j : region.coords) in_norm.at(j) = true;
  const double free_bound = region.free_bound > 0 ? region.free_bound : region.outer;
  auto bound_of = [&](int j) { return in_norm[j] ? region.outer : free_bound; };
  RealSystem sys(F, c);
  std::vector<RealFiberPoint> out;
  long failures = 0;
  for (std::size_t ci = 0; ci < charts.size(); ++ci) {
    const ChartIndex& J = charts[ci];
    const std::vector<int> rest = chart_complement(J, m);
    const std::vector<DPoly> coeffs = sys.univariate(J);
    std::mt19937_64 rng(mix_seed(seed, ci, 0x5eed));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (long s = 0; s < samples; ++s) {
      std::vector<double> x(m, 0.0);
      for (int j : rest) x[j] = unit(rng) * bound_of(j);
      for (auto& pnt : sys.solutions(J, coeffs, x, bound_of, failures)) {
        double norm = 0.0, other = 0.0;
        for (int j = 0; j < m; ++j) {
          if (in_norm[j]) norm = std::max(norm, std::fabs(pnt[j]));
          else other = std::max(other, std::fabs(pnt[j]));
        }
        if (norm > region.outer || norm < region.inner || other > free_bound) continue;
        auto minors = sys.minors(pnt, charts);
        if (real_argmax(minors) != static_cast<int>(ci)) continue;
        out.push_back({std::move(pnt), static_cast<int>(ci), std::move(minors)});
      }
    }
  }
  return out;
}

}  // namespace tempered
