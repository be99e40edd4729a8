#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "tempered/fields.hpp"
#include "tempered/forms.hpp"
#include "tempered/lift.hpp"
#include "tempered/measure.hpp"
#include "tempered/poly.hpp"

namespace tempered {

// ---------------------------------------------------------------------------
// Exponent fits

// Logarithms are exact rationals: base q on ultrametric backends, base e on
// R (the logs of doubles are converted exactly, so the fit arithmetic is
// exact on both backends).
struct FitSample {
  std::vector<std::string> point;
  Rational log_value;  // log |f(x)|, or log ||grad_r F(x)||
  Rational log_dist;   // log dist(x, Z(f)); unused where no locus enters
  Rational log_norm;   // log ||x||
  bool dist_exact = true;
};

struct ExponentFit {
  std::string inequality;
  std::string backend;  // "ultrametric" or "real"
  double log_base = 0.0;
  std::vector<FitSample> samples;
  Rational alpha = 0, beta = 0, gamma = 0;
  Rational log_c = 0;
  // min over samples of (lhs - rhs) in log space; 0 by construction.
  Rational violation_margin = 0;
  double residual = 0.0;  // RMS residual of the envelope regression
  bool empty_locus = false;
  long inexact_distances = 0;
  // Fresh-sample check of the reported constants.
  long refit_samples = 0;
  double refit_violation_rate = 0.0;
  bool refit = false;
  // dist(x, Z) <= A ||x|| on samples with ||x|| >= 1 (-1 when not checked).
  Rational growth_constant = -1;
  long growth_violations = 0;
  std::vector<std::string> flags;

  double constant() const;
};

// Least-squares line through the lower envelope of (x, y): for each distinct
// x the smallest y. With fewer than two distinct x the slope is 0.
struct EnvelopeFit {
  Rational slope = 0;
  double residual = 0.0;
  int points = 0;
};
EnvelopeFit lower_envelope_fit(const std::vector<std::pair<Rational, Rational>>& xy);

// log_c = min (y - slope x); the margin is then zero.
Rational min_offset(const std::vector<std::pair<Rational, Rational>>& xy, const Rational& slope);

// Columns: point coordinates, value, dist, norm (as numbers, not logs).
std::string fit_csv(const ExponentFit& fit);

struct ProbeOptions {
  int depth = 3;         // sample digits
  long samples = 2000;   // full enumeration when q^(m depth) is at most this
  int extra = 4;         // distance search below the sample depth
  std::uint64_t seed = 1;
  int threads = 1;
};

namespace detail {

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (a + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Integer random_residue(std::mt19937_64& rng, long q, int n) {
  std::uniform_int_distribution<long> digit(0, q - 1);
  Integer out = 0, place = 1;
  for (int i = 0; i < n; ++i) {
    out += place * digit(rng);
    place *= q;
  }
  return out;
}

// Runs fn(i) for i in [0, n) on a fixed partition; results land by index.
// The first exception (by worker) is rethrown after all workers finish.
inline void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
  const int t = static_cast<int>(std::max<long>(1, std::min<long>(threads, n)));
  std::vector<std::exception_ptr> errors(t);
  auto work = [&](int w) {
    try {
      for (long i = w; i < n; i += t) fn(i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < t; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline Rational log_of(const NormValue& v) { return -v.exponent(); }

// Residue tuples of the sample points: all of them, or `samples` random ones.
inline std::vector<std::vector<Integer>> sample_residues(long q, int m, int depth, long samples,
                                                         std::uint64_t seed, bool allow_full) {
  std::vector<std::vector<Integer>> out;
  Integer total = ipow(q, static_cast<long>(m) * depth);
  if (allow_full && total <= samples) {
    const Integer per = ipow(q, depth);
    for (long idx = 0; idx < total.get_si(); ++idx) {
      std::vector<Integer> digits;
      Integer rest = idx;
      for (int i = 0; i < m; ++i) {
        digits.push_back(Integer(rest % per));
        rest /= per;
      }
      out.push_back(std::move(digits));
    }
    return out;
  }
  std::mt19937_64 rng(mix(seed, 0));
  for (long s = 0; s < samples; ++s) {
    std::vector<Integer> digits;
    for (int i = 0; i < m; ++i) digits.push_back(random_residue(rng, q, depth));
    out.push_back(std::move(digits));
  }
  return out;
}

template <class Field>
std::vector<std::string> point_strings(const Vec<Field>& x) {
  std::vector<std::string> out;
  for (const auto& xi : x) out.push_back(xi.to_string());
  return out;
}

template <class Field>
struct PointData {
  bool skip = false;
  FitSample sample;
};

// |f(x)|, dist(x, Z(f)) and ||x|| at one point; EmptyLocus propagates.
template <class Field>
PointData<Field> evaluate_point(const Field& k, const MultiPoly& f, const Vec<Field>& x,
                                int max_depth, bool want_dist) {
  PointData<Field> out;
  NormValue fx = k.norm(eval(k, f, x));
  if (fx.is_zero()) {
    out.skip = true;
    return out;
  }
  out.sample.point = point_strings<Field>(x);
  out.sample.log_value = log_of(fx);
  NormValue nx = vec_norm(k, x);
  out.sample.log_norm = nx.is_zero() ? Rational(0) : log_of(nx);
  if (want_dist) {
    DistanceResult d = dist_to_zero(k, f, x, max_depth);
    if (d.distance.is_zero()) {
      out.skip = true;
      return out;
    }
    out.sample.log_dist = log_of(d.distance);
    out.sample.dist_exact = d.exact;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// H1: |f(x)| >= C dist(x, Z(f))^alpha on the unit ball

template <class Field>
ExponentFit h1_probe(const Field& k, const MultiPoly& f, const ProbeOptions& opts = {}) {
  static_assert(Field::is_ultrametric, "h1_probe needs an ultrametric field");
  const int m = f.nvars();
  const int max_depth = opts.depth + opts.extra;
  ExponentFit fit;
  fit.inequality = "|f(x)| >= C dist(x,Z(f))^alpha, ||x|| <= 1";
  fit.backend = "ultrametric";
  fit.log_base = static_cast<double>(k.q());

  auto collect = [&](const std::vector<std::vector<Integer>>& residues, int depth,
                     bool want_dist) {
    std::vector<detail::PointData<Field>> data(residues.size());
    detail::parallel_for(static_cast<long>(residues.size()), opts.threads, [&](long i) {
      Vec<Field> x;
      for (const auto& d : residues[i]) x.push_back(k.from_residue(d, depth));
      data[i] = detail::evaluate_point(k, f, x, max_depth, want_dist);
    });
    std::vector<FitSample> out;
    for (auto& d : data)
      if (!d.skip) out.push_back(std::move(d.sample));
    return out;
  };

  auto residues = detail::sample_residues(k.q(), m, opts.depth, opts.samples, opts.seed, true);
  try {
    fit.samples = collect(residues, opts.depth, true);
  } catch (const EmptyLocus&) {
    // Z(f) does not meet the searched balls: |f| >= C on the unit ball.
    fit.empty_locus = true;
    fit.inequality = "|f(x)| >= C, ||x|| <= 1";
    fit.samples = collect(residues, opts.depth, false);
  }
  auto pairs = [&](const std::vector<FitSample>& s) {
    std::vector<std::pair<Rational, Rational>> xy;
    for (const auto& p : s)
      xy.emplace_back(fit.empty_locus ? Rational(0) : p.log_dist, p.log_value);
    return xy;
  };
  auto refit_on = [&](const std::vector<FitSample>& s) {
    auto xy = pairs(s);
    EnvelopeFit env = lower_envelope_fit(xy);
    fit.alpha = fit.empty_locus ? Rational(0) : Rational(env.slope);
    fit.residual = env.residual;
    fit.log_c = min_offset(xy, fit.alpha);
    fit.violation_margin = 0;
  };
  if (fit.samples.empty()) {
    fit.flags.push_back("no-samples");
    return fit;
  }
  refit_on(fit.samples);
  for (const auto& s : fit.samples)
    if (!s.dist_exact) ++fit.inexact_distances;

  // Fresh sample one digit deeper.
  auto fresh_res = detail::sample_residues(k.q(), m, opts.depth + 1,
                                           std::max<long>(100, opts.samples / 4),
                                           detail::mix(opts.seed, 17), false);
  std::vector<FitSample> fresh = collect(fresh_res, opts.depth + 1, !fit.empty_locus);
  long bad = 0;
  for (const auto& [x, y] : pairs(fresh))
    if (y < fit.log_c + fit.alpha * x) ++bad;
  fit.refit_samples = static_cast<long>(fresh.size());
  fit.refit_violation_rate = fresh.empty() ? 0.0 : static_cast<double>(bad) / fresh.size();
  if (fit.refit_violation_rate >= 0.01) {
    fit.refit = true;
    fit.samples.insert(fit.samples.end(), fresh.begin(), fresh.end());
    refit_on(fit.samples);
  }
  return fit;
}

// ---------------------------------------------------------------------------
// H2: ||f(x)|| >= C dist(x,Z(f))^alpha / ||x||^beta for ||x|| >= 1

template <class Field>
ExponentFit h2_probe(const Field& k, const MultiPoly& f, int t_max, const ProbeOptions& opts = {}) {
  static_assert(Field::is_ultrametric, "h2_probe needs an ultrametric field");
  const int m = f.nvars();
  ExponentFit fit;
  fit.backend = "ultrametric";
  fit.log_base = static_cast<double>(k.q());

  // Points of the annulus ||x|| = q^t: x = pi^{-t} u with some u_i a unit.
  auto annulus_points = [&](int t, std::uint64_t seed, long count) {
    std::vector<Vec<Field>> pts;
    std::mt19937_64 rng(detail::mix(seed, static_cast<std::uint64_t>(t)));
    std::uniform_int_distribution<int> coord(0, m - 1);
    std::uniform_int_distribution<long> unit_digit(1, k.q() - 1);
    const Integer top = ipow(k.q(), opts.depth);
    for (long s = 0; s < count; ++s) {
      const int lead = coord(rng);
      Vec<Field> x;
      for (int i = 0; i < m; ++i) {
        Integer d = detail::random_residue(rng, k.q(), opts.depth);
        if (i == lead) d = Integer(d - (d % k.q())) + unit_digit(rng);
        x.push_back(k.from_residue(d, opts.depth) * k.uniformizer_power(-t));
      }
      pts.push_back(std::move(x));
    }
    return pts;
  };
  auto collect = [&](std::uint64_t seed, long per_t, bool want_dist) {
    std::vector<Vec<Field>> pts;
    for (int t = 0; t <= t_max; ++t) {
      auto a = annulus_points(t, seed, per_t);
      pts.insert(pts.end(), a.begin(), a.end());
    }
    std::vector<detail::PointData<Field>> data(pts.size());
    detail::parallel_for(static_cast<long>(pts.size()), opts.threads, [&](long i) {
      data[i] = detail::evaluate_point(k, f, pts[i], opts.depth + opts.extra + t_max, want_dist);
    });
    std::vector<FitSample> out;
    for (auto& d : data)
      if (!d.skip) out.push_back(std::move(d.sample));
    return out;
  };
  const long per_t = std::max<long>(1, opts.samples / (t_max + 1));
  try {
    fit.samples = collect(opts.seed, per_t, true);
  } catch (const EmptyLocus&) {
    fit.empty_locus = true;
    fit.samples = collect(opts.seed, per_t, false);
  }
  fit.inequality = fit.empty_locus ? "|f(x)| >= C / ||x||^beta, ||x|| >= 1"
                                   : "|f(x)| >= C dist(x,Z(f))^alpha / ||x||^beta, ||x|| >= 1";
  if (fit.samples.empty()) {
    fit.flags.push_back("no-samples");
    return fit;
  }
  auto fit_on = [&](const std::vector<FitSample>& s) {
    if (!fit.empty_locus) {
      std::vector<std::pair<Rational, Rational>> xy;
      for (const auto& p : s) xy.emplace_back(p.log_dist, p.log_value);
      fit.alpha = lower_envelope_fit(xy).slope;
      if (fit.alpha < 0) fit.alpha = 0;
    }
    std::vector<std::pair<Rational, Rational>> rho;
    for (const auto& p : s)
      rho.emplace_back(p.log_norm, p.log_value - (fit.empty_locus ? Rational(0) : fit.alpha * p.log_dist));
    EnvelopeFit env = lower_envelope_fit(rho);
    fit.beta = env.slope < 0 ? Rational(-env.slope) : Rational(0);
    fit.residual = env.residual;
    fit.log_c = min_offset(rho, -fit.beta);
    fit.violation_margin = 0;
  };
  fit_on(fit.samples);
  for (const auto& s : fit.samples)
    if (!s.dist_exact) ++fit.inexact_distances;

  auto violates = [&](const FitSample& p) {
    Rational rhs = fit.log_c - fit.beta * p.log_norm;
    if (!fit.empty_locus) rhs += fit.alpha * p.log_dist;
    return p.log_value < rhs;
  };
  std::vector<FitSample> fresh = collect(detail::mix(opts.seed, 29), std::max<long>(20, per_t / 4),
                                         !fit.empty_locus);
  long bad = 0;
  for (const auto& p : fresh)
    if (violates(p)) ++bad;
  fit.refit_samples = static_cast<long>(fresh.size());
  fit.refit_violation_rate = fresh.empty() ? 0.0 : static_cast<double>(bad) / fresh.size();
  if (fit.refit_violation_rate >= 0.01) {
    fit.refit = true;
    fit.samples.insert(fit.samples.end(), fresh.begin(), fresh.end());
    fit_on(fit.samples);
  }

  // dist(x, Z) <= A ||x|| with A = 1 + max(1, ||z0||), z0 a zero nearest the origin.
  if (!fit.empty_locus) {
    DistanceResult d0 = dist_to_zero(k, f, Vec<Field>(m, k.zero()), opts.depth + opts.extra, t_max + 8);
    auto power = [&](const Rational& e) { return rpow(k.q(), static_cast<int>(e.get_num().get_si())); };
    Rational z0 = d0.distance.is_zero() ? Rational(0) : power(detail::log_of(d0.distance));
    fit.growth_constant = 1 + (z0 > 1 ? z0 : Rational(1));
    for (const auto& p : fit.samples) {
      if (p.log_norm < 0) continue;
      // Ultrametric logs of norms are integers.
      Rational dist = power(p.log_dist);
      Rational norm = power(p.log_norm);
      if (dist > fit.growth_constant * norm) ++fit.growth_violations;
    }
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Critical cells and values

// Value cell {v : val(v_i - base_i) >= depth for all i}.
template <class Field>
struct ValueCell {
  Vec<Field> base;
  int depth = 0;
};

template <class Field>
struct CriticalReport {
  int depth = 0;
  long q = 0;
  std::vector<Cell> critical;    // certified: contain a point with all minors zero
  std::vector<Cell> unresolved;  // undecided at the search depth, treated as critical
  std::vector<ValueCell<Field>> values;
  std::string norm_form;  // defining polynomial of the extension behind g
};

// g = nu(grad_r F) vanishes exactly where every r x r minor vanishes, since
// nu is definite. Variables of F past the first F.nvars() - params.size() are
// constants with the given values (for coefficients such as t^i on Laurent
// fields); no minor may depend on them. Cells still undecided extra_search
// digits below the depth are kept as unresolved.
template <class Field>
CriticalReport<Field> critical_cells(const Field& k, const PolyMap& F, int depth,
                                     const std::vector<typename Field::Scalar>& params = {},
                                     int extra_search = 1,
                                     long irreducible_cap = 100000,
                                     std::size_t term_cap = kDefaultTermCap) {
  static_assert(Field::is_ultrametric, "critical_cells needs an ultrametric field");
  const int np = static_cast<int>(params.size());
  const int m = F.nvars() - np;
  auto grad = generalized_gradient(F, k.characteristic());
  std::vector<MultiPoly> minors;
  for (auto& [J, minor] : grad) {
    bool chart_on_param = false;
    for (int j : J) chart_on_param = chart_on_param || j >= m;
    if (chart_on_param) continue;
    minors.push_back(std::move(minor));
  }
  const int count = static_cast<int>(minors.size());
  const long p = k.characteristic() ? k.characteristic() : k.q();
  if (p != k.q()) throw std::invalid_argument("critical_cells needs a prime residue field");
  NormForm nf = build_norm_form(static_cast<int>(p), count, irreducible_cap);
  MultiPoly g = compose(nf.nu, minors, term_cap);
  if (g.terms().size() > term_cap) throw CombinatorialBlowup("g exceeds the term cap");
  MultiPoly g0(m);
  for (const auto& [e, c] : g.terms()) {
    for (int j = m; j < static_cast<int>(e.size()); ++j)
      if (e[j] != 0) throw std::invalid_argument("critical_cells: a minor depends on a parameter");
    g0.add_term(Exponent(e.begin(), e.begin() + m), c);
  }

  CriticalReport<Field> rep;
  rep.depth = depth;
  rep.q = k.q();
  rep.norm_form = nf.model.defining_to_string();
  if (g0.is_zero()) {
    // Every point is critical.
    std::function<void(const Cell&)> rec = [&](const Cell& c) {
      if (c.depth == depth) rep.unresolved.push_back(c);
      else for (const auto& ch : child_cells(c, k.q())) rec(ch);
    };
    rec(root_cell(m));
  } else {
    ZeroTree tree = zero_cells(k, g0, root_cell(m), depth, false, extra_search);
    rep.critical = tree.cells_at(depth, CellStatus::ZeroBearing);
    rep.unresolved = tree.cells_at(depth, CellStatus::Unresolved);
  }

  // Values: F(x0 + pi^depth h) = F(x0) mod pi^(depth + lowest coefficient valuation).
  const Field kw = k.with_working_precision(std::max(k.precision(), 2 * depth + 16));
  std::vector<CompiledPoly<Field>> comp;
  int low = 0;
  for (const auto& fi : F.components) {
    comp.emplace_back(kw, fi, params);
    low = std::min(low, comp.back().min_coefficient_valuation(kw));
  }
  const int vdepth = depth + low;
  std::set<std::vector<Integer>> seen;
  auto add_cell = [&](const Cell& c) {
    Vec<Field> x = cell_base(kw, c);
    Vec<Field> v;
    std::vector<Integer> key;
    for (const auto& ci : comp) {
      auto val = ci.eval(kw, x);
      key.push_back(kw.residue(val * kw.uniformizer_power(-low), depth));
      v.push_back(val);
    }
    if (seen.insert(key).second) rep.values.push_back({std::move(v), vdepth});
  };
  for (const auto& c : rep.critical) add_cell(c);
  for (const auto& c : rep.unresolved) add_cell(c);
  return rep;
}

// Depth-N cells where every minor's zero tree is zero-bearing or unresolved.
// Contains the critical cells of critical_cells(); the two agree when the
// minors have no common zero-free cell, otherwise this is larger.
template <class Field>
std::vector<Cell> minor_intersection_cells(const Field& k, const PolyMap& F, int depth) {
  const int m = F.nvars();
  std::set<Cell> acc;
  bool first = true;
  for (auto& [J, minor] : generalized_gradient(F, k.characteristic())) {
    std::set<Cell> here;
    if (minor.is_zero()) {
      std::function<void(const Cell&)> rec = [&](const Cell& c) {
        if (c.depth == depth) here.insert(c);
        else for (const auto& ch : child_cells(c, k.q())) rec(ch);
      };
      rec(root_cell(m));
    } else {
      ZeroTree t = zero_cells(k, minor, root_cell(m), depth);
      for (const auto& c : t.cells_at(depth, CellStatus::ZeroBearing)) here.insert(c);
      for (const auto& c : t.cells_at(depth, CellStatus::Unresolved)) here.insert(c);
    }
    if (first) acc = std::move(here);
    else {
      std::set<Cell> both;
      for (const auto& c : acc)
        if (here.count(c)) both.insert(c);
      acc = std::move(both);
    }
    first = false;
  }
  return {acc.begin(), acc.end()};
}

struct StabilityVerdict {
  std::string verdict;  // "stably-non-critical" or "inconclusive"
  int s = 0;
  int depth = 0;
  long meeting_cells = 0;
};

// The open ball |c' - c| < q^-s meets the value cell base + pi^n R^r iff
// val(c - base) >= min(s + 1, n) in every coordinate.
template <class Field>
StabilityVerdict stability_probe(const Field& k, const CriticalReport<Field>& rep,
                                 const Vec<Field>& c, int s) {
  StabilityVerdict v;
  v.s = s;
  v.depth = rep.depth;
  for (const auto& cell : rep.values) {
    bool meets = true;
    const int need = std::min(s + 1, cell.depth);
    for (std::size_t i = 0; i < c.size() && meets; ++i) {
      auto diff = c[i] - cell.base[i];
      if (!k.is_zero(diff) && k.valuation(diff) < need) meets = false;
    }
    if (meets) ++v.meeting_cells;
  }
  v.verdict = v.meeting_cells == 0 ? "stably-non-critical" : "inconclusive";
  return v;
}

template <class Field>
StabilityVerdict stability_probe(const Field& k, const CriticalReport<Field>& rep,
                                 const std::vector<Rational>& c, int s) {
  Vec<Field> cv;
  for (const auto& ci : c) cv.push_back(k.from_rational(ci));
  return stability_probe(k, rep, cv, s);
}

// ---------------------------------------------------------------------------
// Lower bounds for ||grad_r F|| on fibers

struct GradientOptions {
  std::vector<int> radii{0, 1, 2};  // annuli ||x|| = q^t
  long samples = 12;                // projected cells per chart and radius
  int depth = 4;
  int window = 2;                   // perturbed values c' with |c' - c| <= q^-window
  int perturbations = 2;
  int stability_depth = 2;          // 0 skips the stability probe
  std::uint64_t seed = 1;
};

// Fiber points with ||x|| = q^t, t in radii, over random projected cells.
template <class Field>
std::vector<Vec<Field>> sample_fiber_points(const Field& k, const PolyMap& F,
                                            const std::vector<Rational>& c,
                                            const std::vector<int>& radii, long samples,
                                            int depth, std::uint64_t seed, long* unresolved) {
  const int m = F.nvars(), r = F.rank();
  std::vector<Vec<Field>> out;
  const auto charts = all_charts(m, r);
  for (int t : radii) {
    for (std::size_t ci = 0; ci < charts.size(); ++ci) {
      std::mt19937_64 rng(detail::mix(seed, 1000 * static_cast<std::uint64_t>(t + 16) + ci));
      std::set<std::vector<Integer>> tried;
      const long draws = m == r ? 1 : samples;
      for (long s = 0; s < draws; ++s) {
        Cell y;
        y.depth = depth;
        y.scale = t;
        for (int i = 0; i < m - r; ++i) y.digits.push_back(detail::random_residue(rng, k.q(), depth));
        if (!tried.insert(y.digits).second) continue;
        try {
          auto sol = fiber_solutions(k, F, c, charts[ci], y, depth);
          for (auto& p : sol.points) {
            NormValue n = vec_norm(k, p.point);
            if (n.is_zero() || detail::log_of(n) != Rational(t)) continue;
            out.push_back(std::move(p.point));
          }
        } catch (const UnresolvedFiber&) {
          if (unresolved) ++*unresolved;
        }
      }
    }
  }
  return out;
}

template <class Field>
NormValue gradient_norm(const Field& k, const PolyMap& F, const Vec<Field>& x) {
  Vec<Field> minors;
  for (const auto& [J, minor] : generalized_gradient(F, k.characteristic()))
    minors.push_back(eval(k, minor, x));
  return vec_norm(k, minors);
}

// Fits ||grad_r F(x)|| >= C / ||x||^gamma on fiber points for c and for
// perturbed values in the window.
template <class Field>
ExponentFit gradient_lower_bound(const Field& k, const PolyMap& F, const std::vector<Rational>& c,
                                 const GradientOptions& opts = {}) {
  static_assert(Field::is_ultrametric, "use real_gradient_fit on R");
  ExponentFit fit;
  fit.inequality = "||grad_r F(x)|| >= C / ||x||^gamma on L_c, ||x|| >= 1";
  fit.backend = "ultrametric";
  fit.log_base = static_cast<double>(k.q());
  if (opts.stability_depth > 0) {
    auto rep = critical_cells(k, F, opts.stability_depth);
    if (stability_probe(k, rep, c, opts.window).verdict != "stably-non-critical")
      fit.flags.push_back("StabilityUnknown");
  }
  std::vector<std::vector<Rational>> values{c};
  std::mt19937_64 rng(detail::mix(opts.seed, 77));
  for (int i = 0; i < opts.perturbations; ++i) {
    std::vector<Rational> cp = c;
    for (auto& ci : cp)
      ci += Rational(detail::random_residue(rng, k.q(), 3)) * rpow(k.q(), opts.window);
    values.push_back(std::move(cp));
  }
  long unresolved = 0;
  std::vector<std::pair<Rational, Rational>> xy;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    auto pts = sample_fiber_points(k, F, values[vi], opts.radii, opts.samples, opts.depth,
                                   detail::mix(opts.seed, vi), &unresolved);
    for (const auto& x : pts) {
      NormValue g = gradient_norm(k, F, x);
      if (g.is_zero()) {
        fit.flags.push_back("critical-point-on-fiber");
        continue;
      }
      FitSample s;
      s.point = detail::point_strings<Field>(x);
      s.log_value = detail::log_of(g);
      s.log_norm = detail::log_of(vec_norm(k, x));
      xy.emplace_back(s.log_norm, s.log_value);
      fit.samples.push_back(std::move(s));
    }
  }
  if (unresolved > 0) fit.flags.push_back("unresolved-fibers:" + std::to_string(unresolved));
  if (fit.samples.empty()) {
    fit.flags.push_back("no-samples");
    return fit;
  }
  EnvelopeFit env = lower_envelope_fit(xy);
  fit.gamma = env.slope < 0 ? Rational(-env.slope) : Rational(0);
  fit.residual = env.residual;
  fit.log_c = min_offset(xy, -fit.gamma);
  return fit;
}

// Real backend: the same fit on given points (max norms, natural logs).
ExponentFit real_gradient_fit(const PolyMap& F, const std::vector<std::vector<double>>& points);

// Fiber points on the shells 2^t <= ||x|| <= 2^(t+1), t in radii.
ExponentFit real_gradient_lower_bound(const PolyMap& F, const std::vector<Rational>& c,
                                      const std::vector<int>& radii, long samples,
                                      std::uint64_t seed);

// (n, -(2n)^(1/3), 1/n) on x^2 z^2 + y^3 z = -1.
std::vector<std::vector<double>> cusp_witness(const std::vector<double>& ns);

// ---------------------------------------------------------------------------
// |d c| <= C ||x|| ||grad f(x)|| for homogeneous f of degree d

struct EulerReport {
  std::string backend;
  double constant = 1.0;  // 1 ultrametric, m on R with max norms
  long points = 0;
  long violations = 0;
  double min_ratio = 0.0;  // min of C ||x|| ||grad f|| / |d c|
  std::vector<std::string> flags;
};

template <class Field>
EulerReport euler_bound_check(const Field& k, const MultiPoly& f, const Rational& c,
                              const GradientOptions& opts = {}) {
  static_assert(Field::is_ultrametric, "use real_euler_bound_check on R");
  if (!euler_residual(f).is_zero()) throw std::invalid_argument("euler_bound_check: f is not homogeneous");
  if (c == 0) throw std::invalid_argument("euler_bound_check: c must be nonzero");
  EulerReport rep;
  rep.backend = "ultrametric";
  rep.constant = 1.0;
  PolyMap F({f});
  long unresolved = 0;
  auto pts = sample_fiber_points(k, F, {c}, opts.radii, opts.samples, opts.depth, opts.seed, &unresolved);
  if (unresolved > 0) rep.flags.push_back("unresolved-fibers:" + std::to_string(unresolved));
  const NormValue dc = k.norm(k.from_rational(Rational(f.degree()) * c));
  if (dc.is_zero()) rep.flags.push_back("d*c vanishes in the field");
  const Rational lhs = dc.is_zero() ? Rational(-kInfiniteValuation) : detail::log_of(dc);
  bool first = true;
  for (const auto& x : pts) {
    ++rep.points;
    NormValue g = gradient_norm(k, F, x);
    if (g.is_zero()) {
      ++rep.violations;
      continue;
    }
    Rational rhs = detail::log_of(vec_norm(k, x)) + detail::log_of(g);
    if (rhs < lhs) ++rep.violations;
    double ratio = std::pow(static_cast<double>(k.q()), Rational(rhs - lhs).get_d());
    rep.min_ratio = first ? ratio : std::min(rep.min_ratio, ratio);
    first = false;
  }
  return rep;
}

EulerReport real_euler_bound_check(const MultiPoly& f, const Rational& c,
                                   const std::vector<int>& radii, long samples,
                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Characteristic p examples

struct DeligneRow {
  int n = 0;
  Integer hit;    // distinct residues of f on the critical locus mod t^n
  Integer cells;  // p^n
  Rational density;
};

struct DeligneTable {
  int p = 0;
  std::string polynomial;
  bool locus_checked = false;  // critical cells all lie on X = 0
  std::vector<DeligneRow> rows;
  bool strictly_decreasing = false;
};

// f = X^(p+1) + X^p Y + Y^p over F_p((t)); its critical locus is X = 0 and
// f(0, y) = y^p. Counts residues of f(0, y) mod t^n over y mod t^n.
DeligneTable deligne_example(int p, const std::vector<int>& depths,
                             long budget = 1L << 22, int locus_depth = 3);

// y^n + sum_i t^(i-1) x_i^p in variables y, x_1..x_p, T (T = t as a parameter):
// critical exactly on y = 0, with critical values all of F_p((t)).
PolyMap deligne_stability_map(int p, int n);

struct DeligneStability {
  int p = 0, n = 0, depth = 0;
  long critical_cells = 0;
  long value_cells = 0;
  std::vector<std::pair<std::string, StabilityVerdict>> verdicts;
  bool any_stable = false;
};

// Probes c = 0, 1, t, 1 + t^2 and a few random values at every s in [0, depth].
DeligneStability deligne_stability(int p, int n, int depth, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// X^2 Z^2 + P4(Y, Z), P4 = sum a_i Y^(4-i) Z^i

struct IcpReport {
  std::string label;  // "case-I", "case-II", "not-ICP"
  std::string polynomial;
  bool has_fit = false;
  ExponentFit fit;
  std::string note;
};

IcpReport icp_classify(const std::vector<Rational>& a, bool run_fit = true,
                       long samples = 400, std::uint64_t seed = 1);

}  // namespace tempered
