#pragma once

#include <atomic>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tempered/fields.hpp"
#include "tempered/lift.hpp"
#include "tempered/poly.hpp"

namespace tempered {

inline constexpr const char* kUltrametricNormalization =
    "Haar measure with vol(R^m) = 1 on k^m and vol(R^(m-r)) = 1 on the chart coordinates";
inline constexpr const char* kRealNormalization =
    "Lebesgue measure on R^m and on the chart coordinates";

// Ball B_{q^t} = pi^{-t} R^m, or the annulus B_{q^t} minus B_{q^inner}.
struct Region {
  int t = 0;
  std::optional<int> inner_t;
};

struct MeasureOptions {
  int depth = 8;  // deepest cell level
  int threads = 1;
  // DepthInsufficient is raised when the error bound exceeds this.
  double tolerance = std::numeric_limits<double>::infinity();
  // BudgetExceeded once this many cells have been classified.
  long cell_budget = 50000000;
};

struct MeasureEstimate {
  bool exact = false;
  Rational value;  // ultrametric backends
  double approx = 0.0;
  int depth = 0;
  // Ultrametric: unresolved projected volume times q^depth times D, a
  // heuristic since minors can be smaller than q^-depth inside such cells.
  // Real: three standard errors.
  double error_bound = 0.0;
  std::map<ChartIndex, Rational> chart_exact;
  std::map<ChartIndex, double> chart_approx;
  long resolved_cells = 0;
  long unresolved_cells = 0;
  long pruned_cells = 0;
  // Largest val(d_J) over resolved cells meeting the fiber; -1 if none.
  int max_minor_valuation = -1;
  double standard_error = 0.0;
  long samples = 0;
  long newton_failures = 0;
  std::vector<std::string> flags;
  std::string normalization;
};

// Index of the lexicographically first chart with the smallest minor
// valuation, or -1 when every minor is zero at working precision.
template <class Field>
int argmax_chart(const Field& k, const Mat<Field>& jac,
                 const std::vector<ChartIndex>& charts, int* best_val = nullptr) {
  int best = -1, best_v = kInfiniteValuation;
  for (std::size_t ci = 0; ci < charts.size(); ++ci) {
    Mat<Field> a;
    for (const auto& row : jac) {
      Vec<Field> sub;
      for (int j : charts[ci]) sub.push_back(row[j]);
      a.push_back(std::move(sub));
    }
    auto d = determinant(k, a);
    if (k.is_zero(d)) continue;
    int v = k.valuation(d);
    if (v < best_v) {
      best_v = v;
      best = static_cast<int>(ci);
    }
  }
  if (best_val) *best_val = best_v;
  return best;
}

// F(pi^{-t} u) with each component multiplied by pi^{s_i} so that all
// coefficients are integral, together with its Jacobian and the matching
// target value pi^{s_i} c_i.
template <class Field>
class IntegralModel {
 public:
  using Scalar = typename Field::Scalar;

  IntegralModel(const Field& k, const PolyMap& F, const std::vector<Rational>& c,
                int t, int precision)
      : k_(k.with_working_precision(std::max(k.precision(), precision))), t_(t) {
    m_ = F.nvars();
    r_ = F.rank();
    if (static_cast<int>(c.size()) != r_)
      throw std::invalid_argument("value c must have one entry per component");
    charts_ = all_charts(m_, r_);
    jac_.resize(r_);
    for (int i = 0; i < r_; ++i) {
      auto g = CompiledPoly<Field>(k_, F.components[i]).rescaled(k_, t);
      int low = g.is_zero() ? 0 : g.min_coefficient_valuation(k_);
      const int s = -low;
      shifts_.push_back(s);
      g_.push_back(g.scaled(k_.uniformizer_power(s)));
      target_.push_back(k_.from_rational(c[i]) * k_.uniformizer_power(s));
      for (int j = 0; j < m_; ++j)
        jac_[i].push_back(CompiledPoly<Field>(k_, partial(F.components[i], j, k_.characteristic()))
                              .rescaled(k_, t)
                              .scaled(k_.uniformizer_power(s - t)));
    }
  }

  const Field& field() const { return k_; }
  int nvars() const { return m_; }
  int rank() const { return r_; }
  int t() const { return t_; }
  const std::vector<int>& shifts() const { return shifts_; }
  const std::vector<ChartIndex>& charts() const { return charts_; }

  // c' - G'(x).
  Vec<Field> defect(const Vec<Field>& x) const {
    Vec<Field> out;
    for (int i = 0; i < r_; ++i) out.push_back(target_[i] - g_[i].eval(k_, x));
    return out;
  }
  Mat<Field> jacobian(const Vec<Field>& x) const {
    Mat<Field> a(r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < m_; ++j) a[i].push_back(jac_[i][j].eval(k_, x));
    return a;
  }
  // log_q of the factor turning a measure of G' = c' on R^m into the
  // measure of F = c on B_{q^t}: q^{tm - sum s_i}.
  int scale_exponent() const {
    int s = 0;
    for (int v : shifts_) s += v;
    return t_ * m_ - s;
  }

 private:
  Field k_;
  int t_;
  int m_ = 0, r_ = 0;
  std::vector<int> shifts_;
  std::vector<CompiledPoly<Field>> g_;
  Vec<Field> target_;
  std::vector<std::vector<CompiledPoly<Field>>> jac_;
  std::vector<ChartIndex> charts_;
};

// Cell-resolution integration of the canonical measure on {F = c} inside a
// ball. A cell C = x0 + pi^n R^m (integral model) with e = min_J val d_J(x0)
// and n > e is resolved: the assigned chart and |d_J| are constant on C, the
// map x -> (G'(x), x_{not J}) is a bijection of C onto a coset of
// pi^n DG'(x0) R^m, and its image of the Jacobian lattice equals
// d_J G'(x0) R^r. Hence L_c meets C iff c' - G'(x0) lies in pi^n d_J R^r, in
// which case the fiber over the whole projected cell is one point of
// density q^e, contributing q^{e - n(m - r)}.
template <class Field>
class MeasureEngine {
 public:
  MeasureEngine(const Field& k, const PolyMap& F, const std::vector<Rational>& c,
                int t, int depth, long cell_budget = 50000000)
      : model_(k, F, c, t, 2 * depth + 24),
        depth_(depth),
        bezout_(F.bezout()),
        cell_budget_(cell_budget) {}

  struct Partial {
    Rational value = 0;
    std::map<ChartIndex, Rational> charts;
    long resolved = 0, unresolved = 0, pruned = 0;
    int max_e = -1;
    Rational unresolved_volume = 0;

    void merge(const Partial& o) {
      value += o.value;
      for (const auto& [j, v] : o.charts) charts[j] += v;
      resolved += o.resolved;
      unresolved += o.unresolved;
      pruned += o.pruned;
      max_e = std::max(max_e, o.max_e);
      unresolved_volume += o.unresolved_volume;
    }
  };

  enum class Kind { Pruned, Resolved, Split };

  struct Outcome {
    Kind kind = Kind::Split;
    int chart = -1;
    int e = 0;
    bool meets_fiber = false;
  };

  Outcome classify(const Cell& cell) const {
    const Field& k = model_.field();
    const int n = cell.depth;
    Vec<Field> x0 = cell_base(k, cell);
    Vec<Field> diff = model_.defect(x0);
    for (const auto& d : diff)
      if (!k.is_zero(d) && k.valuation(d) < n) return {Kind::Pruned};
    Mat<Field> jac = model_.jacobian(x0);
    int e = kInfiniteValuation;
    int chart = argmax_chart(k, jac, model_.charts(), &e);
    if (chart < 0 || e >= n) return {Kind::Split};
    Mat<Field> a;
    for (const auto& row : jac) {
      Vec<Field> sub;
      for (int j : model_.charts()[chart]) sub.push_back(row[j]);
      a.push_back(std::move(sub));
    }
    Vec<Field> w = mat_vec(k, adjugate(k, a), diff);
    bool meets = true;
    for (const auto& wi : w)
      if (!k.is_zero(wi) && k.valuation(wi) < n + e) meets = false;
    return {Kind::Resolved, chart, e, meets};
  }

  void visit(const Cell& cell, Partial& acc) const {
    if (++visited_ > cell_budget_) {
      abort_ = true;
      return;
    }
    if (abort_) return;
    Outcome o = classify(cell);
    const long q = model_.field().q();
    const int m = model_.nvars(), r = model_.rank();
    if (o.kind == Kind::Pruned) {
      ++acc.pruned;
      return;
    }
    if (o.kind == Kind::Resolved) {
      ++acc.resolved;
      if (!o.meets_fiber) return;
      Rational v = rpow(q, o.e - cell.depth * (m - r));
      acc.value += v;
      acc.charts[model_.charts()[o.chart]] += v;
      acc.max_e = std::max(acc.max_e, o.e);
      return;
    }
    if (cell.depth >= depth_) {
      ++acc.unresolved;
      acc.unresolved_volume += rpow(q, -cell.depth * (m - r));
      return;
    }
    for (const auto& child : child_cells(cell, q)) visit(child, acc);
  }

  MeasureEstimate run(int threads) const {
    const int m = model_.nvars();
    const long q = model_.field().q();
    Cell root = root_cell(m, model_.t());
    Partial total;
    Outcome top = classify(root);
    if (top.kind == Kind::Pruned) {
      total.pruned = 1;
    } else {
      std::vector<Cell> tasks = child_cells(root, q);
      std::vector<Partial> parts(tasks.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) visit(tasks[i], parts[i]);
      };
      const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
      std::vector<std::thread> pool;
      for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();
      for (const auto& p : parts) total.merge(p);
    }
    if (abort_)
      throw BudgetExceeded("canonical_measure: more than " + std::to_string(cell_budget_) +
                           " cells at depth " + std::to_string(depth_));
    const Rational scale = rpow(q, model_.scale_exponent());
    MeasureEstimate est;
    est.exact = true;
    est.value = total.value * scale;
    est.approx = est.value.get_d();
    est.depth = depth_;
    for (const auto& [j, v] : total.charts) est.chart_exact[j] = v * scale;
    for (const auto& [j, v] : est.chart_exact) est.chart_approx[j] = v.get_d();
    est.resolved_cells = total.resolved;
    est.unresolved_cells = total.unresolved;
    est.pruned_cells = total.pruned;
    est.max_minor_valuation = total.max_e;
    Rational bound = total.unresolved_volume * scale * rpow(q, depth_) *
                     Rational(bezout_);
    est.error_bound = bound.get_d();
    if (total.unresolved > 0) est.flags.push_back("SingularCells");
    est.normalization = kUltrametricNormalization;
    return est;
  }

  const IntegralModel<Field>& model() const { return model_; }

 private:
  IntegralModel<Field> model_;
  int depth_;
  long bezout_;
  long cell_budget_;
  mutable std::atomic<long> visited_{0};
  mutable std::atomic<bool> abort_{false};
};

// Canonical measure of {F = c} in a ball or annulus, exact on ultrametric
// backends.
template <class Field>
MeasureEstimate canonical_measure(const Field& k, const PolyMap& F,
                                  const std::vector<Rational>& c, const Region& region,
                                  const MeasureOptions& opts = {}) {
  static_assert(Field::is_ultrametric, "canonical_measure: use real_fiber_measure on R");
  MeasureEstimate outer = MeasureEngine<Field>(k, F, c, region.t, opts.depth, opts.cell_budget).run(opts.threads);
  if (region.inner_t) {
    if (*region.inner_t >= region.t)
      throw std::invalid_argument("annulus needs inner radius below the outer radius");
    MeasureEstimate inner =
        MeasureEngine<Field>(k, F, c, *region.inner_t, opts.depth, opts.cell_budget).run(opts.threads);
    outer.value -= inner.value;
    outer.approx = outer.value.get_d();
    for (const auto& [j, v] : inner.chart_exact) {
      outer.chart_exact[j] -= v;
      outer.chart_approx[j] = outer.chart_exact[j].get_d();
    }
    outer.error_bound += inner.error_bound;
    outer.resolved_cells += inner.resolved_cells;
    outer.unresolved_cells += inner.unresolved_cells;
    outer.pruned_cells += inner.pruned_cells;
    outer.max_minor_valuation = std::max(outer.max_minor_valuation, inner.max_minor_valuation);
  }
  if (outer.error_bound > opts.tolerance)
    throw DepthInsufficient("error bound " + std::to_string(outer.error_bound) +
                            " exceeds tolerance at depth " + std::to_string(opts.depth));
  return outer;
}

// ---------------------------------------------------------------------------
// Fibers of a chart projection

template <class Field>
struct FiberPoint {
  Vec<Field> point;
  ChartIndex chart;
  NormValue minor;
  LiftCertificate<Field> certificate;
  Cell projected;
};

template <class Field>
struct FiberSolutions {
  // Points whose assigned chart is J.
  std::vector<FiberPoint<Field>> points;
  // All solutions over the base, whatever their chart.
  int cardinality = 0;
};

// Solutions z of F(z, y) = c over the base y of a projected cell (the non-J
// coordinates), inside the ball of radius q^{ycell.scale}.
template <class Field>
FiberSolutions<Field> fiber_solutions(const Field& k, const PolyMap& F,
                                      const std::vector<Rational>& c, const ChartIndex& J,
                                      const Cell& ycell, int depth, int extra = 8) {
  static_assert(Field::is_ultrametric, "fiber_solutions needs an ultrametric field");
  const int m = F.nvars(), r = F.rank();
  const int limit = depth + extra;
  IntegralModel<Field> model(k, F, c, ycell.scale, 2 * limit + 24);
  const Field& kw = model.field();
  const std::vector<int> rest = chart_complement(J, m);
  if (static_cast<int>(J.size()) != r || static_cast<int>(ycell.digits.size()) != m - r)
    throw std::invalid_argument("fiber_solutions: chart or cell has wrong size");
  Vec<Field> y0 = cell_base(kw, ycell);
  const int chart_index = static_cast<int>(
      std::find(model.charts().begin(), model.charts().end(), J) - model.charts().begin());

  PolyMap Fc = F;
  for (int i = 0; i < r; ++i)
    Fc.components[i] -= MultiPoly::constant(m, c[i]);

  FiberSolutions<Field> out;
  auto merge = [&](const Vec<Field>& z) {
    Vec<Field> x(m, kw.zero());
    for (int i = 0; i < r; ++i) x[J[i]] = z[i];
    for (int i = 0; i < m - r; ++i) x[rest[i]] = y0[i];
    return x;
  };
  std::function<void(const Cell&)> visit = [&](const Cell& zc) {
    const int n = zc.depth;
    Vec<Field> x0 = merge(cell_base(kw, zc));
    Vec<Field> diff = model.defect(x0);
    int vdiff = kInfiniteValuation;
    for (const auto& d : diff) {
      if (kw.is_zero(d)) continue;
      if (kw.valuation(d) < n) return;
      vdiff = std::min(vdiff, kw.valuation(d));
    }
    Mat<Field> jac = model.jacobian(x0);
    Mat<Field> a;
    for (const auto& row : jac) {
      Vec<Field> sub;
      for (int j : J) sub.push_back(row[j]);
      a.push_back(std::move(sub));
    }
    auto det = determinant(kw, a);
    const int e = kw.is_zero(det) ? kInfiniteValuation : kw.valuation(det);
    if (e >= n) {
      if (n >= limit)
        throw UnresolvedFiber("minor vanishes to depth " + std::to_string(n) +
                              " on a residue branch");
      for (const auto& child : child_cells(zc, kw.q())) visit(child);
      return;
    }
    Vec<Field> w = mat_vec(kw, adjugate(kw, a), diff);
    for (const auto& wi : w)
      if (!kw.is_zero(wi) && kw.valuation(wi) < n + e) return;
    // Exactly one solution in this cell.
    if (vdiff > 2 * e) {
      Vec<Field> start;
      for (const auto& xi : x0) start.push_back(xi * kw.uniformizer_power(-model.t()));
      try {
        auto cert = hensel_lift(kw, Fc, J, start, limit + model.t() + 4);
        ++out.cardinality;
        if (out.cardinality > F.bezout())
          throw CheckFailed("fiber cardinality exceeds the Bezout bound");
        Mat<Field> jo(r);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < m; ++j)
            jo[i].push_back(eval(kw, partial(F.components[i], j, kw.characteristic()), cert.point));
        if (argmax_chart(kw, jo, model.charts()) == chart_index) {
          FiberPoint<Field> fp;
          fp.point = cert.point;
          fp.chart = J;
          fp.minor = cert.minor;
          fp.projected = ycell;
          fp.certificate = std::move(cert);
          out.points.push_back(std::move(fp));
        }
        return;
      } catch (const NoContraction&) {
        // fall through and refine
      }
    }
    if (n >= limit)
      throw UnresolvedFiber("root not isolated to Hensel precision by depth " +
                            std::to_string(n));
    for (const auto& child : child_cells(zc, kw.q())) visit(child);
  };
  visit(root_cell(r, ycell.scale));
  return out;
}

// ---------------------------------------------------------------------------
// Independent oracle: residue counting

// #{x mod p^N in B_{p^t} : F(x) = c mod p^N} / p^{N(m-r)} on the integral
// model, rescaled to B_{p^t}. Counting descends digit by digit and keeps
// only prefixes with F = c modulo the current power. Q_p only.
Rational point_count_density(int p, const PolyMap& F, const std::vector<Rational>& c,
                             int t, int N, long node_cap = 200000000);

// ---------------------------------------------------------------------------
// Growth series

struct GrowthPoint {
  int t = 0;
  Rational exact;  // ball measure, ultrametric
  double measure = 0.0;
  double annulus = 0.0;
  double error_bound = 0.0;
};

struct GrowthSeries {
  long q = 0;
  int m = 0, r = 0;
  bool exact = false;
  // Points ordered outward (t increasing) or, for shells around the origin,
  // inward with t = -j.
  bool toward_origin = false;
  std::vector<GrowthPoint> points;
  double slope = 0.0, intercept = 0.0, residual = 0.0;
  int reference_slope = 0;
  double gamma_fit = 0.0;
  std::string normalization;
};

// Least-squares line through (t, log_q value) over the points with positive
// value: ball measures outward, shell measures toward the origin.
void fit_growth(GrowthSeries& series);

template <class Field>
GrowthSeries growth_series(const Field& k, const PolyMap& F, const std::vector<Rational>& c,
                           int t_max, const MeasureOptions& opts = {}) {
  static_assert(Field::is_ultrametric, "growth_series: use real_growth_series on R");
  GrowthSeries s;
  s.q = k.q();
  s.m = F.nvars();
  s.r = F.rank();
  s.exact = true;
  s.reference_slope = s.m - s.r;
  s.normalization = kUltrametricNormalization;
  const auto degrees = F.degrees();
  const int dmax = std::max(1, *std::max_element(degrees.begin(), degrees.end()));
  Rational previous = 0;
  for (int t = 0; t <= t_max; ++t) {
    MeasureOptions o = opts;
    // The integral model's target moves by d*t digits.
    o.depth = opts.depth + dmax * t;
    MeasureEstimate est = canonical_measure(k, F, c, Region{t, std::nullopt}, o);
    GrowthPoint gp;
    gp.t = t;
    gp.exact = est.value;
    gp.measure = est.approx;
    gp.annulus = Rational(est.value - previous).get_d();
    gp.error_bound = est.error_bound;
    previous = est.value;
    s.points.push_back(gp);
  }
  fit_growth(s);
  return s;
}

// ---------------------------------------------------------------------------
// Real backend

// Max-norm region over the listed coordinates (all when empty); coordinates
// outside the list are sampled in [-free_bound, free_bound].
struct RealRegion {
  double outer = 1.0;
  double inner = 0.0;
  std::vector<int> coords;
  double free_bound = 0.0;
};

// Stratified jittered grid over each chart's projected box; the fiber
// coordinate is solved by companion-matrix roots plus Newton (r = 1) or
// Newton from a seed grid (r > 1). Each solution counts for its argmax
// chart only, with weight 1/|d_J|.
MeasureEstimate real_fiber_measure(const PolyMap& F, const std::vector<Rational>& c,
                                   const RealRegion& region, long samples,
                                   std::uint64_t seed, int threads = 1);

struct RealFiberPoint {
  std::vector<double> point;
  int chart = 0;  // index into all_charts(m, r)
  std::vector<double> minors;
};

// Fiber points found from `samples` uniform draws of the free coordinates per
// chart; each point is kept for its argmax chart only.
std::vector<RealFiberPoint> real_fiber_points(const PolyMap& F, const std::vector<Rational>& c,
                                              const RealRegion& region, long samples,
                                              std::uint64_t seed);

// Balls of radius 2^t, t = t_min..t_max, as cumulative shells.
GrowthSeries real_growth_series(const PolyMap& F, const std::vector<Rational>& c,
                                int t_min, int t_max, long samples, std::uint64_t seed,
                                int threads = 1);

// Shells 2^{-j-1} <= |x|_coords <= 2^{-j}, j = 1..j_max.
GrowthSeries real_origin_shells(const PolyMap& F, const std::vector<Rational>& c,
                                int j_max, long samples, std::uint64_t seed,
                                const std::vector<int>& coords = {},
                                double free_factor = 2.0, int threads = 1);

// ---------------------------------------------------------------------------
// Reports

struct TemperedReport {
  int alpha = 0;
  std::vector<double> terms;
  std::vector<double> partial_sums;
  std::vector<double> tail_ratios;
  std::string verdict;  // "convergent", "divergent", "inconclusive"
  std::string note;
};

// Partial sums of sum_t mu(shell t) (1 + q^{2t})^{-alpha}.
TemperedReport tempered_report(const GrowthSeries& series, int alpha);

// Columns t, log_q_measure, fitted_line.
std::string emit_plotdata(const GrowthSeries& series);
// Columns t, measure_numerator, measure_denominator, error_bound.
std::string growth_csv(const GrowthSeries& series);

}  // namespace tempered
