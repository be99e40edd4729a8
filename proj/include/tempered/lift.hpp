#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "tempered/fields.hpp"
#include "tempered/poly.hpp"

namespace tempered {

// A coset base + pi^depth R^m inside pi^{-scale} R^m. Coordinates of the base
// are stored as packed residues modulo pi^depth (see Field::from_residue).
struct Cell {
  std::vector<Integer> digits;
  int depth = 0;
  int scale = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend bool operator<(const Cell& a, const Cell& b) {
    if (a.scale != b.scale) return a.scale < b.scale;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.digits < b.digits;
  }
};

Cell root_cell(int m, int scale = 0);
// The q^m children at depth + 1, in lexicographic digit order.
std::vector<Cell> child_cells(const Cell& c, long q);
// Cell of depth n containing an integral point given by its residues mod q^n.
bool cell_contains(const Cell& outer, const Cell& inner, long q);
std::string cell_to_json(const Cell& c);

template <class Field>
Vec<Field> cell_base(const Field& k, const Cell& c) {
  Vec<Field> x;
  x.reserve(c.digits.size());
  for (const auto& d : c.digits) x.push_back(k.from_residue(d, c.depth));
  return x;
}

template <class Field>
Cell cell_of_point(const Field& k, const Vec<Field>& u, int depth, int scale) {
  Cell c;
  c.depth = depth;
  c.scale = scale;
  for (const auto& ui : u) c.digits.push_back(k.residue(ui, depth));
  return c;
}

enum class CellStatus { ZeroBearing, Empty, Unresolved };
std::string to_string(CellStatus s);

struct ZeroTreeNode {
  Cell cell;
  CellStatus status;
};

struct ZeroTree {
  Cell root;
  int max_depth = 0;
  std::vector<ZeroTreeNode> nodes;  // pre-order

  std::vector<Cell> cells_at(int depth, CellStatus status) const;
  std::size_t unresolved_count() const;
  // One JSON object per line: {"depth":..,"digits":[..],"status":..}.
  std::string to_jsonl() const;
};

template <class Field>
struct LiftCertificate {
  Vec<Field> point;
  NormValue residual;
  NormValue minor;
  ChartIndex chart;
  // log_q of |F(x0)| / |det d_J F(x0)|^2 (negative for a contraction).
  Rational contraction_exponent;
  int steps = 0;
};

// ---------------------------------------------------------------------------
// Hensel / Newton lifting

// Newton iteration on the square system in the chart variables J, the other
// coordinates frozen at x0. Ultrametric: certified when |F(x0)| <
// |det d_J F(x0)|^2 after normalizing to an integral map on R^m; the result
// satisfies val F_i >= target. Real: residual below 10^-target.
template <class Field>
LiftCertificate<Field> hensel_lift(const Field& k, const PolyMap& F,
                                   const ChartIndex& J, const Vec<Field>& x0,
                                   int target) {
  using Scalar = typename Field::Scalar;
  const int m = F.nvars(), r = F.rank();
  if (static_cast<int>(J.size()) != r || static_cast<int>(x0.size()) != m)
    throw std::invalid_argument("hensel_lift: chart or point has wrong size");

  if constexpr (Field::is_ultrametric) {
    // x = pi^v u with u integral.
    const int v = std::min(0, min_valuation(k, std::span<const Scalar>(x0)));
    const std::vector<int> degrees = F.degrees();
    const int dmax = std::max(1, *std::max_element(degrees.begin(), degrees.end()));
    const int guess = target + 2 * std::abs(v) * dmax + 16;
    const Field kw = k.with_working_precision(std::max(k.precision(), 2 * guess));

    std::vector<CompiledPoly<Field>> g(r);
    std::vector<int> shift(r);
    std::vector<std::vector<CompiledPoly<Field>>> dg(r, std::vector<CompiledPoly<Field>>(r));
    for (int i = 0; i < r; ++i) {
      g[i] = CompiledPoly<Field>(kw, F.components[i]).rescaled(kw, -v);
      int low = g[i].min_coefficient_valuation(kw);
      shift[i] = low >= kInfiniteValuation ? 0 : -std::min(0, low);
      g[i] = g[i].scaled(kw.uniformizer_power(shift[i]));
      for (int j = 0; j < r; ++j)
        dg[i][j] = CompiledPoly<Field>(kw, partial(F.components[i], J[j], kw.characteristic()))
                       .rescaled(kw, -v)
                       .scaled(kw.uniformizer_power(shift[i] + v));
    }
    Vec<Field> u;
    for (const auto& xi : x0) u.push_back(kw.with_precision(xi, kw.precision()) * kw.uniformizer_power(-v));

    auto values = [&](const Vec<Field>& at) {
      Vec<Field> out;
      for (int i = 0; i < r; ++i) out.push_back(g[i].eval(kw, at));
      return out;
    };
    auto jac = [&](const Vec<Field>& at) {
      Mat<Field> a(r, Vec<Field>(r, kw.zero()));
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) a[i][j] = dg[i][j].eval(kw, at);
      return a;
    };
    auto done = [&](const Vec<Field>& gv) {
      for (int i = 0; i < r; ++i)
        if (!kw.is_zero(gv[i]) && kw.valuation(gv[i]) < target + shift[i]) return false;
      return true;
    };

    Vec<Field> gv = values(u);
    Mat<Field> a = jac(u);
    Scalar det = determinant(kw, a);
    const int e0 = kw.is_zero(det) ? kInfiniteValuation : kw.valuation(det);
    int vg0 = kInfiniteValuation;
    for (const auto& gi : gv)
      if (!kw.is_zero(gi)) vg0 = std::min(vg0, kw.valuation(gi));
    if (e0 >= kInfiniteValuation || (vg0 < kInfiniteValuation && vg0 <= 2 * e0))
      throw NoContraction("|F(x0)| = q^-" + std::to_string(vg0) +
                          " is not below |det|^2 = q^-" +
                          std::to_string(e0 >= kInfiniteValuation ? e0 : 2 * e0));
    int steps = 0;
    while (!done(gv)) {
      if (++steps > 200) throw PrecisionExhausted("Newton iteration did not reach the target");
      Vec<Field> delta = matrix_solve(kw, a, gv);
      for (int j = 0; j < r; ++j) u[J[j]] = u[J[j]] - delta[j];
      gv = values(u);
      a = jac(u);
    }
    LiftCertificate<Field> cert;
    for (const auto& ui : u) cert.point.push_back(ui * kw.uniformizer_power(v));
    Vec<Field> residual;
    for (const auto& f : F.components) residual.push_back(eval(kw, f, cert.point));
    cert.residual = vec_norm(kw, residual);
    cert.minor = kw.norm(eval(kw, jacobian_minor(F, J, kw.characteristic()), cert.point));
    cert.chart = J;
    cert.contraction_exponent =
        vg0 >= kInfiniteValuation ? Rational(-kInfiniteValuation) : Rational(2 * e0 - vg0);
    cert.steps = steps;
    return cert;
  } else {
    const double tol = std::pow(10.0, -target);
    std::vector<CompiledPoly<Field>> g;
    std::vector<std::vector<CompiledPoly<Field>>> dg(r);
    for (int i = 0; i < r; ++i) {
      g.emplace_back(k, F.components[i]);
      for (int j = 0; j < r; ++j) dg[i].emplace_back(k, partial(F.components[i], J[j]));
    }
    Vec<Field> u = x0;
    auto residual = [&](const Vec<Field>& at) {
      Vec<Field> out;
      for (int i = 0; i < r; ++i) out.push_back(g[i].eval(k, at));
      return out;
    };
    Vec<Field> gv = residual(u);
    int steps = 0;
    while (vec_norm(k, gv).magnitude() > tol) {
      if (++steps > 60) throw NoContraction("Newton iteration did not converge");
      Mat<Field> a(r, Vec<Field>(r, 0.0));
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) a[i][j] = dg[i][j].eval(k, u);
      Vec<Field> delta;
      try {
        delta = matrix_solve(k, a, gv);
      } catch (const SingularAtPrecision&) {
        throw NoContraction("singular Jacobian during Newton iteration");
      }
      for (int j = 0; j < r; ++j) u[J[j]] -= delta[j];
      gv = residual(u);
      if (!std::isfinite(vec_norm(k, gv).magnitude()))
        throw NoContraction("Newton iteration diverged");
    }
    LiftCertificate<Field> cert;
    cert.point = u;
    cert.residual = vec_norm(k, gv);
    cert.minor = k.norm(eval(k, jacobian_minor(F, J), u));
    cert.chart = J;
    cert.contraction_exponent = Rational(0);
    cert.steps = steps;
    return cert;
  }
}

// ---------------------------------------------------------------------------
// Zero-locus search over cells

// Decides, cell by cell, whether a polynomial has a zero in a coset of
// pi^n R^m inside pi^{-scale} R^m. Works with f(pi^{-scale} u) scaled to have
// integral coefficients; the Taylor expansion at the cell base
//   f(x0 + pi^n h) = sum_beta (Hasse_beta f)(x0) pi^{n|beta|} h^beta
// gives an exact emptiness test, and one-variable Hensel gives existence.
template <class Field>
class ZeroSearcher {
 public:
  using Scalar = typename Field::Scalar;

  ZeroSearcher(const Field& k, const MultiPoly& f, int scale, int max_depth)
      : k_(k.with_working_precision(std::max(k.precision(), 2 * max_depth + 24))),
        scale_(scale) {
    if (f.is_zero()) throw std::invalid_argument("zero polynomial has no locus tree");
    m_ = f.nvars();
    f_ = CompiledPoly<Field>(k_, f).rescaled(k_, scale);
    int low = f_.min_coefficient_valuation(k_);
    shift_ = -low;
    f_ = f_.scaled(k_.uniformizer_power(shift_));
    const int d = f.degree();
    enumerate_betas(d);
    for (const auto& beta : betas_) {
      int order = 0;
      for (int b : beta) order += b;
      hasse_.push_back(CompiledPoly<Field>(k_, hasse_derivative(f, beta))
                           .rescaled(k_, scale)
                           .scaled(k_.uniformizer_power(shift_ - scale * order)));
      orders_.push_back(order);
    }
  }

  const Field& field() const { return k_; }
  int nvars() const { return m_; }
  int scale() const { return scale_; }

  enum class Local { Empty, Zero, Split };

  Local classify(const Cell& c) const {
    Vec<Field> x0 = cell_base(k_, c);
    Scalar fx = f_.eval(k_, x0);
    if (k_.is_zero(fx)) return Local::Zero;
    const int v0 = k_.valuation(fx);
    const int n = c.depth;
    int bound = kInfiniteValuation;
    std::vector<int> first_order(m_, kInfiniteValuation);
    for (std::size_t b = 0; b < hasse_.size(); ++b) {
      Scalar hv = hasse_[b].eval(k_, x0);
      if (k_.is_zero(hv)) continue;
      int val = k_.valuation(hv);
      bound = std::min(bound, val + n * orders_[b]);
      if (orders_[b] == 1)
        for (int i = 0; i < m_; ++i)
          if (betas_[b][i] == 1) first_order[i] = val;
    }
    if (v0 < bound) return Local::Empty;
    for (int i = 0; i < m_; ++i) {
      int e = first_order[i];
      if (e < kInfiniteValuation && v0 > 2 * e && v0 - e >= n) return Local::Zero;
    }
    return Local::Split;
  }

  // Depth-first search below c, stopping at the first certified zero.
  CellStatus search(const Cell& c, int depth_limit) const {
    Local s = classify(c);
    if (s == Local::Zero) return CellStatus::ZeroBearing;
    if (s == Local::Empty) return CellStatus::Empty;
    if (c.depth >= depth_limit) return CellStatus::Unresolved;
    bool unresolved = false;
    for (const auto& child : child_cells(c, k_.q())) {
      CellStatus cs = search(child, depth_limit);
      if (cs == CellStatus::ZeroBearing) return cs;
      if (cs == CellStatus::Unresolved) unresolved = true;
    }
    return unresolved ? CellStatus::Unresolved : CellStatus::Empty;
  }

 private:
  void enumerate_betas(int d) {
    Exponent beta(m_, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
      if (i == m_) {
        int order = 0;
        for (int b : beta) order += b;
        if (order > 0) betas_.push_back(beta);
        return;
      }
      for (int b = 0; b <= left; ++b) {
        beta[i] = b;
        rec(i + 1, left - b);
      }
      beta[i] = 0;
    };
    rec(0, d);
  }

  Field k_;
  int scale_;
  int m_ = 0;
  int shift_ = 0;
  CompiledPoly<Field> f_;
  std::vector<Exponent> betas_;
  std::vector<CompiledPoly<Field>> hasse_;
  std::vector<int> orders_;
};

inline constexpr int kDefaultExtraSearch = 6;

// Tree of cells below region down to depth N. Every depth-N cell meeting
// Z(f) ends up zero-bearing or unresolved; empty cells are certified.
template <class Field>
ZeroTree zero_cells(const Field& k, const MultiPoly& f, const Cell& region,
                    int depth, bool throw_on_unresolved = false,
                    int extra_search = kDefaultExtraSearch) {
  ZeroSearcher<Field> searcher(k, f, region.scale, depth + extra_search);
  ZeroTree tree;
  tree.root = region;
  tree.max_depth = depth;
  std::function<CellStatus(const Cell&)> visit = [&](const Cell& c) -> CellStatus {
    std::size_t index = tree.nodes.size();
    tree.nodes.push_back({c, CellStatus::Unresolved});
    CellStatus status;
    if (c.depth >= depth) {
      status = searcher.search(c, depth + extra_search);
    } else if (searcher.classify(c) == ZeroSearcher<Field>::Local::Empty) {
      status = CellStatus::Empty;
    } else {
      bool any_zero = false, any_unresolved = false;
      for (const auto& child : child_cells(c, k.q())) {
        CellStatus cs = visit(child);
        any_zero = any_zero || cs == CellStatus::ZeroBearing;
        any_unresolved = any_unresolved || cs == CellStatus::Unresolved;
      }
      status = any_zero ? CellStatus::ZeroBearing
               : any_unresolved ? CellStatus::Unresolved
                                : CellStatus::Empty;
    }
    tree.nodes[index].status = status;
    return status;
  };
  visit(region);
  if (throw_on_unresolved && tree.unresolved_count() > 0)
    throw DepthExceeded(std::to_string(tree.unresolved_count()) +
                        " cells unresolved at depth " + std::to_string(depth));
  return tree;
}

struct DistanceResult {
  NormValue distance;
  // False when only an upper bound is known (resolution reached).
  bool exact;
};

// Ultrametric distance from x to Z(f): q^{-j} for the deepest j whose ball
// around x still meets Z(f). Balls larger than the unit ball are searched by
// rescaling, up to max_scale extra digits.
template <class Field>
DistanceResult dist_to_zero(const Field& k, const MultiPoly& f,
                            const Vec<Field>& x, int max_depth,
                            int max_scale = 8,
                            int extra_search = kDefaultExtraSearch) {
  static_assert(Field::is_ultrametric, "dist_to_zero needs an ultrametric field");
  {
    const Field kw = k.with_working_precision(std::max(k.precision(), 2 * max_depth + 24));
    Vec<Field> xw;
    for (const auto& xi : x) xw.push_back(kw.with_precision(xi, kw.precision()));
    if (kw.is_zero(eval(kw, f, xw)))
      return {NormValue::zero_ultrametric(k.q()), true};
  }
  const int v = min_valuation(k, std::span<const typename Field::Scalar>(x));
  const int base_scale = std::max(0, -v);
  for (int s = base_scale; s <= base_scale + max_scale; ++s) {
    ZeroSearcher<Field> searcher(k, f, s, s + max_depth + extra_search);
    const Field& kw = searcher.field();
    Vec<Field> u;
    for (const auto& xi : x)
      u.push_back(kw.with_precision(xi, kw.precision()) * kw.uniformizer_power(s));
    int last_zero = -1;
    bool unresolved = false;
    // Levels j in u-space; distance q^{s-j}.
    for (int j = 0; j <= s + max_depth; ++j) {
      Cell c = cell_of_point(kw, u, j, s);
      CellStatus st = searcher.search(c, std::max(j, s) + extra_search);
      if (st == CellStatus::ZeroBearing) {
        last_zero = j;
        continue;
      }
      if (st == CellStatus::Unresolved) unresolved = true;
      break;
    }
    if (last_zero < 0) {
      if (unresolved)
        return {NormValue::ultrametric(k.q(), Rational(-s)), false};
      continue;  // no zero in this ball, enlarge
    }
    bool reached_end = last_zero == s + max_depth;
    return {NormValue::ultrametric(k.q(), Rational(last_zero - s)),
            !(unresolved || reached_end)};
  }
  throw EmptyLocus("no zero within q^" + std::to_string(base_scale + max_scale) +
                   " of the point");
}

}  // namespace tempered
