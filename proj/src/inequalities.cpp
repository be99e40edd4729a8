#include "tempered/inequalities.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace tempered {

double ExponentFit::constant() const { return std::pow(log_base, log_c.get_d()); }

EnvelopeFit lower_envelope_fit(const std::vector<std::pair<Rational, Rational>>& xy) {
  std::map<Rational, Rational> low;
  for (const auto& [x, y] : xy) {
    auto it = low.find(x);
    if (it == low.end()) low.emplace(x, y);
    else if (y < it->second) it->second = y;
  }
  EnvelopeFit out;
  out.points = static_cast<int>(low.size());
  if (low.size() < 2) return out;
  const Rational n = static_cast<long>(low.size());
  Rational sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : low) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const Rational intercept = (sy - out.slope * sx) / n;
  double ss = 0.0;
  for (const auto& [x, y] : low) {
    const double e = Rational(y - intercept - out.slope * x).get_d();
    ss += e * e;
  }
  out.residual = std::sqrt(ss / static_cast<double>(low.size()));
  return out;
}

Rational min_offset(const std::vector<std::pair<Rational, Rational>>& xy, const Rational& slope) {
  Rational best = 0;
  bool first = true;
  for (const auto& [x, y] : xy) {
    Rational v = y - slope * x;
    if (first || v < best) best = v;
    first = false;
  }
  return best;
}

std::string fit_csv(const ExponentFit& fit) {
  std::ostringstream out;
  out.precision(17);
  const std::size_t m = fit.samples.empty() ? 0 : fit.samples[0].point.size();
  for (std::size_t i = 0; i < m; ++i) out << "x" << i << ",";
  out << "value,dist,norm\n";
  auto num = [&](const Rational& l) { return std::pow(fit.log_base, l.get_d()); };
  for (const auto& s : fit.samples) {
    for (const auto& c : s.point) out << '"' << c << '"' << ",";
    out << num(s.log_value) << "," << num(s.log_dist) << "," << num(s.log_norm) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Real backend

namespace {

double eval_double(const MultiPoly& f, const std::vector<double>& x) {
  double acc = 0.0;
  for (const auto& [e, c] : f.terms()) {
    double v = c.get_d();
    for (std::size_t j = 0; j < x.size(); ++j)
      for (int rep = 0; rep < e[j]; ++rep) v *= x[j];
    acc += v;
  }
  return acc;
}

double max_norm(const std::vector<double>& x) {
  double n = 0.0;
  for (double v : x) n = std::max(n, std::fabs(v));
  return n;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::vector<std::vector<double>> shell_points(const PolyMap& F, const std::vector<Rational>& c,
                                              const std::vector<int>& radii, long samples,
                                              std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  for (int t : radii) {
    RealRegion region;
    region.inner = std::ldexp(1.0, t);
    region.outer = std::ldexp(1.0, t + 1);
    for (auto& p : real_fiber_points(F, c, region, samples, detail::mix(seed, t + 64)))
      out.push_back(std::move(p.point));
  }
  return out;
}

}  // namespace

ExponentFit real_gradient_fit(const PolyMap& F, const std::vector<std::vector<double>>& points) {
  ExponentFit fit;
  fit.inequality = "||grad_r F(x)|| >= C / ||x||^gamma on L_c, ||x|| >= 1";
  fit.backend = "real";
  fit.log_base = std::exp(1.0);
  fit.flags.push_back("sampled");
  const auto grad = generalized_gradient(F);
  std::vector<std::pair<Rational, Rational>> xy;
  for (const auto& x : points) {
    std::vector<double> minors;
    for (const auto& [J, minor] : grad) minors.push_back(eval_double(minor, x));
    const double g = max_norm(minors), n = max_norm(x);
    if (g == 0.0 || n == 0.0) {
      fit.flags.push_back("degenerate-point");
      continue;
    }
    FitSample s;
    for (double v : x) s.point.push_back(fmt(v));
    s.log_value = Rational(std::log(g));
    s.log_norm = Rational(std::log(n));
    xy.emplace_back(s.log_norm, s.log_value);
    fit.samples.push_back(std::move(s));
  }
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

ExponentFit real_gradient_lower_bound(const PolyMap& F, const std::vector<Rational>& c,
                                      const std::vector<int>& radii, long samples,
                                      std::uint64_t seed) {
  return real_gradient_fit(F, shell_points(F, c, radii, samples, seed));
}

std::vector<std::vector<double>> cusp_witness(const std::vector<double>& ns) {
  std::vector<std::vector<double>> out;
  for (double n : ns) out.push_back({n, -std::cbrt(2.0 * n), 1.0 / n});
  return out;
}

EulerReport real_euler_bound_check(const MultiPoly& f, const Rational& c,
                                   const std::vector<int>& radii, long samples,
                                   std::uint64_t seed) {
  if (!euler_residual(f).is_zero())
    throw std::invalid_argument("euler_bound_check: f is not homogeneous");
  if (c == 0) throw std::invalid_argument("euler_bound_check: c must be nonzero");
  const int m = f.nvars();
  EulerReport rep;
  rep.backend = "real";
  rep.constant = m;
  rep.flags.push_back("sampled");
  std::vector<MultiPoly> grad;
  for (int j = 0; j < m; ++j) grad.push_back(partial(f, j));
  const double lhs = std::fabs(f.degree() * c.get_d());
  bool first = true;
  for (const auto& x : shell_points(PolyMap({f}), {c}, radii, samples, seed)) {
    ++rep.points;
    std::vector<double> g;
    for (const auto& gj : grad) g.push_back(eval_double(gj, x));
    const double rhs = rep.constant * max_norm(x) * max_norm(g);
    if (rhs < lhs * (1.0 - 1e-9)) ++rep.violations;
    const double ratio = rhs / lhs;
    rep.min_ratio = first ? ratio : std::min(rep.min_ratio, ratio);
    first = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Characteristic p examples

DeligneTable deligne_example(int p, const std::vector<int>& depths, long budget,
                             int locus_depth) {
  DeligneTable table;
  table.p = p;
  const std::string ps = std::to_string(p);
  table.polynomial = "x0^" + std::to_string(p + 1) + " + x0^" + ps + "*x1 + x1^" + ps;
  const MultiPoly f = parse_poly(table.polynomial, 2);
  int top = locus_depth;
  for (int n : depths) top = std::max(top, n);
  const LaurentField k(p, p * top + 8);

  if (locus_depth > 0) {
    auto rep = critical_cells(k, PolyMap({f}), locus_depth);
    bool on_axis = true;
    for (const auto* cells : {&rep.critical, &rep.unresolved})
      for (const auto& c : *cells) on_axis = on_axis && c.digits[0] == 0;
    table.locus_checked =
        on_axis && Integer(static_cast<long>(rep.critical.size())) == ipow(p, locus_depth);
  }

  const CompiledPoly<LaurentField> cf(k, f);
  for (int n : depths) {
    const Integer cells = ipow(p, n);
    if (cells > budget)
      throw BudgetExceeded("deligne_example: p^" + std::to_string(n) + " residues exceed the budget");
    std::set<Integer> hit;
    for (long idx = 0; idx < cells.get_si(); ++idx) {
      auto y = k.from_residue(Integer(idx), n);
      hit.insert(k.residue(cf.eval(k, {k.zero(), y}), n));
    }
    DeligneRow row;
    row.n = n;
    row.hit = static_cast<long>(hit.size());
    row.cells = cells;
    row.density = Rational(row.hit, cells);
    row.density.canonicalize();
    table.rows.push_back(row);
  }
  table.strictly_decreasing = table.rows.size() >= 2;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (!(table.rows[i].density < table.rows[i - 1].density)) table.strictly_decreasing = false;
  return table;
}

PolyMap deligne_stability_map(int p, int n) {
  const int vars = p + 2;  // y, x_1..x_p, T
  MultiPoly f = MultiPoly::variable(vars, 0).pow(n);
  for (int i = 1; i <= p; ++i)
    f += MultiPoly::variable(vars, p + 1).pow(i - 1) * MultiPoly::variable(vars, i).pow(p);
  return PolyMap({f});
}

DeligneStability deligne_stability(int p, int n, int depth, std::uint64_t seed) {
  if (n < 2 || n % p == 0) throw std::invalid_argument("deligne_stability: need n > 1 prime to p");
  DeligneStability out;
  out.p = p;
  out.n = n;
  out.depth = depth;
  const LaurentField k(p, 2 * depth + 16);
  const std::vector<LaurentField::Scalar> params{k.uniformizer_power(1)};
  auto rep = critical_cells(k, deligne_stability_map(p, n), depth, params);
  out.critical_cells = static_cast<long>(rep.critical.size() + rep.unresolved.size());
  out.value_cells = static_cast<long>(rep.values.size());

  std::vector<std::pair<std::string, LaurentField::Scalar>> values{
      {"0", k.zero()},
      {"1", k.one()},
      {"t", k.uniformizer_power(1)},
      {"1 + t^2", k.one() + k.uniformizer_power(2)}};
  std::mt19937_64 rng(detail::mix(seed, 5));
  for (int i = 0; i < 4; ++i) {
    auto c = k.from_residue(detail::random_residue(rng, p, depth + 2), depth + 2);
    values.emplace_back(c.to_string(), c);
  }
  for (const auto& [name, c] : values)
    for (int s = 0; s <= depth; ++s) {
      auto v = stability_probe(k, rep, Vec<LaurentField>{c}, s);
      out.any_stable = out.any_stable || v.verdict == "stably-non-critical";
      out.verdicts.emplace_back(name, v);
    }
  return out;
}

// ---------------------------------------------------------------------------

IcpReport icp_classify(const std::vector<Rational>& a, bool run_fit, long samples,
                       std::uint64_t seed) {
  if (a.size() != 5) throw std::invalid_argument("icp_classify: need a0..a4");
  IcpReport rep;
  MultiPoly F = MultiPoly::monomial(3, {2, 0, 2}, Rational(1));
  for (int i = 0; i <= 4; ++i)
    if (a[i] != 0) F.add_term({0, 4 - i, i}, a[i]);
  rep.polynomial = F.to_string();
  if (a[0] != 0) rep.label = "case-I";
  else if (a[1] != 0) rep.label = "case-II";
  else rep.label = "not-ICP";
  if (rep.label == "not-ICP") {
    rep.note = "Z^2 divides P4: the whole Y-axis is critical for Z^2 + P4";
    return rep;
  }
  if (rep.label == "case-I")
    rep.note = "gradient bounded below on L_c expected (gamma = 0)";
  else
    rep.note = "potential gamma > 0; data reported without a verdict";
  if (run_fit) {
    rep.fit = real_gradient_lower_bound(PolyMap({F}), {Rational(1)}, {0, 1, 2, 3, 4, 5},
                                        samples, seed);
    rep.has_fit = true;
  }
  return rep;
}

}  // namespace tempered
