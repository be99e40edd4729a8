// Batch front end: reads an experiment config, runs one subcommand, writes a
// JSON report and CSV tables. Exit codes: 0 ok, 1 failed check, 2 bad
// config, 3 budget exceeded.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "tempered/acceptance.hpp"
#include "tempered/forms.hpp"
#include "tempered/inequalities.hpp"
#include "tempered/lift.hpp"
#include "tempered/measure.hpp"

using nlohmann::ordered_json;
using namespace tempered;
using namespace tempered::cli;

namespace {

struct Outcome {
  ordered_json result = ordered_json::object();
  std::string summary;
  bool ok = true;
  std::string normalization = kUltrametricNormalization;
  int depth = 0;
  double error_bound = 0.0;
  std::string field;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string scalar_str(double x) { return num(x); }
template <class S>
std::string scalar_str(const S& x) {
  return x.to_string();
}

template <class V>
ordered_json scalars(const V& x) {
  ordered_json out = ordered_json::array();
  for (const auto& xi : x) out.push_back(scalar_str(xi));
  return out;
}

ordered_json rationals(const std::vector<Rational>& x) {
  ordered_json out = ordered_json::array();
  for (const auto& xi : x) out.push_back(to_string(xi));
  return out;
}

void need_map(const ExperimentConfig& cfg) {
  if (cfg.components.empty()) throw ConfigError("map.components: this command needs a polynomial map");
}

void need_single(const ExperimentConfig& cfg) {
  need_map(cfg);
  if (cfg.map.rank() != 1) throw ConfigError("map.components: this command takes one polynomial");
}

template <class Fn>
auto with_ultrametric(const ExperimentConfig& cfg, Fn&& fn) {
  if (cfg.backend == "padic") return fn(PadicField(cfg.p, cfg.precision));
  if (cfg.backend == "laurent") return fn(LaurentField(cfg.p, cfg.precision, cfg.degree));
  throw ConfigError("field.backend: this command needs padic or laurent");
}

template <class Field>
Vec<Field> to_vec(const Field& k, const std::vector<Rational>& x) {
  Vec<Field> out;
  for (const auto& xi : x) out.push_back(k.from_rational(xi));
  return out;
}

void write_csv(const ExperimentConfig& cfg, const std::string& name, const std::string& body,
               Outcome& out) {
  if (cfg.csv_dir.empty()) return;
  std::filesystem::create_directories(cfg.csv_dir);
  const auto path = std::filesystem::path(cfg.csv_dir) / name;
  std::ofstream f(path);
  if (!f) throw ConfigError("output.csv_dir: cannot write " + path.string());
  f << body;
  out.result["csv"].push_back(path.string());
}

ordered_json fit_json(const ExponentFit& fit) {
  ordered_json j;
  j["inequality"] = fit.inequality;
  j["backend"] = fit.backend;
  j["log_base"] = fit.log_base;
  j["samples"] = fit.samples.size();
  j["alpha"] = to_string(fit.alpha);
  j["beta"] = to_string(fit.beta);
  j["gamma"] = to_string(fit.gamma);
  j["gamma_approx"] = fit.gamma.get_d();
  j["log_c"] = to_string(fit.log_c);
  j["constant"] = fit.constant();
  j["violation_margin"] = to_string(fit.violation_margin);
  j["residual"] = fit.residual;
  j["empty_locus"] = fit.empty_locus;
  j["inexact_distances"] = fit.inexact_distances;
  j["refit_samples"] = fit.refit_samples;
  j["refit_violation_rate"] = fit.refit_violation_rate;
  j["refit"] = fit.refit;
  if (fit.growth_constant >= 0) {
    j["growth_constant"] = to_string(fit.growth_constant);
    j["growth_violations"] = fit.growth_violations;
  }
  j["flags"] = fit.flags;
  return j;
}

ordered_json series_json(const GrowthSeries& s) {
  ordered_json j;
  j["q"] = s.q;
  j["m"] = s.m;
  j["r"] = s.r;
  j["exact"] = s.exact;
  j["toward_origin"] = s.toward_origin;
  for (const auto& p : s.points) {
    ordered_json row;
    row["t"] = p.t;
    if (s.exact) row["measure_exact"] = to_string(p.exact);
    row["measure"] = p.measure;
    row["annulus"] = p.annulus;
    row["error_bound"] = p.error_bound;
    j["points"].push_back(row);
  }
  j["slope"] = s.slope;
  j["intercept"] = s.intercept;
  j["residual"] = s.residual;
  j["reference_slope"] = s.reference_slope;
  j["gamma_fit"] = s.gamma_fit;
  return j;
}

ordered_json estimate_json(const MeasureEstimate& e) {
  ordered_json j;
  j["exact"] = e.exact;
  if (e.exact) j["value"] = to_string(e.value);
  j["approx"] = e.approx;
  j["error_bound"] = e.error_bound;
  for (const auto& [J, v] : e.chart_approx)
    j["charts"][chart_to_string(J)] = e.exact ? ordered_json(to_string(e.chart_exact.at(J))) : ordered_json(v);
  if (e.exact) {
    j["resolved_cells"] = e.resolved_cells;
    j["unresolved_cells"] = e.unresolved_cells;
    j["pruned_cells"] = e.pruned_cells;
    j["max_minor_valuation"] = e.max_minor_valuation;
  } else {
    j["samples"] = e.samples;
    j["standard_error"] = e.standard_error;
    j["newton_failures"] = e.newton_failures;
  }
  j["flags"] = e.flags;
  return j;
}

RealRegion real_region(const ExperimentConfig& cfg) {
  RealRegion r;
  r.outer = cfg.outer;
  r.inner = cfg.inner;
  r.coords = cfg.coords;
  r.free_bound = cfg.free_bound;
  return r;
}

MeasureOptions measure_options(const ExperimentConfig& cfg) {
  MeasureOptions o;
  o.depth = cfg.working_depth;
  o.threads = cfg.threads;
  if (cfg.tolerance > 0) o.tolerance = cfg.tolerance;
  o.cell_budget = cfg.cell_budget;
  return o;
}

ProbeOptions probe_options(const ExperimentConfig& cfg) {
  ProbeOptions o;
  o.depth = cfg.seed_depth;
  o.samples = cfg.samples;
  o.extra = cfg.probe_extra;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  return o;
}

// ---------------------------------------------------------------------------

Outcome cmd_measure(const ExperimentConfig& cfg) {
  need_map(cfg);
  Outcome out;
  MeasureEstimate est;
  if (cfg.backend == "real") {
    est = real_fiber_measure(cfg.map, cfg.c, real_region(cfg), cfg.samples, cfg.seed, cfg.threads);
    out.field = "real";
    out.normalization = kRealNormalization;
  } else {
    est = with_ultrametric(cfg, [&](const auto& k) {
      out.field = k.describe();
      return canonical_measure(k, cfg.map, cfg.c, Region{cfg.t, cfg.inner_t}, measure_options(cfg));
    });
    out.depth = cfg.working_depth;
  }
  out.error_bound = est.error_bound;
  out.result = estimate_json(est);
  out.summary = "measure " + (est.exact ? to_string(est.value) : num(est.approx)) +
                " (error bound " + num(est.error_bound) + ")";
  return out;
}

Outcome cmd_growth(const ExperimentConfig& cfg) {
  need_map(cfg);
  Outcome out;
  GrowthSeries s;
  if (cfg.backend == "real") {
    s = cfg.toward_origin
            ? real_origin_shells(cfg.map, cfg.c, cfg.shells, cfg.samples, cfg.seed, cfg.coords, 2.0,
                                 cfg.threads)
            : real_growth_series(cfg.map, cfg.c, cfg.t_min, cfg.t_max, cfg.samples, cfg.seed,
                                 cfg.threads);
    out.field = "real";
    out.normalization = kRealNormalization;
  } else {
    s = with_ultrametric(cfg, [&](const auto& k) {
      out.field = k.describe();
      return growth_series(k, cfg.map, cfg.c, cfg.t_max, measure_options(cfg));
    });
    out.depth = cfg.working_depth;
  }
  for (const auto& p : s.points) out.error_bound = std::max(out.error_bound, p.error_bound);
  out.result = series_json(s);
  if (cfg.alpha >= 0) {
    auto rep = tempered_report(s, cfg.alpha);
    out.result["tempered"] = {{"alpha", rep.alpha}, {"terms", rep.terms},
                              {"partial_sums", rep.partial_sums}, {"tail_ratios", rep.tail_ratios},
                              {"verdict", rep.verdict}, {"note", rep.note}};
  }
  write_csv(cfg, "growth.csv", growth_csv(s), out);
  write_csv(cfg, "plotdata.csv", emit_plotdata(s), out);
  out.summary = "growth slope " + num(s.slope) + " over " + std::to_string(s.points.size()) +
                " radii, gamma_fit " + num(s.gamma_fit);
  return out;
}

Outcome cmd_density(const ExperimentConfig& cfg) {
  need_map(cfg);
  if (cfg.backend != "padic") throw ConfigError("field.backend: density needs padic");
  Outcome out;
  out.field = PadicField(cfg.p, cfg.precision).describe();
  const Rational d = point_count_density(cfg.p, cfg.map, cfg.c, cfg.t, cfg.density_n, cfg.node_cap);
  out.depth = cfg.density_n;
  out.result["N"] = cfg.density_n;
  out.result["density"] = to_string(d);
  out.result["approx"] = d.get_d();
  out.summary = "point-count density " + to_string(d) + " at N = " + std::to_string(cfg.density_n);
  return out;
}

ChartIndex lift_chart(const ExperimentConfig& cfg) {
  const int r = cfg.map.rank(), m = cfg.map.nvars();
  ChartIndex J;
  if (cfg.lift_chart.empty())
    for (int i = 0; i < r; ++i) J.push_back(i);
  else
    J.assign(cfg.lift_chart.begin(), cfg.lift_chart.end());
  bool ok = static_cast<int>(J.size()) == r;
  for (std::size_t i = 0; i < J.size() && ok; ++i)
    ok = J[i] >= 0 && J[i] < m && (i == 0 || J[i] > J[i - 1]);
  if (!ok) throw ConfigError("lift.chart: need r increasing indices below m");
  return J;
}

Outcome cmd_lift(const ExperimentConfig& cfg) {
  need_map(cfg);
  if (static_cast<int>(cfg.lift_point.size()) != cfg.map.nvars())
    throw ConfigError("lift.point: needs one coordinate per variable");
  const ChartIndex J = lift_chart(cfg);
  Outcome out;
  auto report = [&](const auto& k) {
    out.field = k.describe();
    auto cert = hensel_lift(k, cfg.map, J, to_vec(k, cfg.lift_point), cfg.lift_digits);
    out.result["point"] = scalars(cert.point);
    out.result["chart"] = chart_to_string(cert.chart);
    out.result["residual"] = cert.residual.to_string();
    out.result["minor"] = cert.minor.to_string();
    out.result["contraction_exponent"] = to_string(cert.contraction_exponent);
    out.result["steps"] = cert.steps;
    out.summary = "lifted in " + std::to_string(cert.steps) + " steps, residual " +
                  cert.residual.to_string();
  };
  if (cfg.backend == "real") {
    report(RealField{});
    out.normalization = kRealNormalization;
  } else {
    with_ultrametric(cfg, [&](const auto& k) {
      report(k);
      return 0;
    });
  }
  out.depth = cfg.lift_digits;
  return out;
}

Outcome cmd_dist(const ExperimentConfig& cfg) {
  need_single(cfg);
  if (static_cast<int>(cfg.dist_point.size()) != cfg.map.nvars())
    throw ConfigError("dist.point: needs one coordinate per variable");
  Outcome out;
  with_ultrametric(cfg, [&](const auto& k) {
    out.field = k.describe();
    auto d = dist_to_zero(k, cfg.map.components[0], to_vec(k, cfg.dist_point), cfg.working_depth, 8,
                          cfg.guard);
    out.result["distance"] = d.distance.to_string();
    out.result["log_q_distance"] = d.distance.log_q();
    out.result["exact"] = d.exact;
    out.summary = "dist(x, Z(f)) = " + d.distance.to_string() + (d.exact ? "" : " (upper bound)");
    return 0;
  });
  out.depth = cfg.working_depth;
  return out;
}

Outcome cmd_h1(const ExperimentConfig& cfg) {
  need_single(cfg);
  Outcome out;
  auto fit = with_ultrametric(cfg, [&](const auto& k) {
    out.field = k.describe();
    return h1_probe(k, cfg.map.components[0], probe_options(cfg));
  });
  out.depth = cfg.seed_depth + cfg.probe_extra;
  out.result = fit_json(fit);
  write_csv(cfg, "h1_samples.csv", fit_csv(fit), out);
  out.summary = "alpha " + to_string(fit.alpha) + ", C " + num(fit.constant());
  return out;
}

Outcome cmd_h2(const ExperimentConfig& cfg) {
  need_single(cfg);
  Outcome out;
  auto fit = with_ultrametric(cfg, [&](const auto& k) {
    out.field = k.describe();
    return h2_probe(k, cfg.map.components[0], cfg.t_max, probe_options(cfg));
  });
  out.depth = cfg.seed_depth + cfg.probe_extra;
  out.result = fit_json(fit);
  write_csv(cfg, "h2_samples.csv", fit_csv(fit), out);
  out.summary = "alpha " + to_string(fit.alpha) + ", beta " + to_string(fit.beta) + ", C " +
                num(fit.constant());
  return out;
}

Outcome cmd_gradbound(const ExperimentConfig& cfg) {
  need_map(cfg);
  Outcome out;
  ExponentFit fit;
  if (cfg.backend == "real") {
    fit = real_gradient_lower_bound(cfg.map, cfg.c, cfg.radii, cfg.samples, cfg.seed);
    out.field = "real";
    out.normalization = kRealNormalization;
  } else {
    GradientOptions o;
    o.radii = cfg.radii;
    o.samples = cfg.samples;
    o.depth = cfg.working_depth;
    o.seed = cfg.seed;
    fit = with_ultrametric(cfg, [&](const auto& k) {
      out.field = k.describe();
      return gradient_lower_bound(k, cfg.map, cfg.c, o);
    });
    out.depth = cfg.working_depth;
  }
  out.result = fit_json(fit);
  write_csv(cfg, "gradbound_samples.csv", fit_csv(fit), out);
  out.summary = "gamma " + to_string(fit.gamma) + ", C " + num(fit.constant());
  return out;
}

template <class Field>
ordered_json critical_json(const CriticalReport<Field>& rep) {
  ordered_json j;
  j["depth"] = rep.depth;
  j["critical_cells"] = rep.critical.size();
  j["unresolved_cells"] = rep.unresolved.size();
  j["norm_form"] = rep.norm_form;
  for (const auto& v : rep.values)
    j["value_cells"].push_back({{"base", scalars(v.base)}, {"depth", v.depth}});
  for (const auto& c : rep.critical) j["critical"].push_back(ordered_json::parse(cell_to_json(c)));
  return j;
}

Outcome cmd_critical(const ExperimentConfig& cfg) {
  need_map(cfg);
  Outcome out;
  with_ultrametric(cfg, [&](const auto& k) {
    out.field = k.describe();
    auto rep = critical_cells(k, cfg.map, cfg.working_depth, {}, cfg.guard);
    out.result = critical_json(rep);
    std::string csv = "cell,base\n";
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
      csv += std::to_string(i);
      for (const auto& b : rep.values[i].base) csv += ",\"" + scalar_str(b) + "\"";
      csv += "\n";
    }
    write_csv(cfg, "critical_values.csv", csv, out);
    out.summary = std::to_string(rep.critical.size()) + " critical and " +
                  std::to_string(rep.unresolved.size()) + " unresolved cells, " +
                  std::to_string(rep.values.size()) + " value cells";
    return 0;
  });
  out.depth = cfg.working_depth;
  return out;
}

Outcome cmd_stability(const ExperimentConfig& cfg) {
  need_map(cfg);
  Outcome out;
  with_ultrametric(cfg, [&](const auto& k) {
    out.field = k.describe();
    auto rep = critical_cells(k, cfg.map, cfg.working_depth, {}, cfg.guard);
    out.result["value_cells"] = rep.values.size();
    out.result["c"] = rationals(cfg.c);
    std::string first_stable = "none";
    for (int s = 0; s <= cfg.s_max; ++s) {
      auto v = stability_probe(k, rep, cfg.c, s);
      out.result["verdicts"].push_back(
          {{"s", s}, {"verdict", v.verdict}, {"meeting_cells", v.meeting_cells}});
      if (first_stable == "none" && v.verdict == "stably-non-critical") first_stable = std::to_string(s);
    }
    out.summary = "first stable radius index s: " + first_stable;
    return 0;
  });
  out.depth = cfg.working_depth;
  return out;
}

Outcome cmd_normform(const ExperimentConfig& cfg) {
  Outcome out;
  auto nf = build_norm_form(cfg.p, cfg.normform_r);
  out.field = PadicField(cfg.p, cfg.precision).describe();
  out.result["r"] = cfg.normform_r;
  out.result["defining"] = nf.model.defining_to_string();
  out.result["nu"] = nf.nu.to_string();
  for (const auto& g : nf.inverse_numerator) out.result["inverse_numerator"].push_back(g.to_string());
  out.summary = "nu = " + nf.nu.to_string() + " from " + nf.model.defining_to_string();
  return out;
}

Outcome cmd_deligne(const ExperimentConfig& cfg) {
  Outcome out;
  auto table = deligne_example(cfg.p, cfg.deligne_depths, cfg.deligne_budget);
  out.field = "F_" + std::to_string(cfg.p) + "((t))";
  out.result["polynomial"] = table.polynomial;
  out.result["locus_checked"] = table.locus_checked;
  std::string csv = "N,hit,cells,density\n";
  for (const auto& row : table.rows) {
    out.result["rows"].push_back({{"N", row.n}, {"hit", to_string(row.hit)},
                                  {"cells", to_string(row.cells)}, {"density", to_string(row.density)}});
    csv += std::to_string(row.n) + "," + to_string(row.hit) + "," + to_string(row.cells) + "," +
           to_string(row.density) + "\n";
  }
  out.result["strictly_decreasing"] = table.strictly_decreasing;
  write_csv(cfg, "deligne.csv", csv, out);
  auto st = deligne_stability(cfg.p, cfg.deligne_n, cfg.deligne_stability_depth, cfg.seed);
  ordered_json sj;
  sj["map"] = deligne_stability_map(cfg.p, cfg.deligne_n).to_string();
  sj["depth"] = st.depth;
  sj["critical_cells"] = st.critical_cells;
  sj["value_cells"] = st.value_cells;
  for (const auto& [c, v] : st.verdicts)
    sj["verdicts"].push_back({{"c", c}, {"s", v.s}, {"verdict", v.verdict}, {"meeting_cells", v.meeting_cells}});
  sj["any_stable"] = st.any_stable;
  out.result["stability"] = sj;
  out.depth = cfg.deligne_stability_depth;
  out.summary = std::string("density ") + (table.strictly_decreasing ? "strictly decreasing" : "not strictly decreasing") +
                ", stable window " + (st.any_stable ? "found" : "not found");
  return out;
}

Outcome cmd_icp(const ExperimentConfig& cfg) {
  Outcome out;
  auto rep = icp_classify(cfg.icp_a, cfg.icp_fit, cfg.samples, cfg.seed);
  out.field = "real";
  out.normalization = kRealNormalization;
  out.result["label"] = rep.label;
  out.result["polynomial"] = rep.polynomial;
  out.result["note"] = rep.note;
  if (rep.has_fit) out.result["fit"] = fit_json(rep.fit);
  out.summary = rep.label + ": " + rep.polynomial;
  return out;
}

Outcome cmd_suite(const ExperimentConfig& cfg) {
  Outcome out;
  out.field = "per criterion";
  const auto ids = cfg.criteria.empty() ? acceptance_ids() : cfg.criteria;
  int passed = 0;
  for (int id : ids) {
    auto res = run_acceptance(id, cfg.threads);
    std::cout << "criterion " << res.id << ": " << (res.pass ? "PASS" : "FAIL") << " (" << res.title
              << ")\n"
              << std::flush;
    ordered_json j{{"id", res.id}, {"title", res.title}, {"pass", res.pass}};
    for (const auto& c : res.checks)
      j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    out.result["criteria"].push_back(j);
    passed += res.pass ? 1 : 0;
    out.ok = out.ok && res.pass;
  }
  out.summary = std::to_string(passed) + " of " + std::to_string(ids.size()) + " criteria pass";
  return out;
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const UnknownVariable*>(&e) || dynamic_cast<const std::invalid_argument*>(&e))
    return 2;
  if (dynamic_cast<const BudgetExceeded*>(&e)) return 3;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tempered: canonical fiber measures and tempered-growth experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, json_path, csv_dir;
  std::vector<std::string> sets, polys;
  std::string c_value;
  int threads = 0, p = 0;
  long seed = -1;
  app.add_option("--config", config_path, "experiment config (INI)")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "override a config key: section.key=value")->allow_extra_args(false);
  app.add_option("--poly", polys, "component polynomial (repeat for maps)")->allow_extra_args(false);
  app.add_option("--c", c_value, "value c, comma-separated rationals");
  app.add_option("--p", p, "residue characteristic");
  app.add_option("--json", json_path, "JSON report path ('-' for stdout)");
  app.add_option("--csv-dir", csv_dir, "directory for CSV tables");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--seed", seed, "random seed");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"measure", "canonical fiber measure of {F = c} in a ball or annulus"},
      {"growth", "ball measures over radii and the fitted growth exponent"},
      {"density", "normalized residue-solution count mod p^N"},
      {"lift", "Hensel/Newton lift of lift.point on a chart"},
      {"dist", "distance from dist.point to the zero locus of F_1"},
      {"h1", "Lojasiewicz exponent fit on the unit ball"},
      {"h2", "Lojasiewicz exponent fit at infinity"},
      {"gradbound", "lower bound exponent for the generalized gradient on the fiber"},
      {"critical", "critical cells and critical value cells"},
      {"stability", "stability probe of c against the critical value cells"},
      {"normform", "norm form of the unramified extension of degree normform.r"},
      {"deligne", "characteristic-p density table and stability example"},
      {"icp", "classify X^2 Z^2 + P4(Y, Z) and fit its gradient bound"},
      {"suite", "run the acceptance battery"},
      {"config-reference", "print the config key table"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "config-reference") {
    std::cout << config_reference();
    return 0;
  }

  try {
    std::map<std::string, std::string> raw;
    if (!config_path.empty()) raw = read_ini(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
      raw[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (!polys.empty()) {
      std::string joined;
      for (const auto& q : polys) joined += (joined.empty() ? "" : "; ") + q;
      raw["map.components"] = joined;
    }
    if (!c_value.empty()) raw["map.c"] = c_value;
    if (p) raw["field.p"] = std::to_string(p);
    if (threads) raw["sampling.threads"] = std::to_string(threads);
    if (seed >= 0) raw["sampling.seed"] = std::to_string(seed);
    if (!json_path.empty()) raw["output.json"] = json_path;
    if (!csv_dir.empty()) raw["output.csv_dir"] = csv_dir;
    const ExperimentConfig cfg = resolve_config(raw);

    static const std::map<std::string, Outcome (*)(const ExperimentConfig&)> table = {
        {"measure", cmd_measure},     {"growth", cmd_growth},   {"density", cmd_density},
        {"lift", cmd_lift},           {"dist", cmd_dist},       {"h1", cmd_h1},
        {"h2", cmd_h2},               {"gradbound", cmd_gradbound}, {"critical", cmd_critical},
        {"stability", cmd_stability}, {"normform", cmd_normform}, {"deligne", cmd_deligne},
        {"icp", cmd_icp},             {"suite", cmd_suite}};
    Outcome out = table.at(cmd)(cfg);

    ordered_json report;
    report["command"] = cmd;
    report["config"] = cfg.resolved;
    report["field"] = out.field;
    report["normalization"] = out.normalization;
    report["precision"] = cfg.backend == "real" ? ordered_json("double") : ordered_json(cfg.precision);
    report["depth"] = out.depth;
    report["error_bound"] = out.error_bound;
    report["ok"] = out.ok;
    report["result"] = out.result;
    if (cfg.json_path == "-") {
      std::cout << report.dump(2) << "\n";
    } else {
      if (!cfg.json_path.empty()) {
        std::ofstream f(cfg.json_path);
        if (!f) throw ConfigError("output.json: cannot write " + cfg.json_path);
        f << report.dump(2) << "\n";
      }
      std::cout << cmd << ": " << out.summary << "\n";
    }
    return out.ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
}
