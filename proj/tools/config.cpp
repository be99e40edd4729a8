#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "tempered/errors.hpp"

namespace tempered::cli {

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"field.backend", KeyType::String, "padic", "padic (Q_p), laurent (F_q((t))) or real"},
      {"field.p", KeyType::Int, "5", "residue characteristic, a prime"},
      {"field.precision", KeyType::Int, "40", "working precision in digits (ultrametric backends)"},
      {"field.degree", KeyType::Int, "1", "laurent only: residue field F_{p^degree}"},
      {"map.components", KeyType::String, "", "polynomials F_1; ...; F_r in x0..x{m-1}, separated by ';'"},
      {"map.vars", KeyType::Int, "0", "number of variables m (0 infers the largest index + 1)"},
      {"map.c", KeyType::String, "", "value c as comma-separated rationals (empty means 0)"},
      {"region.t", KeyType::Int, "0", "ball B_{q^t} for measure"},
      {"region.inner_t", KeyType::Int, "", "optional inner radius exponent (annulus)"},
      {"region.t_min", KeyType::Int, "0", "real growth: first shell exponent"},
      {"region.t_max", KeyType::Int, "5", "largest radius exponent for growth and h2"},
      {"region.outer", KeyType::Real, "1", "real: outer radius of the max-norm region"},
      {"region.inner", KeyType::Real, "0", "real: inner radius"},
      {"region.coords", KeyType::String, "", "real: coordinates the region norm uses (empty = all)"},
      {"region.free_bound", KeyType::Real, "0", "real: bound on coordinates outside region.coords"},
      {"region.shells", KeyType::Int, "10", "real growth toward the origin: shells 2^-j-1 <= |x| <= 2^-j, j = 1..shells"},
      {"depth.seed", KeyType::Int, "3", "sample digits for probes and projected cells"},
      {"depth.working", KeyType::Int, "6", "working depth N for cell resolution"},
      {"depth.guard", KeyType::Int, "1", "extra digits searched below the depth before a cell is unresolved"},
      {"depth.tolerance", KeyType::Real, "0", "measure: fail when the error bound exceeds this (0 = off)"},
      {"depth.cell_budget", KeyType::Int, "50000000", "measure: maximum number of classified cells"},
      {"probe.extra", KeyType::Int, "4", "h1/h2: distance search digits below the sample depth"},
      {"sampling.samples", KeyType::Int, "2000", "sample count (per chart and shell on R)"},
      {"sampling.seed", KeyType::Int, "1", "random seed"},
      {"sampling.threads", KeyType::Int, "1", "worker threads"},
      {"density.N", KeyType::Int, "4", "residue depth for point_count_density"},
      {"density.node_cap", KeyType::Int, "200000000", "enumeration node budget"},
      {"lift.point", KeyType::String, "", "starting point, comma-separated rationals"},
      {"lift.chart", KeyType::String, "", "chart variables (empty = 0..r-1)"},
      {"lift.digits", KeyType::Int, "12", "target digits (decimal digits of residual on R)"},
      {"dist.point", KeyType::String, "", "point for dist(x, Z(F_1))"},
      {"stability.s_max", KeyType::Int, "3", "probe radii q^-s for s = 0..s_max"},
      {"normform.r", KeyType::Int, "2", "extension degree"},
      {"deligne.depths", KeyType::String, "4,6,8", "truncations N for the density table"},
      {"deligne.n", KeyType::Int, "0", "exponent n of the stability example, prime to p (0 = 3 for p = 2, else 2)"},
      {"deligne.stability_depth", KeyType::Int, "3", "critical-cell depth for the stability example"},
      {"deligne.budget", KeyType::Int, "4194304", "largest p^N enumerated"},
      {"icp.a", KeyType::String, "1,0,0,0,0", "coefficients a0..a4 of P4"},
      {"icp.fit", KeyType::Bool, "true", "run the real gradient fit"},
      {"gradbound.radii", KeyType::String, "0,1,2", "shell exponents for gradient samples"},
      {"growth.toward_origin", KeyType::Bool, "false", "real: shells toward 0 instead of balls of radius 2^t"},
      {"growth.alpha", KeyType::Int, "-1", "tempered test exponent (-1 = skip)"},
      {"suite.criteria", KeyType::String, "", "acceptance criteria to run (empty = all)"},
      {"output.json", KeyType::String, "", "JSON report path ('-' = stdout)"},
      {"output.csv_dir", KeyType::String, "", "directory for CSV tables"},
  };
  return table;
}

std::string config_reference() {
  std::ostringstream out;
  out << "| key | type | default | meaning |\n|---|---|---|---|\n";
  for (const auto& k : key_table()) {
    const char* type = k.type == KeyType::String ? "string"
                       : k.type == KeyType::Int  ? "int"
                       : k.type == KeyType::Real ? "real"
                                                 : "bool";
    out << "| " << k.key << " | " << type << " | " << (k.fallback.empty() ? "-" : k.fallback)
        << " | " << k.help << " |\n";
  }
  return out.str();
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = item.find_last_not_of(" \t");
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::map<std::string, std::string> read_ini(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  std::map<std::string, std::string> raw;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body) raw[section + "." + key] = value.data();
  }
  return raw;
}

namespace {

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used == v.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

Rational parse_rational(const std::string& key, const std::string& v) {
  static const std::regex form(R"(^[+-]?\d+(/\d+)?$)");
  if (!std::regex_match(v, form)) throw ConfigError(key + ": expected a rational, got '" + v + "'");
  Rational r(v[0] == '+' ? v.substr(1) : v);
  if (r.get_den() == 0) throw ConfigError(key + ": zero denominator");
  r.canonicalize();
  return r;
}

std::vector<Rational> parse_rationals(const std::string& key, const std::string& v) {
  std::vector<Rational> out;
  for (const auto& item : split_list(v, ',')) out.push_back(parse_rational(key, item));
  return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v, ',')) out.push_back(static_cast<int>(parse_int(key, item)));
  return out;
}

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

int infer_vars(const std::vector<std::string>& comps) {
  static const std::regex var(R"(x(\d+))");
  int m = 0;
  for (const auto& s : comps)
    for (std::sregex_iterator it(s.begin(), s.end(), var), end; it != end; ++it)
      m = std::max(m, std::stoi((*it)[1]) + 1);
  return std::max(m, 1);
}

}  // namespace

ExperimentConfig resolve_config(const std::map<std::string, std::string>& raw) {
  std::map<std::string, std::string> v;
  std::map<std::string, KeyType> types;
  for (const auto& k : key_table()) {
    v[k.key] = k.fallback;
    types[k.key] = k.type;
  }
  for (const auto& [key, value] : raw) {
    if (!types.count(key)) throw ConfigError("unknown key '" + key + "' (see config-reference)");
    v[key] = value;
  }

  ExperimentConfig cfg;
  auto i = [&](const std::string& key) { return parse_int(key, v[key]); };
  auto d = [&](const std::string& key) { return parse_real(key, v[key]); };

  cfg.backend = v["field.backend"];
  require(cfg.backend == "padic" || cfg.backend == "laurent" || cfg.backend == "real",
          "field.backend", "must be padic, laurent or real");
  cfg.p = static_cast<int>(i("field.p"));
  require(is_prime(cfg.p), "field.p", "must be prime");
  cfg.precision = static_cast<int>(i("field.precision"));
  require(cfg.precision >= 1 && cfg.precision <= 10000, "field.precision", "must be in [1, 10000]");
  cfg.degree = static_cast<int>(i("field.degree"));
  require(cfg.degree >= 1 && cfg.degree <= 8, "field.degree", "must be in [1, 8]");
  require(cfg.degree == 1 || cfg.backend == "laurent", "field.degree", "only laurent fields take a degree");

  cfg.components = split_list(v["map.components"], ';');
  cfg.vars = static_cast<int>(i("map.vars"));
  require(cfg.vars >= 0, "map.vars", "must be nonnegative");
  if (!cfg.components.empty()) {
    const int inferred = infer_vars(cfg.components);
    if (cfg.vars == 0) cfg.vars = inferred;
    require(cfg.vars >= inferred, "map.vars", "smaller than the largest variable index + 1");
    require(static_cast<int>(cfg.components.size()) <= cfg.vars, "map.components",
            "more components than variables");
    try {
      cfg.map = parse_poly_map(cfg.components, cfg.vars);
    } catch (const Error& e) {
      throw ConfigError(std::string("map.components: ") + e.what());
    }
  }
  cfg.c = parse_rationals("map.c", v["map.c"]);
  if (cfg.c.empty()) cfg.c.assign(cfg.components.size(), Rational(0));
  require(cfg.c.size() == cfg.components.size(), "map.c", "needs one value per component");

  cfg.t = static_cast<int>(i("region.t"));
  if (!v["region.inner_t"].empty()) {
    cfg.inner_t = static_cast<int>(i("region.inner_t"));
    require(*cfg.inner_t < cfg.t, "region.inner_t", "must be below region.t");
  }
  cfg.t_min = static_cast<int>(i("region.t_min"));
  cfg.t_max = static_cast<int>(i("region.t_max"));
  require(cfg.t_max >= 0 && cfg.t_max <= 40, "region.t_max", "must be in [0, 40]");
  require(cfg.t_min <= cfg.t_max, "region.t_min", "must not exceed region.t_max");
  cfg.outer = d("region.outer");
  cfg.inner = d("region.inner");
  require(cfg.outer > 0 && cfg.inner >= 0 && cfg.inner < cfg.outer, "region.outer",
          "need 0 <= region.inner < region.outer");
  cfg.coords = parse_ints("region.coords", v["region.coords"]);
  for (int c : cfg.coords)
    require(c >= 0 && (cfg.components.empty() || c < cfg.vars), "region.coords", "index out of range");
  cfg.free_bound = d("region.free_bound");
  require(cfg.free_bound >= 0, "region.free_bound", "must be nonnegative");
  cfg.shells = static_cast<int>(i("region.shells"));
  require(cfg.shells >= 1 && cfg.shells <= 60, "region.shells", "must be in [1, 60]");

  cfg.seed_depth = static_cast<int>(i("depth.seed"));
  require(cfg.seed_depth >= 1 && cfg.seed_depth <= 30, "depth.seed", "must be in [1, 30]");
  cfg.working_depth = static_cast<int>(i("depth.working"));
  require(cfg.working_depth >= 1 && cfg.working_depth <= 200, "depth.working", "must be in [1, 200]");
  cfg.guard = static_cast<int>(i("depth.guard"));
  require(cfg.guard >= 0 && cfg.guard <= 16, "depth.guard", "must be in [0, 16]");
  cfg.tolerance = d("depth.tolerance");
  require(cfg.tolerance >= 0, "depth.tolerance", "must be nonnegative");
  cfg.cell_budget = i("depth.cell_budget");
  require(cfg.cell_budget > 0, "depth.cell_budget", "must be positive");
  cfg.probe_extra = static_cast<int>(i("probe.extra"));
  require(cfg.probe_extra >= 0 && cfg.probe_extra <= 16, "probe.extra", "must be in [0, 16]");

  cfg.samples = i("sampling.samples");
  require(cfg.samples >= 1, "sampling.samples", "must be positive");
  const long seed = i("sampling.seed");
  require(seed >= 0, "sampling.seed", "must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.threads = static_cast<int>(i("sampling.threads"));
  require(cfg.threads >= 1 && cfg.threads <= 256, "sampling.threads", "must be in [1, 256]");

  cfg.density_n = static_cast<int>(i("density.N"));
  require(cfg.density_n >= 1 && cfg.density_n <= 30, "density.N", "must be in [1, 30]");
  cfg.node_cap = i("density.node_cap");
  require(cfg.node_cap > 0, "density.node_cap", "must be positive");
  cfg.lift_point = parse_rationals("lift.point", v["lift.point"]);
  cfg.lift_chart = parse_ints("lift.chart", v["lift.chart"]);
  cfg.lift_digits = static_cast<int>(i("lift.digits"));
  require(cfg.lift_digits >= 1 && cfg.lift_digits <= 1000, "lift.digits", "must be in [1, 1000]");
  cfg.dist_point = parse_rationals("dist.point", v["dist.point"]);
  cfg.s_max = static_cast<int>(i("stability.s_max"));
  require(cfg.s_max >= 0 && cfg.s_max <= 40, "stability.s_max", "must be in [0, 40]");
  cfg.normform_r = static_cast<int>(i("normform.r"));
  require(cfg.normform_r >= 1 && cfg.normform_r <= 12, "normform.r", "must be in [1, 12]");
  cfg.deligne_depths = parse_ints("deligne.depths", v["deligne.depths"]);
  require(!cfg.deligne_depths.empty(), "deligne.depths", "needs at least one truncation");
  for (int n : cfg.deligne_depths) require(n >= 1 && n <= 40, "deligne.depths", "entries in [1, 40]");
  cfg.deligne_n = static_cast<int>(i("deligne.n"));
  if (cfg.deligne_n == 0) cfg.deligne_n = cfg.p == 2 ? 3 : 2;
  require(cfg.deligne_n >= 2 && cfg.deligne_n % cfg.p != 0, "deligne.n", "must be > 1 and prime to p");
  cfg.deligne_stability_depth = static_cast<int>(i("deligne.stability_depth"));
  require(cfg.deligne_stability_depth >= 1 && cfg.deligne_stability_depth <= 8,
          "deligne.stability_depth", "must be in [1, 8]");
  cfg.deligne_budget = i("deligne.budget");
  require(cfg.deligne_budget > 0, "deligne.budget", "must be positive");
  cfg.icp_a = parse_rationals("icp.a", v["icp.a"]);
  require(cfg.icp_a.size() == 5, "icp.a", "needs five coefficients a0..a4");
  cfg.icp_fit = parse_bool("icp.fit", v["icp.fit"]);
  cfg.radii = parse_ints("gradbound.radii", v["gradbound.radii"]);
  require(!cfg.radii.empty(), "gradbound.radii", "needs at least one radius");
  for (int r : cfg.radii) require(r >= 0 && r <= 40, "gradbound.radii", "entries in [0, 40]");
  cfg.toward_origin = parse_bool("growth.toward_origin", v["growth.toward_origin"]);
  cfg.alpha = static_cast<int>(i("growth.alpha"));
  require(cfg.alpha >= -1, "growth.alpha", "must be -1 or a nonnegative exponent");
  cfg.criteria = parse_ints("suite.criteria", v["suite.criteria"]);
  for (int id : cfg.criteria) require(id >= 1 && id <= 14, "suite.criteria", "ids are 1..14");
  cfg.json_path = v["output.json"];
  cfg.csv_dir = v["output.csv_dir"];

  for (const auto& k : key_table()) {
    const std::string& s = v[k.key];
    if (s.empty()) {
      cfg.resolved[k.key] = nullptr;
      continue;
    }
    switch (k.type) {
      case KeyType::Int: cfg.resolved[k.key] = parse_int(k.key, s); break;
      case KeyType::Real: cfg.resolved[k.key] = parse_real(k.key, s); break;
      case KeyType::Bool: cfg.resolved[k.key] = parse_bool(k.key, s); break;
      case KeyType::String: cfg.resolved[k.key] = s; break;
    }
  }
  // Keys whose effective value differs from the text.
  if (!cfg.components.empty()) {
    cfg.resolved["map.vars"] = cfg.vars;
    std::string cs;
    for (const auto& ci : cfg.c) cs += (cs.empty() ? "" : ",") + to_string(ci);
    cfg.resolved["map.c"] = cs;
  }
  cfg.resolved["deligne.n"] = cfg.deligne_n;
  return cfg;
}

}  // namespace tempered::cli
