#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tempered/poly.hpp"

namespace tempered::cli {

enum class KeyType { String, Int, Real, Bool };

struct KeySpec {
  std::string key;  // section.name
  KeyType type;
  std::string fallback;
  std::string help;
};

// Every accepted key; unknown keys are a ConfigError.
const std::vector<KeySpec>& key_table();

// Markdown table of key_table(), printed by `config-reference`.
std::string config_reference();

struct ExperimentConfig {
  std::string backend = "padic";  // padic, laurent, real
  int p = 5;
  int precision = 40;
  int degree = 1;

  std::vector<std::string> components;
  int vars = 0;
  PolyMap map;
  std::vector<Rational> c;

  int t = 0;
  std::optional<int> inner_t;
  int t_min = 0, t_max = 5;
  double outer = 1.0, inner = 0.0, free_bound = 0.0;
  std::vector<int> coords;
  int shells = 10;

  int seed_depth = 3;
  int working_depth = 6;
  int guard = 1;
  int probe_extra = 4;
  double tolerance = 0.0;  // 0 disables the check
  long cell_budget = 50000000;

  long samples = 2000;
  std::uint64_t seed = 1;
  int threads = 1;

  int density_n = 4;
  long node_cap = 200000000;
  std::vector<Rational> lift_point;
  std::vector<int> lift_chart;
  int lift_digits = 12;
  std::vector<Rational> dist_point;
  int s_max = 3;
  int normform_r = 2;
  std::vector<int> deligne_depths{4, 6, 8};
  int deligne_n = 3;
  int deligne_stability_depth = 3;
  long deligne_budget = 1L << 22;
  std::vector<Rational> icp_a{1, 0, 0, 0, 0};
  bool icp_fit = true;
  std::vector<int> radii{0, 1, 2};
  bool toward_origin = false;
  int alpha = -1;
  std::vector<int> criteria;

  std::string json_path;
  std::string csv_dir;

  // Resolved key -> value, in key_table() order, for embedding in reports.
  nlohmann::ordered_json resolved;
};

// Raw key -> value pairs from an INI file (sections become prefixes).
std::map<std::string, std::string> read_ini(const std::string& path);

// Applies defaults, then `raw`, validates, and fills the typed fields.
// Throws ConfigError naming the offending key.
ExperimentConfig resolve_config(const std::map<std::string, std::string>& raw);

// "a, b, c" with surrounding blanks trimmed; empty input gives no items.
std::vector<std::string> split_list(const std::string& s, char sep);

}  // namespace tempered::cli
