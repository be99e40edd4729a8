#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "doctest.h"
#include "tempered/errors.hpp"

using namespace tempered;
using namespace tempered::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

int run(const std::string& args, const std::string& out_file = "") {
  std::string cmd = std::string(TEMPERED_BIN) + " " + args;
  cmd += out_file.empty() ? " > /dev/null 2>&1" : " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "tempered_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("defaults resolve and are embedded") {
  auto cfg = resolve_config({{"map.components", "x0^2 + x1^2"}, {"map.c", "1"}});
  CHECK(cfg.backend == "padic");
  CHECK(cfg.p == 5);
  CHECK(cfg.vars == 2);
  CHECK(cfg.map.rank() == 1);
  CHECK(cfg.c == std::vector<Rational>{Rational(1)});
  CHECK(cfg.resolved["map.vars"] == 2);
  CHECK(cfg.resolved["map.c"] == "1");
  CHECK(cfg.resolved.size() == key_table().size());
}

TEST_CASE("c defaults to zero per component and accepts fractions") {
  auto cfg = resolve_config({{"map.components", "x0; x1"}});
  CHECK(cfg.c == std::vector<Rational>{Rational(0), Rational(0)});
  cfg = resolve_config({{"map.components", "x0; x1"}, {"map.c", "+1/2, -3"}});
  CHECK(cfg.c == std::vector<Rational>{Rational(1, 2), Rational(-3)});
}

TEST_CASE("invalid configs are rejected before any work") {
  using Raw = std::map<std::string, std::string>;
  const std::vector<Raw> bad = {
      {{"field.p", "6"}},
      {{"field.backend", "complex"}},
      {{"field.degree", "2"}},
      {{"nosuch.key", "1"}},
      {{"map.components", "x0 +"}},
      {{"map.components", "y^2"}},
      {{"map.components", "x0"}, {"map.c", "1, 2"}},
      {{"map.components", "x0"}, {"map.c", "1.5"}},
      {{"map.components", "x3"}, {"map.vars", "2"}},
      {{"region.t", "0"}, {"region.inner_t", "0"}},
      {{"sampling.threads", "0"}},
      {{"depth.working", "abc"}},
      {{"icp.a", "1,0"}},
      {{"icp.fit", "maybe"}},
      {{"field.p", "3"}, {"deligne.n", "3"}},
      {{"suite.criteria", "15"}},
  };
  for (const auto& raw : bad) CHECK_THROWS_AS(resolve_config(raw), ConfigError);
}

TEST_CASE("deligne exponent defaults to one prime to p") {
  CHECK(resolve_config({{"field.p", "2"}}).deligne_n == 3);
  CHECK(resolve_config({{"field.p", "3"}}).deligne_n == 2);
}

TEST_CASE("ini files map sections to key prefixes") {
  auto path = scratch() / "a.ini";
  std::ofstream(path) << "[field]\np = 7\n\n[map]\ncomponents = x0^2 - 2\n";
  auto raw = read_ini(path.string());
  CHECK(raw.at("field.p") == "7");
  CHECK(raw.at("map.components") == "x0^2 - 2");
  std::ofstream(path) << "p = 7\n";
  CHECK_THROWS_AS(read_ini(path.string()), ConfigError);
}

TEST_CASE("config reference lists every key") {
  const std::string ref = config_reference();
  for (const auto& k : key_table()) CHECK(ref.find("| " + k.key + " |") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch();
  CHECK(run("measure --poly 'x0^2 + x1^2' --c 1", (dir / "m.txt").string()) == 0);
  CHECK(slurp(dir / "m.txt").find("4/5") != std::string::npos);
  CHECK(run("icp", (dir / "i.txt").string()) == 0);
  CHECK(slurp(dir / "i.txt").find("case-I") != std::string::npos);
  CHECK(run("measure --set field.p=4 --poly x0") == 2);
  CHECK(run("measure --poly 'x0 +'") == 2);
  CHECK(run("measure") == 2);
  CHECK(run("nosuchcommand") == 2);
  CHECK(run("measure --poly 'x0^2+x1^2+x2^2' --c 1 --set depth.cell_budget=50") == 3);
  CHECK(run("lift --poly x0^2 --set lift.point=5") == 1);
  CHECK(run("measure --poly 'x0^2+x1^2' --c 0 --set depth.working=3 --set depth.tolerance=1e-6") == 1);
  CHECK(run("suite --set suite.criteria=9") == 0);
  CHECK(run("config-reference") == 0);
}

TEST_CASE("reports embed the config and are reproducible") {
  const auto dir = scratch();
  const std::string args =
      "growth --poly 'x0^2 + x1^2 + x2^2' --c 1 --set region.t_max=2 --csv-dir " + (dir / "csv").string();
  const std::string g = " --json " + (dir / "g.json").string();
  CHECK(run(args + g) == 0);
  const std::string a = slurp(dir / "g.json");
  CHECK(run(args + g) == 0);
  CHECK(a == slurp(dir / "g.json"));
  for (const char* key : {"\"config\"", "\"normalization\"", "\"precision\"", "\"depth\"", "\"error_bound\"",
                          "\"map.components\": \"x0^2 + x1^2 + x2^2\""})
    CHECK_MESSAGE(a.find(key) != std::string::npos, key);
  CHECK(slurp(dir / "csv" / "growth.csv").find("0,6,5,0") != std::string::npos);

  const std::string real =
      "measure --set field.backend=real --set region.outer=2 --poly '1/2*x0^2 + 1/2*x1^2' --c 1/2 "
      "--set sampling.samples=2000 --seed 9 --json ";
  CHECK(run(real + (dir / "r.json").string()) == 0);
  const std::string b = slurp(dir / "r.json");
  CHECK(run(real + (dir / "r.json").string()) == 0);
  CHECK(b == slurp(dir / "r.json"));
}
