#pragma once

#include <string>
#include <vector>

namespace tempered {

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  std::vector<CheckLine> checks;
};

// The numbered acceptance battery (1..14).
std::vector<int> acceptance_ids();
std::string acceptance_title(int id);
CriterionResult run_acceptance(int id, int threads = 1);

}  // namespace tempered
