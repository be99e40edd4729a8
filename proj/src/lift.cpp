#include "tempered/lift.hpp"

#include "json.hpp"

namespace tempered {

Cell root_cell(int m, int scale) {
  Cell c;
  c.digits.assign(m, Integer(0));
  c.scale = scale;
  return c;
}

std::vector<Cell> child_cells(const Cell& c, long q) {
  const std::size_t m = c.digits.size();
  Integer step;
  mpz_ui_pow_ui(step.get_mpz_t(), static_cast<unsigned long>(q),
                static_cast<unsigned long>(c.depth));
  long count = 1;
  for (std::size_t i = 0; i < m; ++i) count *= q;
  std::vector<Cell> out;
  out.reserve(count);
  std::vector<long> d(m, 0);
  for (long idx = 0; idx < count; ++idx) {
    long rest = idx;
    for (std::size_t i = m; i-- > 0;) {
      d[i] = rest % q;
      rest /= q;
    }
    Cell child;
    child.depth = c.depth + 1;
    child.scale = c.scale;
    child.digits.reserve(m);
    for (std::size_t i = 0; i < m; ++i) child.digits.push_back(c.digits[i] + step * d[i]);
    out.push_back(std::move(child));
  }
  return out;
}

bool cell_contains(const Cell& outer, const Cell& inner, long q) {
  if (outer.scale != inner.scale || inner.depth < outer.depth ||
      outer.digits.size() != inner.digits.size())
    return false;
  Integer mod;
  mpz_ui_pow_ui(mod.get_mpz_t(), static_cast<unsigned long>(q),
                static_cast<unsigned long>(outer.depth));
  for (std::size_t i = 0; i < outer.digits.size(); ++i)
    if (inner.digits[i] % mod != outer.digits[i]) return false;
  return true;
}

std::string to_string(CellStatus s) {
  switch (s) {
    case CellStatus::ZeroBearing: return "zero-bearing";
    case CellStatus::Empty: return "empty";
    case CellStatus::Unresolved: return "unresolved";
  }
  return "unknown";
}

static nlohmann::json cell_json(const Cell& c) {
  nlohmann::json digits = nlohmann::json::array();
  for (const auto& d : c.digits) digits.push_back(d.get_str());
  return {{"depth", c.depth}, {"scale", c.scale}, {"digits", digits}};
}

std::string cell_to_json(const Cell& c) { return cell_json(c).dump(); }

std::vector<Cell> ZeroTree::cells_at(int depth, CellStatus status) const {
  std::vector<Cell> out;
  for (const auto& n : nodes)
    if (n.cell.depth == depth && n.status == status) out.push_back(n.cell);
  return out;
}

std::size_t ZeroTree::unresolved_count() const {
  return cells_at(max_depth, CellStatus::Unresolved).size();
}

std::string ZeroTree::to_jsonl() const {
  std::string out;
  for (const auto& n : nodes) {
    auto j = cell_json(n.cell);
    j["status"] = to_string(n.status);
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace tempered
