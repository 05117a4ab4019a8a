#include "taperplan/milp.hpp"

#include <cmath>
#include <unordered_set>
#include <utility>

namespace taperplan::milp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Limit: return "limit";
  }
  return "unknown";
}

int SparseMilp::add_column(std::string name, double lb, double ub, double obj,
                           bool is_integral) {
  col_names.push_back(std::move(name));
  col_lower.push_back(lb);
  col_upper.push_back(ub);
  objective.push_back(obj);
  integral.push_back(is_integral ? 1 : 0);
  return n_cols() - 1;
}

int SparseMilp::add_row(std::string name, double lb, double ub,
                        std::vector<RowEntry> entries) {
  Row r;
  r.name = std::move(name);
  r.lower = lb;
  r.upper = ub;
  r.entries = std::move(entries);
  rows.push_back(std::move(r));
  return n_rows() - 1;
}

std::vector<int> SparseMilp::remove_rows(const std::vector<int>& row_ids) {
  std::vector<char> drop(rows.size(), 0);
  for (int id : row_ids)
    if (id >= 0 && id < n_rows()) drop[id] = 1;
  std::vector<int> remap(rows.size(), -1);
  int next = 0;
  for (int i = 0; i < n_rows(); ++i) {
    if (drop[i]) continue;
    if (next != i) rows[next] = std::move(rows[i]);
    remap[i] = next++;
  }
  rows.resize(next);
  return remap;
}

int SparseMilp::n_integral() const {
  int k = 0;
  for (auto f : integral) k += f != 0;
  return k;
}

std::vector<std::string> SparseMilp::validate() const {
  std::vector<std::string> out;
  const std::size_t n = col_names.size();
  if (col_lower.size() != n || col_upper.size() != n ||
      objective.size() != n || integral.size() != n) {
    out.push_back("column arrays have inconsistent lengths");
    return out;
  }
  std::unordered_set<std::string> seen;
  for (std::size_t j = 0; j < n; ++j) {
    if (!seen.insert(col_names[j]).second)
      out.push_back("duplicate column name '" + col_names[j] + "'");
    if (std::isnan(col_lower[j]) || std::isnan(col_upper[j]) ||
        std::isnan(objective[j]))
      out.push_back("column '" + col_names[j] + "' has a NaN bound or cost");
    else if (col_lower[j] > col_upper[j])
      out.push_back("column '" + col_names[j] + "' has lower bound above upper");
    if (integral[j] &&
        (!std::isfinite(col_lower[j]) || !std::isfinite(col_upper[j])))
      out.push_back("integral column '" + col_names[j] +
                    "' must have finite bounds");
  }
  std::unordered_set<std::string> row_seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (!row_seen.insert(r.name).second)
      out.push_back("duplicate row name '" + r.name + "'");
    if (std::isnan(r.lower) || std::isnan(r.upper))
      out.push_back("row '" + r.name + "' has a NaN bound");
    else if (r.lower > r.upper)
      out.push_back("row '" + r.name + "' has lower bound above upper");
    for (const RowEntry& e : r.entries) {
      if (e.col < 0 || e.col >= static_cast<int>(n)) {
        out.push_back("row '" + r.name + "' references column " +
                      std::to_string(e.col) + " out of range");
        break;
      }
      if (!std::isfinite(e.value)) {
        out.push_back("row '" + r.name + "' has a non-finite coefficient");
        break;
      }
    }
  }
  return out;
}

}  // namespace taperplan::milp
