#include "taperplan/mps.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "taperplan/errors.hpp"
#include "taperplan/util.hpp"

namespace taperplan::mps {

using milp::kInf;
using milp::RowEntry;
using milp::SparseMilp;

namespace {

const std::string kObjName = "COST";

std::string short_name(char prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%07d", prefix, index + 1);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  std::string out = s;
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

bool is_binary(const SparseMilp& m, int j) {
  return m.integral[j] && std::fabs(m.col_lower[j]) < 1e-12 &&
         std::fabs(m.col_upper[j] - 1.0) < 1e-12;
}

}  // namespace

std::string mangled_column_name(int index) { return short_name('C', index); }
std::string mangled_row_name(int index) { return short_name('R', index); }

void write_mps(const SparseMilp& model, std::ostream& out) {
  const int n = model.n_cols();
  const int m = model.n_rows();

  out << "NAME          MODEL\n";
  out << "ROWS\n";
  out << " N  " << kObjName << "\n";
  for (int i = 0; i < m; ++i) {
    const double lo = model.rows[i].lower;
    const double up = model.rows[i].upper;
    char sense;
    if (lo == up) sense = 'E';
    else if (std::isfinite(up)) sense = 'L';  // ranged rows ride on L + RANGES
    else if (std::isfinite(lo)) sense = 'G';
    else sense = 'N';  // free row
    out << " " << sense << "  " << mangled_row_name(i) << "\n";
  }

  // group the row-major entries by column
  std::vector<std::vector<RowEntry>> by_col(n);  // (row, value) per column
  for (int i = 0; i < m; ++i)
    for (const RowEntry& e : model.rows[i].entries)
      by_col[e.col].push_back({i, e.value});

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    const bool want_int = model.integral[j] != 0;
    if (want_int != in_int) {
      out << "    " << pad("MARK" + std::to_string(++marker), 10)
          << pad("'MARKER'", 26)
          << (want_int ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = want_int;
    }
    const std::string cname = pad(mangled_column_name(j), 10);
    // the objective entry doubles as the column declaration
    out << "    " << cname << pad(kObjName, 10)
        << format_double(model.objective[j]) << "\n";
    for (const RowEntry& e : by_col[j])
      out << "    " << cname << pad(mangled_row_name(e.col), 10)
          << format_double(e.value) << "\n";
  }
  if (in_int)
    out << "    " << pad("MARK" + std::to_string(++marker), 10)
        << pad("'MARKER'", 26) << "'INTEND'\n";

  out << "RHS\n";
  for (int i = 0; i < m; ++i) {
    const double lo = model.rows[i].lower;
    const double up = model.rows[i].upper;
    double rhs;
    if (lo == up) rhs = lo;
    else if (std::isfinite(up)) rhs = up;
    else if (std::isfinite(lo)) rhs = lo;
    else continue;  // free row carries no right-hand side
    out << "    " << pad("RHS1", 10) << pad(mangled_row_name(i), 10)
        << format_double(rhs) << "\n";
  }

  bool any_range = false;
  for (int i = 0; i < m; ++i) {
    const double lo = model.rows[i].lower;
    const double up = model.rows[i].upper;
    if (lo != up && std::isfinite(lo) && std::isfinite(up)) {
      if (!any_range) {
        out << "RANGES\n";
        any_range = true;
      }
      out << "    " << pad("RNG1", 10) << pad(mangled_row_name(i), 10)
          << format_double(up - lo) << "\n";
    }
  }

  out << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const double lo = model.col_lower[j];
    const double up = model.col_upper[j];
    const std::string cname = pad(mangled_column_name(j), 10);
    const std::string tag = pad("BND1", 10);
    if (is_binary(model, j)) {
      out << " BV " << tag << cname << "\n";
    } else if (lo == up) {
      out << " FX " << tag << cname << format_double(lo) << "\n";
    } else if (!std::isfinite(lo) && !std::isfinite(up)) {
      out << " FR " << tag << cname << "\n";
    } else {
      if (std::isfinite(lo))
        out << " LO " << tag << cname << format_double(lo) << "\n";
      else
        out << " MI " << tag << cname << "\n";
      if (std::isfinite(up))
        out << " UP " << tag << cname << format_double(up) << "\n";
    }
  }
  out << "ENDATA\n";
}

void write_name_map(const SparseMilp& model, std::ostream& out) {
  for (int j = 0; j < model.n_cols(); ++j)
    out << mangled_column_name(j) << " " << model.col_names[j] << "\n";
  for (int i = 0; i < model.n_rows(); ++i)
    out << mangled_row_name(i) << " " << model.rows[i].name << "\n";
}

namespace {

double parse_number(const std::string& tok, const char* where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size())
      throw ParseError(std::string("bad number '") + tok + "' in " + where);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(std::string("bad number '") + tok + "' in " + where);
  }
}

}  // namespace

SparseMilp read_mps(std::istream& in) {
  enum class Sec { None, Rows, Columns, Rhs, Ranges, Bounds, Done };
  Sec sec = Sec::None;

  std::string obj_name;
  std::vector<std::string> row_names;
  std::vector<char> row_sense;
  std::unordered_map<std::string, int> row_index;

  std::vector<std::string> col_names;
  std::vector<double> col_cost;
  std::vector<uint8_t> col_int;
  std::vector<double> col_lb, col_ub;
  std::vector<uint8_t> lb_set, ub_set;
  std::unordered_map<std::string, int> col_index;
  std::vector<std::vector<RowEntry>> row_entries;  // per row, col-indexed

  std::vector<double> rhs;
  std::vector<uint8_t> rhs_set;
  std::vector<double> range;
  std::vector<uint8_t> range_set;

  bool int_mode = false;
  std::string line;
  int lineno = 0;

  auto need_col = [&](const std::string& name) -> int {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    const int j = static_cast<int>(col_names.size());
    col_index.emplace(name, j);
    col_names.push_back(name);
    col_cost.push_back(0.0);
    col_int.push_back(int_mode ? 1 : 0);
    col_lb.push_back(0.0);
    col_ub.push_back(kInf);
    lb_set.push_back(0);
    ub_set.push_back(0);
    return j;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '*') continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line[0] != ' ' && line[0] != '\t') {
      std::vector<std::string> toks = tokenize(line);
      if (toks.empty()) continue;
      const std::string& head = toks[0];
      if (head == "NAME") continue;
      else if (head == "ROWS") sec = Sec::Rows;
      else if (head == "COLUMNS") sec = Sec::Columns;
      else if (head == "RHS") sec = Sec::Rhs;
      else if (head == "RANGES") sec = Sec::Ranges;
      else if (head == "BOUNDS") sec = Sec::Bounds;
      else if (head == "ENDATA") { sec = Sec::Done; break; }
      else throw ParseError("unsupported section '" + head + "' at " + where);
      continue;
    }
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) continue;
    switch (sec) {
      case Sec::Rows: {
        if (toks.size() != 2)
          throw ParseError("row needs a sense and a name at " + where);
        const std::string& sense = toks[0];
        const std::string& name = toks[1];
        if (sense == "N" && obj_name.empty()) {
          obj_name = name;  // first free row is the objective
          break;
        }
        if (sense != "N" && sense != "L" && sense != "G" && sense != "E")
          throw ParseError("unknown row sense '" + sense + "' at " + where);
        if (row_index.count(name) || name == obj_name)
          throw ParseError("duplicate row '" + name + "' at " + where);
        row_index.emplace(name, static_cast<int>(row_names.size()));
        row_names.push_back(name);
        row_sense.push_back(sense[0]);
        row_entries.emplace_back();
        rhs.push_back(0.0);
        rhs_set.push_back(0);
        range.push_back(0.0);
        range_set.push_back(0);
        break;
      }
      case Sec::Columns: {
        if (toks.size() >= 3 && toks[1] == "'MARKER'") {
          if (toks[2] == "'INTORG'") int_mode = true;
          else if (toks[2] == "'INTEND'") int_mode = false;
          else throw ParseError("unknown marker at " + where);
          break;
        }
        if (toks.size() < 3 || toks.size() % 2 == 0)
          throw ParseError("column entry needs name and row/value pairs at " +
                           where);
        const int j = need_col(toks[0]);
        for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
          const std::string& rname = toks[k];
          const double v = parse_number(toks[k + 1], where.c_str());
          if (rname == obj_name) {
            col_cost[j] = v;
          } else {
            auto it = row_index.find(rname);
            if (it == row_index.end())
              throw ParseError("unknown row '" + rname + "' at " + where);
            row_entries[it->second].push_back({j, v});
          }
        }
        break;
      }
      case Sec::Rhs: {
        if (toks.size() < 3 || toks.size() % 2 == 0)
          throw ParseError("rhs entry needs row/value pairs at " + where);
        for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
          const std::string& rname = toks[k];
          const double v = parse_number(toks[k + 1], where.c_str());
          if (rname == obj_name)
            throw ParseError("objective constants are unsupported at " +
                             where);
          auto it = row_index.find(rname);
          if (it == row_index.end())
            throw ParseError("unknown row '" + rname + "' at " + where);
          rhs[it->second] = v;
          rhs_set[it->second] = 1;
        }
        break;
      }
      case Sec::Ranges: {
        if (toks.size() < 3 || toks.size() % 2 == 0)
          throw ParseError("range entry needs row/value pairs at " + where);
        for (std::size_t k = 1; k + 1 < toks.size(); k += 2) {
          auto it = row_index.find(toks[k]);
          if (it == row_index.end())
            throw ParseError("unknown row '" + toks[k] + "' at " + where);
          range[it->second] = parse_number(toks[k + 1], where.c_str());
          range_set[it->second] = 1;
        }
        break;
      }
      case Sec::Bounds: {
        const std::string& kind = toks[0];
        const bool needs_value =
            kind == "LO" || kind == "UP" || kind == "FX";
        if (toks.size() < (needs_value ? 4u : 3u))
          throw ParseError("incomplete bound at " + where);
        const int j = need_col(toks[2]);
        if (kind == "LO") {
          col_lb[j] = parse_number(toks[3], where.c_str());
          lb_set[j] = 1;
        } else if (kind == "UP") {
          col_ub[j] = parse_number(toks[3], where.c_str());
          ub_set[j] = 1;
        } else if (kind == "FX") {
          col_lb[j] = col_ub[j] = parse_number(toks[3], where.c_str());
          lb_set[j] = ub_set[j] = 1;
        } else if (kind == "FR") {
          col_lb[j] = -kInf;
          col_ub[j] = kInf;
          lb_set[j] = ub_set[j] = 1;
        } else if (kind == "MI") {
          col_lb[j] = -kInf;
          lb_set[j] = 1;
        } else if (kind == "PL") {
          col_ub[j] = kInf;
          ub_set[j] = 1;
        } else if (kind == "BV") {
          col_lb[j] = 0.0;
          col_ub[j] = 1.0;
          col_int[j] = 1;
          lb_set[j] = ub_set[j] = 1;
        } else {
          throw ParseError("unknown bound type '" + kind + "' at " + where);
        }
        break;
      }
      case Sec::None:
        throw ParseError("data before any section at " + where);
      default:
        break;
    }
  }
  if (obj_name.empty())
    throw ParseError("no objective row found (expected an N row)");

  SparseMilp model;
  for (std::size_t j = 0; j < col_names.size(); ++j)
    model.add_column(col_names[j], col_lb[j], col_ub[j], col_cost[j],
                     col_int[j] != 0);
  for (std::size_t i = 0; i < row_names.size(); ++i) {
    double lo, up;
    const double b = rhs[i];  // defaults to zero when absent
    switch (row_sense[i]) {
      case 'L': lo = -kInf; up = b; break;
      case 'G': lo = b; up = kInf; break;
      case 'E': lo = up = b; break;
      default: lo = -kInf; up = kInf; break;  // free row
    }
    if (range_set[i]) {
      const double r = range[i];
      switch (row_sense[i]) {
        case 'L': lo = up - std::fabs(r); break;
        case 'G': up = lo + std::fabs(r); break;
        case 'E':
          if (r >= 0) up = lo + r;
          else lo = up + r;
          break;
        default:
          throw ParseError("range on a free row '" + row_names[i] + "'");
      }
    }
    model.add_row(row_names[i], lo, up, row_entries[i]);
  }
  return model;
}

std::vector<double> read_external_solution(std::istream& in,
                                           const SparseMilp& model) {
  std::unordered_map<std::string, int> lookup;
  for (int j = 0; j < model.n_cols(); ++j) {
    lookup.emplace(model.col_names[j], j);
    lookup.emplace(mangled_column_name(j), j);
  }
  std::vector<double> values(model.n_cols(), 0.0);
  std::string line;
  int lineno = 0;
  long assigned = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> toks = tokenize(t);
    if (toks.size() < 2)
      throw ParseError("expected 'name value' on line " +
                       std::to_string(lineno));
    auto it = lookup.find(toks[0]);
    if (it == lookup.end())
      throw ParseError("unknown variable '" + toks[0] + "' on line " +
                       std::to_string(lineno));
    values[it->second] =
        parse_number(toks[1], ("line " + std::to_string(lineno)).c_str());
    ++assigned;
  }
  if (assigned == 0)
    throw ParseError("solution file contains no assignments");
  return values;
}

}  // namespace taperplan::mps
