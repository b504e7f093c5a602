#include "hsg/cnf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace hsg {

bool Clause::is_tautology() const {
  for (int l : lits)
    if (std::find(lits.begin(), lits.end(), -l) != lits.end())
      return true;
  return false;
}

std::vector<int> Clause::normalized() const {
  std::vector<int> v = lits;
  std::sort(v.begin(), v.end());
  return v;
}

namespace {

struct Cursor {
  std::string_view text;
  size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n')
      ++line;
    ++pos;
  }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek())))
      advance();
  }
  // Reads to end of line, returns content without the newline.
  std::string_view rest_of_line() {
    size_t start = pos;
    while (!eof() && peek() != '\n')
      ++pos;
    std::string_view s = text.substr(start, pos - start);
    if (!eof())
      advance(); // consume '\n'
    return s;
  }
  std::optional<long> read_int() {
    skip_ws();
    if (eof())
      return std::nullopt;
    size_t start = pos;
    if (peek() == '-' || peek() == '+')
      advance();
    size_t digits_start = pos;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek())))
      advance();
    if (pos == digits_start) {
      pos = start;
      return std::nullopt;
    }
    return std::stol(std::string(text.substr(start, pos - start)));
  }
};

} // namespace

CnfFormula parse_dimacs(std::string_view text, ParseWarnings *warn) {
  Cursor cur{text};
  CnfFormula f;
  ParseWarnings local;
  ParseWarnings &w = warn ? *warn : local;

  bool have_header = false;
  long declared_clauses = 0;

  // Comments and header.
  while (!cur.eof()) {
    cur.skip_ws();
    if (cur.eof())
      break;
    char c = cur.peek();
    if (c == 'c') {
      cur.advance();
      if (!cur.eof() && cur.peek() == ' ')
        cur.advance();
      f.comments.emplace_back(cur.rest_of_line());
      continue;
    }
    if (c == 'p') {
      int header_line = cur.line;
      std::istringstream hs{std::string(cur.rest_of_line())};
      std::string p, fmt;
      long nv = -1, nc = -1;
      hs >> p >> fmt >> nv >> nc;
      if (p != "p" || fmt != "cnf" || nv < 0 || nc < 0 || hs.fail())
        throw ParseError(header_line, "malformed header, expected 'p cnf <vars> <clauses>'");
      f.num_vars = static_cast<int>(nv);
      declared_clauses = nc;
      have_header = true;
      break;
    }
    throw ParseError(cur.line, "missing 'p cnf' header");
  }
  if (!have_header)
    throw ParseError(cur.line, "missing 'p cnf' header");

  // Clause body: whitespace-separated literals, 0-terminated, comments allowed.
  Clause current;
  bool in_clause = false;
  while (true) {
    cur.skip_ws();
    if (cur.eof())
      break;
    if (cur.peek() == 'c') {
      cur.advance();
      if (!cur.eof() && cur.peek() == ' ')
        cur.advance();
      f.comments.emplace_back(cur.rest_of_line());
      continue;
    }
    int lit_line = cur.line;
    auto v = cur.read_int();
    if (!v)
      throw ParseError(cur.line, "expected literal or 0");
    if (*v == 0) {
      if (current.is_tautology())
        ++w.tautological_clauses;
      if (current.empty())
        ++w.empty_clauses;
      f.clauses.push_back(std::move(current));
      current = Clause{};
      in_clause = false;
      continue;
    }
    if (std::abs(*v) > f.num_vars)
      throw ParseError(lit_line, "literal " + std::to_string(*v) +
                                     " out of declared range 1.." +
                                     std::to_string(f.num_vars));
    int lit = static_cast<int>(*v);
    if (std::find(current.lits.begin(), current.lits.end(), lit) !=
        current.lits.end()) {
      ++w.duplicate_literals;
    } else {
      current.lits.push_back(lit);
    }
    in_clause = true;
  }
  if (in_clause)
    throw ParseError(cur.line, "unterminated final clause (missing 0)");
  if (static_cast<long>(f.clauses.size()) != declared_clauses)
    throw ParseError(cur.line,
                     "clause count mismatch: header declares " +
                         std::to_string(declared_clauses) + ", file has " +
                         std::to_string(f.clauses.size()));
  return f;
}

CnfFormula read_dimacs_file(const std::string &path, ParseWarnings *warn) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dimacs(buf.str(), warn);
}

std::string serialize_dimacs(const CnfFormula &f) {
  std::string out;
  out.reserve(f.clauses.size() * 16 + 64);
  for (const auto &c : f.comments) {
    out += "c ";
    out += c;
    out += '\n';
  }
  out += "p cnf " + std::to_string(f.num_vars) + ' ' +
         std::to_string(f.clauses.size()) + '\n';
  for (const auto &cl : f.clauses) {
    for (int l : cl.lits) {
      out += std::to_string(l);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

void write_dimacs_file(const CnfFormula &f, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << serialize_dimacs(f);
}

namespace {

// Assignment state: 0 unknown, 1 true, -1 false.
struct DpllState {
  const CnfFormula &f;
  std::vector<int8_t> value; // 1-based

  explicit DpllState(const CnfFormula &f_) : f(f_), value(f_.num_vars + 1, 0) {}

  int8_t lit_value(int l) const {
    int8_t v = value[std::abs(l)];
    return l > 0 ? v : static_cast<int8_t>(-v);
  }

  // Returns false on conflict. Appends forced variables to trail.
  bool propagate(std::vector<int> &trail) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto &cl : f.clauses) {
        int unassigned_lit = 0;
        int unassigned_count = 0;
        bool satisfied = false;
        for (int l : cl.lits) {
          int8_t v = lit_value(l);
          if (v > 0) {
            satisfied = true;
            break;
          }
          if (v == 0) {
            ++unassigned_count;
            unassigned_lit = l;
          }
        }
        if (satisfied)
          continue;
        if (unassigned_count == 0)
          return false; // all literals false
        if (unassigned_count == 1) {
          int var = std::abs(unassigned_lit);
          value[var] = unassigned_lit > 0 ? 1 : -1;
          trail.push_back(var);
          changed = true;
        }
      }
    }
    return true;
  }

  bool solve() {
    std::vector<int> trail;
    if (!propagate(trail)) {
      undo(trail);
      return false;
    }
    int var = 0;
    for (int v = 1; v <= f.num_vars; ++v)
      if (value[v] == 0) {
        var = v;
        break;
      }
    if (var == 0)
      return true; // total assignment, no conflict
    for (int8_t choice : {int8_t{1}, int8_t{-1}}) {
      value[var] = choice;
      if (solve())
        return true;
      value[var] = 0;
    }
    undo(trail);
    return false;
  }

  void undo(const std::vector<int> &trail) {
    for (int v : trail)
      value[v] = 0;
  }
};

} // namespace

SatResult brute_force_sat(const CnfFormula &f, int var_limit) {
  if (f.num_vars > var_limit)
    throw std::invalid_argument("brute_force_sat: " +
                                std::to_string(f.num_vars) +
                                " variables exceed limit " +
                                std::to_string(var_limit));
  DpllState st(f);
  SatResult r;
  r.satisfiable = st.solve();
  if (r.satisfiable) {
    r.assignment.assign(f.num_vars + 1, false);
    for (int v = 1; v <= f.num_vars; ++v)
      r.assignment[v] = st.value[v] > 0; // unassigned defaults to false
  }
  return r;
}

bool satisfies(const CnfFormula &f, const std::vector<bool> &assignment) {
  for (const auto &cl : f.clauses) {
    bool sat = false;
    for (int l : cl.lits) {
      bool v = assignment[std::abs(l)];
      if ((l > 0) == v) {
        sat = true;
        break;
      }
    }
    if (!sat)
      return false;
  }
  return true;
}

CnfFormula subformula(const CnfFormula &f, const std::vector<int> &indices) {
  CnfFormula s;
  s.num_vars = f.num_vars;
  s.clauses.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= f.num_clauses())
      throw std::out_of_range("clause index " + std::to_string(i));
    s.clauses.push_back(f.clauses[i]);
  }
  return s;
}

CoreSet deletion_core(const CnfFormula &f, int var_limit) {
  if (brute_force_sat(f, var_limit).satisfiable)
    throw std::invalid_argument("deletion_core: formula is not unsatisfiable");
  std::vector<int> keep(f.num_clauses());
  for (int i = 0; i < f.num_clauses(); ++i)
    keep[i] = i;
  for (int i = 0; i < f.num_clauses(); ++i) {
    std::vector<int> trial;
    trial.reserve(keep.size());
    for (int k : keep)
      if (k != i)
        trial.push_back(k);
    if (trial.size() != keep.size() &&
        !brute_force_sat(subformula(f, trial), var_limit).satisfiable)
      keep = std::move(trial);
  }
  return CoreSet{std::move(keep), CoreSource::internal_oracle};
}

CnfFormula core_formula(const CnfFormula &f, const CoreSet &core) {
  CnfFormula c = subformula(f, core.clause_indices);
  return c;
}

void write_core_file(const CnfFormula &f, const CoreSet &core,
                     const std::string &path) {
  write_dimacs_file(core_formula(f, core), path);
}

} // namespace hsg
