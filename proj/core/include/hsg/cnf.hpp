#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hsg {

/// Disjunction of nonzero signed literals. Literals are kept in input order
/// but deduplicated; a clause holding both l and -l is flagged tautological.
struct Clause {
  std::vector<int> lits;

  Clause() = default;
  Clause(std::initializer_list<int> ls) : lits(ls) {}
  explicit Clause(std::vector<int> ls) : lits(std::move(ls)) {}

  bool empty() const { return lits.empty(); }
  bool is_tautology() const;
  /// Sorted literal vector; clause identity for core matching.
  std::vector<int> normalized() const;

  bool operator==(const Clause &o) const { return lits == o.lits; }
};

struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;
  std::vector<std::string> comments;

  int num_clauses() const { return static_cast<int>(clauses.size()); }
  bool operator==(const CnfFormula &o) const {
    return num_vars == o.num_vars && clauses == o.clauses &&
           comments == o.comments;
  }
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string &msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg),
        line(line_) {}
};

/// Non-fatal oddities accepted by the parser.
struct ParseWarnings {
  int duplicate_literals = 0; // removed on parse
  int tautological_clauses = 0;
  int empty_clauses = 0;
};

CnfFormula parse_dimacs(std::string_view text, ParseWarnings *warn = nullptr);
CnfFormula read_dimacs_file(const std::string &path,
                            ParseWarnings *warn = nullptr);

/// Canonical form: comments, header, one clause per line ending " 0".
std::string serialize_dimacs(const CnfFormula &f);
void write_dimacs_file(const CnfFormula &f, const std::string &path);

enum class CoreSource { external_checker, internal_oracle, file };

/// Indices into a formula's clause list whose conjunction is unsatisfiable.
struct CoreSet {
  std::vector<int> clause_indices; // sorted ascending
  CoreSource source = CoreSource::internal_oracle;

  bool empty() const { return clause_indices.empty(); }
  size_t size() const { return clause_indices.size(); }
};

struct SatResult {
  bool satisfiable = false;
  /// 1-based; values[v] is the assignment of variable v. Empty when UNSAT.
  std::vector<bool> assignment;
  /// Branching decisions taken; a deterministic effort proxy.
  long decisions = 0;
};

inline constexpr int kDefaultOracleVarLimit = 24;

/// DPLL with unit propagation. Desk-scale oracle, exhaustive for UNSAT.
SatResult brute_force_sat(const CnfFormula &f,
                          int var_limit = kDefaultOracleVarLimit);

bool satisfies(const CnfFormula &f, const std::vector<bool> &assignment);

/// Deletion-minimal unsatisfiable core: walks clauses in order and drops any
/// whose removal keeps the remainder unsatisfiable.
CoreSet deletion_core(const CnfFormula &f,
                      int var_limit = kDefaultOracleVarLimit);

/// Subformula restricted to the given clause indices (num_vars preserved).
CnfFormula subformula(const CnfFormula &f, const std::vector<int> &indices);

/// Core sidecar files are DIMACS CNF with the original variable numbering.
CnfFormula core_formula(const CnfFormula &f, const CoreSet &core);
void write_core_file(const CnfFormula &f, const CoreSet &core,
                     const std::string &path);

} // namespace hsg
