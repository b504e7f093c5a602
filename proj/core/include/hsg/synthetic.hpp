#pragma once

#include <cstdint>
#include <vector>

#include "hsg/cnf.hpp"

namespace hsg {

/// Pigeonhole principle PHP(pigeons, holes): unsatisfiable when
/// pigeons > holes. Variable (p, h) = p * holes + h + 1.
CnfFormula make_pigeonhole(int pigeons, int holes);

struct SyntheticSpec {
  int communities = 3;
  int vars_per_community = 5;
  int clauses_per_community = 6;
  int cross_clauses = 4;
  int clause_size = 3;
  bool plant_core = true; // embeds PHP(3,2) over fresh variables
  uint64_t seed = 0;
};

struct SyntheticFormula {
  CnfFormula formula;
  std::vector<int> cmty_of_var; // 1-based planted communities
  CoreSet core;                 // planted core clause indices
};

/// Community-structured random formula with an optional planted
/// unsatisfiable core occupying its own community.
SyntheticFormula make_community_formula(const SyntheticSpec &spec);

/// Random formula with distinct variables per clause (no duplicate literals,
/// no tautologies); used by round-trip and splitting property tests.
CnfFormula random_formula(uint64_t seed, int num_vars, int num_clauses,
                          int max_clause_size);

/// Random formula that is unsatisfiable by the DPLL oracle (dense clauses
/// over few variables, retried until UNSAT).
CnfFormula random_unsat_formula(uint64_t seed, int num_vars);

} // namespace hsg
