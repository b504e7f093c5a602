#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsg/cnf.hpp"
#include "hsg/gnn.hpp"
#include "hsg/graph.hpp"
#include "hsg/rng.hpp"
#include "hsg/splitter.hpp"

namespace hsg {

/// Scrambling amounts: variable permutation, clause permutation, polarity
/// flip probability.
struct ScramblePolicy {
  double p1 = 0.0, p2 = 0.0, p3 = 0.0;
  uint64_t seed = 0;
};

/// The renaming a scramble applied; inverting it maps scrambled core clauses
/// back onto the originals.
struct ScrambleMap {
  std::vector<int> var_perm;    // 1-based, old var -> new var
  std::vector<uint8_t> flip;    // 1-based, polarity flip per new var id
  std::vector<int> clause_perm; // old clause id -> new clause id
};

/// Satisfiability-preserving core randomization: core variables are renamed
/// among themselves (globally, wherever they occur), core clause nodes swap
/// contents, flipped variables swap their two literal nodes' edge sets.
/// With `whole_formula` every alive clause is treated as eligible.
EmbeddedGraph scramble_core(const EmbeddedGraph &g, const ScramblePolicy &pol,
                            ScrambleMap *map_out = nullptr,
                            bool whole_formula = false);

enum class Selection { argmax, multinomial };

struct GenConfig {
  double alpha = 1.0;
  int candidates = 100;
  Selection selection = Selection::argmax;
  uint64_t seed = 0;
  bool whole_formula_scramble = false;
};

/// Up to k valid candidate pairs for the stage, uniform without
/// replacement-by-pair. Empty result signals phase exhaustion.
std::vector<std::pair<int, int>> propose_pairs(const EmbeddedGraph &g,
                                               SplitStage stage, int k,
                                               Rng &rng);

struct MergeChoice {
  int u, v;
  double score;
  int candidates;
};

/// Samples candidates, scores them with one forward pass on the current
/// graph, selects per cfg, applies the merge. nullopt when the pool is empty.
std::optional<MergeChoice> merge_step(EmbeddedGraph &g,
                                      const PairScorer &scorer,
                                      SplitStage stage, const GenConfig &cfg,
                                      Rng &rng);

struct GenLogEntry {
  int step; // 1-based over the whole run
  SplitStage stage;
  int u, v;
  double score;
  int candidates;
};

struct GenResult {
  CnfFormula formula;
  CnfFormula k_origin; // scrambled core clauses, original variable numbering
  ScrambleMap scramble;
  std::vector<GenLogEntry> log;
  int n1_planned = 0, n2_planned = 0;
  int n1_done = 0, n2_done = 0;
};

/// Full inference pass: scramble, n1 in-community merges, n2 cross-community
/// merges, with n2 = round(alpha*m2) and n1 + n2 = m1 + m2. Stops a phase
/// early when its candidate pool is exhausted.
GenResult generate(const EmbeddedGraph &templ, int m1, int m2,
                   const PairScorer &in_scorer, const PairScorer &cross_scorer,
                   const ScramblePolicy &policy, const GenConfig &cfg);

/// JSON-lines log: {"step":..,"stage":..,"u":..,"v":..,"score":..}
std::string gen_log_jsonl(const GenResult &r);

} // namespace hsg
