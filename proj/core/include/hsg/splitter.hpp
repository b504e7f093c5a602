#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsg/graph.hpp"
#include "hsg/rng.hpp"

namespace hsg {

enum class SplitStage : uint8_t { cross_cmty, in_cmty };

struct SplitEvent {
  SplitStage stage;
  int parent;                  // clause node losing the edges
  int child;                   // fresh clause node receiving them
  std::vector<int> moved_lits; // signed literals moved to the child

  bool operator==(const SplitEvent &o) const = default;
};

/// Replayable record of a full splitting run. Forward replay on the source
/// graph yields the template; merging child into parent in reverse order
/// reconstructs the source graph exactly (ids included).
struct SplitTrace {
  std::vector<SplitEvent> events;
  std::vector<int> core_indices; // clause node ids marked core

  int m1() const; // in-community event count
  int m2() const; // cross-community event count
};

struct TrainTuple {
  int u_pos;    // parent of the split
  int v_pos;    // fresh node of the split
  int v_neg;    // stage-consistent non-split partner
  int snapshot; // trace prefix length at which all three exist
  SplitStage stage;
};

/// Stage 1: detach whole-community edge blocks until every non-core clause
/// touches exactly one community. Mutates g, returns the events applied.
std::vector<SplitEvent> split_cross_community(EmbeddedGraph &g, Rng &rng);

/// Stage 2: move single edges off non-core clauses until all have degree 1.
std::vector<SplitEvent> split_in_community(EmbeddedGraph &g, Rng &rng);

/// Draws v_neg for the positive pair (u_pos, v_pos) on the current graph.
/// Returns nullopt when the stage pool is empty (tuple dropped).
std::optional<int> sample_negative(const EmbeddedGraph &g, int u_pos,
                                   int v_pos, SplitStage stage, Rng &rng);

struct TemplateBundle {
  EmbeddedGraph graph; // the template: core intact, all else degree 1
  SplitTrace trace;
  std::vector<TrainTuple> tuples;
  int dropped_tuples = 0;
};

/// Runs both stages from scratch and collects one training tuple per split
/// event (minus negative-pool drops). Refuses formulae with empty clauses.
TemplateBundle build_template(const CnfFormula &f, const std::vector<int> &cmty,
                              const CoreSet &core, uint64_t seed);

/// Applies the first `prefix` trace events to a copy of the source graph.
EmbeddedGraph replay_forward(const EmbeddedGraph &source,
                             const SplitTrace &trace, size_t prefix);

/// Undoes the whole trace on a copy of the template graph.
EmbeddedGraph replay_inverse(const EmbeddedGraph &templ,
                             const SplitTrace &trace);

/// Trace file, line based, versioned with "HSG-TRACE 1". Carries core ids,
/// events, and training tuples so a template bundle round-trips.
void write_trace_file(const SplitTrace &trace,
                      const std::vector<TrainTuple> &tuples,
                      const std::string &path);
struct TraceFile {
  SplitTrace trace;
  std::vector<TrainTuple> tuples;
};
TraceFile read_trace_file(const std::string &path);

} // namespace hsg
