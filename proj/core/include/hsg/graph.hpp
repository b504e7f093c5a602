#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsg/cnf.hpp"

namespace hsg {

enum class ViewKind { VIG, VCG, LIG, LCG };

/// Plain undirected simple graph used by community detection and metrics.
/// Edges are stored once with u < v; no self-loops.
struct GraphView {
  ViewKind kind = ViewKind::VIG;
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<std::vector<int>> adjacency() const;
};

enum class NodeKind : uint8_t { PosLit, NegLit, Clause, Community };

struct NodeRef {
  NodeKind kind;
  int id; // literal node id, clause node id, or community id

  bool operator==(const NodeRef &o) const = default;
  auto operator<=>(const NodeRef &o) const = default;
};

/// Literal node ids: positive literal of variable v (1-based) is 2v-2, the
/// negated literal is 2v-1.
inline int lit_node(int lit) {
  int v = lit > 0 ? lit : -lit;
  return 2 * (v - 1) + (lit < 0 ? 1 : 0);
}
inline int node_lit(int lit_node_id) {
  int v = lit_node_id / 2 + 1;
  return (lit_node_id % 2) ? -v : v;
}

/// Community-and-core embedded literal-clause graph. Clause nodes have stable
/// ids for the lifetime of the graph: splits append, merges mark dead.
class EmbeddedGraph {
public:
  struct ClauseNode {
    std::vector<int> lits; // sorted, distinct signed literals
    bool alive = true;
    bool core = false;
  };

  int num_vars = 0;
  int num_communities = 0;
  std::vector<ClauseNode> clause_nodes;
  std::vector<int> cmty_of_var;                // 1-based, var -> community id
  std::vector<std::vector<int>> lit_clauses;   // lit node -> sorted alive clause ids
  std::vector<std::vector<int>> cmty_vars;     // community -> sorted member vars

  int alive_clause_count() const { return alive_clauses_; }
  bool is_alive(int clause_id) const {
    return clause_id >= 0 &&
           clause_id < static_cast<int>(clause_nodes.size()) &&
           clause_nodes[clause_id].alive;
  }
  int clause_degree(int clause_id) const {
    return static_cast<int>(clause_nodes[clause_id].lits.size());
  }
  int cmty_of_lit_node(int ln) const { return cmty_of_var[ln / 2 + 1]; }

  /// Distinct communities touched by a clause's variables, sorted.
  std::vector<int> clause_communities(int clause_id) const;
  /// Clauses reachable from community c in two hops (c's variables' clauses).
  std::vector<int> clauses_of_community(int c) const;
  bool clause_touches_community(int clause_id, int c) const;
  /// True when the two clauses share no variable in either polarity.
  bool disjoint_vars(int a, int b) const;

  std::vector<int> alive_clause_ids() const;

  /// Adds a clause node holding the given literals; returns its id.
  int add_clause_node(const std::vector<int> &lits, bool core);
  /// Replaces the whole clause-node table (ids = vector positions) and
  /// rebuilds the literal adjacency.
  void assign_clause_nodes(std::vector<ClauseNode> nodes);
  /// Moves the given literals from clause `from` onto a fresh node.
  int detach_to_new_node(int from, const std::vector<int> &moved_lits);
  void validate() const; // throws on broken adjacency or affiliation

private:
  int alive_clauses_ = 0;
  void attach(int clause_id, int lit);
  void detach(int clause_id, int lit);

  friend EmbeddedGraph build_embedded(const CnfFormula &,
                                      const std::vector<int> &,
                                      const CoreSet &);
  friend void merge_clause_nodes(EmbeddedGraph &, int, int);
};

/// cmty maps each variable (1-based index; entry 0 ignored) to a community
/// id. Ids are remapped to a dense [0, k) range preserving numeric order.
EmbeddedGraph build_embedded(const CnfFormula &f, const std::vector<int> &cmty,
                             const CoreSet &core);

/// Inverse of build_embedded modulo dead nodes: one clause per alive clause
/// node in id order. Throws on a degree-0 clause node.
CnfFormula to_formula(const EmbeddedGraph &g);

GraphView derive_view(const CnfFormula &f, ViewKind kind);

/// Nodes reachable in exactly two edges, excluding the start node itself.
std::vector<NodeRef> two_hop(const EmbeddedGraph &g, NodeRef node);

/// u absorbs v's occurrence edges; v is removed. Preconditions: distinct
/// alive non-core clause nodes with disjoint variable sets.
void merge_clause_nodes(EmbeddedGraph &g, int u, int v);

/// Diagnostic edge list: "L<i> C<j>" occurrence edges then "M<k> L<i>"
/// affiliation edges, one per line.
std::string dump_graph(const EmbeddedGraph &g);

/// Community affiliation file: "var_id community_id" per line.
void write_community_file(const std::vector<int> &cmty_of_var,
                          const std::string &path);
std::vector<int> read_community_file(const std::string &path, int num_vars);

} // namespace hsg
