// Test-only oracles, independent of the library implementations they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "hsg/cnf.hpp"
#include "hsg/community.hpp"
#include "hsg/graph.hpp"
#include "hsg/rng.hpp"

namespace oracle {

// Exhaustive 2^n truth table scan.
inline bool truth_table_sat(const hsg::CnfFormula &f) {
  for (uint64_t mask = 0; mask < (uint64_t(1) << f.num_vars); ++mask) {
    bool all = true;
    for (const auto &cl : f.clauses) {
      bool sat = false;
      for (int l : cl.lits) {
        bool v = (mask >> (std::abs(l) - 1)) & 1;
        if ((l > 0) == v) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all)
      return true;
  }
  return f.num_vars == 0 && f.clauses.empty();
}

// Newman Q computed literally, clause by clause, as a second opinion.
inline double modularity_direct(const hsg::GraphView &view,
                                const std::vector<int> &labels) {
  double m = double(view.edges.size());
  std::map<int, double> e, d;
  for (auto [u, v] : view.edges) {
    d[labels[u]] += 1;
    d[labels[v]] += 1;
    if (labels[u] == labels[v])
      e[labels[u]] += 1;
  }
  double q = 0;
  for (auto &[c, deg] : d)
    q += e[c] / m - (deg / (2 * m)) * (deg / (2 * m));
  return q;
}

// Best modularity over every set partition of the nodes (Bell-number walk;
// fine up to ~10 nodes).
inline double best_partition_modularity(const hsg::GraphView &view) {
  int n = view.num_nodes;
  std::vector<int> labels(n, 0);
  double best = -1e9;
  // Restricted growth strings enumerate set partitions exactly once.
  auto rec = [&](auto &&self, int i, int max_used) -> void {
    if (i == n) {
      best = std::max(best, modularity_direct(view, labels));
      return;
    }
    for (int c = 0; c <= max_used + 1 && c < n; ++c) {
      labels[i] = c;
      self(self, i + 1, std::max(max_used, c));
    }
  };
  rec(rec, 1, 0); // node 0 pinned to community 0
  return best;
}

// Triangle count per node by direct enumeration.
inline double clustering_direct(const hsg::GraphView &view) {
  int n = view.num_nodes;
  std::vector<std::set<int>> nb(n);
  for (auto [u, v] : view.edges) {
    nb[u].insert(v);
    nb[v].insert(u);
  }
  double total = 0;
  for (int u = 0; u < n; ++u) {
    size_t d = nb[u].size();
    if (d < 2)
      continue;
    int tri = 0;
    for (int v : nb[u])
      for (int w : nb[u])
        if (v < w && nb[v].count(w))
          ++tri;
    total += 2.0 * tri / (double(d) * double(d - 1));
  }
  return total / n;
}

// VIG edge count by a pairwise scan over the clause list.
inline size_t vig_edge_count_direct(const hsg::CnfFormula &f) {
  std::set<std::pair<int, int>> edges;
  for (const auto &cl : f.clauses)
    for (size_t i = 0; i < cl.lits.size(); ++i)
      for (size_t j = i + 1; j < cl.lits.size(); ++j) {
        int a = std::abs(cl.lits[i]), b = std::abs(cl.lits[j]);
        if (a == b)
          continue;
        edges.emplace(std::min(a, b), std::max(a, b));
      }
  return edges.size();
}

// Boolean adjacency squaring over the full embedded graph node set.
inline std::set<hsg::NodeRef> two_hop_matrix(const hsg::EmbeddedGraph &g,
                                             hsg::NodeRef start) {
  using hsg::NodeKind;
  using hsg::NodeRef;
  std::vector<NodeRef> nodes;
  for (int ln = 0; ln < 2 * g.num_vars; ++ln)
    nodes.push_back({ln % 2 ? NodeKind::NegLit : NodeKind::PosLit, ln});
  for (int c : g.alive_clause_ids())
    nodes.push_back({NodeKind::Clause, c});
  for (int c = 0; c < g.num_communities; ++c)
    nodes.push_back({NodeKind::Community, c});
  std::map<NodeRef, int> index;
  for (size_t i = 0; i < nodes.size(); ++i)
    index[nodes[i]] = int(i);

  size_t n = nodes.size();
  std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
  auto connect = [&](NodeRef x, NodeRef y) {
    a[index.at(x)][index.at(y)] = a[index.at(y)][index.at(x)] = true;
  };
  for (int c : g.alive_clause_ids())
    for (int l : g.clause_nodes[c].lits)
      connect({NodeKind::Clause, c},
              {hsg::lit_node(l) % 2 ? NodeKind::NegLit : NodeKind::PosLit,
               hsg::lit_node(l)});
  for (int c = 0; c < g.num_communities; ++c)
    for (int v : g.cmty_vars[c]) {
      connect({NodeKind::Community, c}, {NodeKind::PosLit, hsg::lit_node(v)});
      connect({NodeKind::Community, c}, {NodeKind::NegLit, hsg::lit_node(-v)});
    }

  int s = index.at(start);
  std::set<NodeRef> out;
  for (size_t j = 0; j < n; ++j) {
    if (int(j) == s)
      continue;
    for (size_t k = 0; k < n; ++k)
      if (a[s][k] && a[k][j]) {
        out.insert(nodes[j]);
        break;
      }
  }
  return out;
}

// Scalar BCE recomputation.
inline double bce_direct(const std::vector<double> &pos,
                         const std::vector<double> &neg) {
  auto cl = [](double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); };
  double a = 0, b = 0;
  for (double p : pos)
    a += -std::log(cl(p));
  for (double p : neg)
    b += -std::log(1 - cl(p));
  return a / pos.size() + b / neg.size();
}

// O(n^2) pairwise AUC.
inline double auc_pairwise(const std::vector<double> &pos,
                           const std::vector<double> &neg) {
  double wins = 0;
  for (double p : pos)
    for (double q : neg) {
      if (p > q)
        wins += 1;
      else if (p == q)
        wins += 0.5;
    }
  return wins / (double(pos.size()) * double(neg.size()));
}

// Clauset-style inverse-CDF sampler for a discrete power law.
inline std::vector<int> sample_power_law(uint64_t seed, double alpha,
                                         int x_min, int n) {
  hsg::Rng rng(seed);
  std::vector<int> out;
  out.reserve(n);
  while (int(out.size()) < n) {
    double u = rng.real01();
    if (u >= 1.0)
      continue;
    double x =
        (double(x_min) - 0.5) * std::pow(1.0 - u, -1.0 / (alpha - 1.0)) + 0.5;
    if (x < 1e9)
      out.push_back(int(x));
  }
  return out;
}

// chi^2 statistic for an observed/uniform-expected table.
inline double chi_square_uniform(const std::map<int, int> &counts, int total,
                                 size_t categories) {
  double expected = double(total) / double(categories);
  double chi = 0;
  for (auto &[k, c] : counts)
    chi += (c - expected) * (c - expected) / expected;
  chi += (categories - counts.size()) * expected; // unseen categories
  return chi;
}

} // namespace oracle
