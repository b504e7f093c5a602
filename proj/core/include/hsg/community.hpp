#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsg/graph.hpp"

namespace hsg {

struct Partition {
  std::vector<int> assignment; // node -> community id, dense in [0, k)
  int num_communities = 0;
};

/// Renumbers arbitrary labels to dense ids preserving order of first use.
Partition make_partition(std::vector<int> labels);

/// Newman modularity Q = sum_c (e_c/m - (d_c/2m)^2) on an unweighted view.
double modularity(const GraphView &view, const Partition &p);

/// Clauset-Newman-Moore greedy merge, deterministic: among equal gains the
/// lowest (i, j) community pair wins.
Partition detect_cnm(const GraphView &view);

/// Two-phase Louvain with seeded node-visit order, resolution 1.
Partition detect_louvain(const GraphView &view, uint64_t seed);

void write_partition_file(const Partition &p, const std::string &path);

} // namespace hsg
