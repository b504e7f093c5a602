#include "hsg/community.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "hsg/rng.hpp"

namespace hsg {

Partition make_partition(std::vector<int> labels) {
  Partition p;
  std::unordered_map<int, int> remap;
  p.assignment.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = remap.emplace(l, p.num_communities);
    if (inserted)
      ++p.num_communities;
    p.assignment.push_back(it->second);
  }
  return p;
}

static void check_cover(const GraphView &view, const Partition &p) {
  if (static_cast<int>(p.assignment.size()) != view.num_nodes)
    throw std::invalid_argument("partition does not cover all nodes");
  for (int c : p.assignment)
    if (c < 0 || c >= p.num_communities)
      throw std::invalid_argument("partition has out-of-range community id");
}

double modularity(const GraphView &view, const Partition &p) {
  if (view.edges.empty())
    throw std::invalid_argument("modularity undefined on an edgeless graph");
  check_cover(view, p);
  double m = static_cast<double>(view.edges.size());
  std::vector<double> intra(p.num_communities, 0.0);
  std::vector<double> degree(p.num_communities, 0.0);
  for (auto [u, v] : view.edges) {
    degree[p.assignment[u]] += 1.0;
    degree[p.assignment[v]] += 1.0;
    if (p.assignment[u] == p.assignment[v])
      intra[p.assignment[u]] += 1.0;
  }
  double q = 0.0;
  for (int c = 0; c < p.num_communities; ++c) {
    double frac = degree[c] / (2.0 * m);
    q += intra[c] / m - frac * frac;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Clauset-Newman-Moore

namespace {

struct CnmEntry {
  double dq;
  int i, j;       // i < j
  uint32_t vi, vj; // community versions when pushed

  bool operator<(const CnmEntry &o) const {
    // priority_queue is a max-heap on this ordering: larger dq first,
    // then lower (i, j).
    if (dq != o.dq)
      return dq < o.dq;
    if (i != o.i)
      return i > o.i;
    return j > o.j;
  }
};

} // namespace

Partition detect_cnm(const GraphView &view) {
  if (view.num_nodes == 0 || view.edges.empty())
    throw std::invalid_argument("detect_cnm: empty graph");

  int n = view.num_nodes;
  double m = static_cast<double>(view.edges.size());
  std::vector<double> deg(n, 0.0);
  std::vector<std::map<int, double>> between(n); // community -> edge count
  for (auto [u, v] : view.edges) {
    deg[u] += 1.0;
    deg[v] += 1.0;
    between[u][v] += 1.0;
    between[v][u] += 1.0;
  }

  std::vector<bool> alive(n, true);
  std::vector<uint32_t> version(n, 0);
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i)
    label[i] = i;

  auto gain = [&](int i, int j) {
    return between[i].at(j) / m - deg[i] * deg[j] / (2.0 * m * m);
  };

  std::priority_queue<CnmEntry> heap;
  for (int i = 0; i < n; ++i)
    for (auto &[j, w] : between[i])
      if (i < j)
        heap.push({gain(i, j), i, j, version[i], version[j]});

  while (!heap.empty()) {
    CnmEntry top = heap.top();
    heap.pop();
    if (!alive[top.i] || !alive[top.j] || version[top.i] != top.vi ||
        version[top.j] != top.vj)
      continue;
    if (top.dq <= 0.0)
      break;

    int i = top.i, j = top.j; // merge j into i, i keeps the lower id
    for (auto &[k, w] : between[j]) {
      if (k == i)
        continue;
      between[i][k] += w;
      between[k][i] += w;
      between[k].erase(j);
    }
    between[i].erase(j);
    between[j].clear();
    deg[i] += deg[j];
    alive[j] = false;
    for (int v = 0; v < n; ++v)
      if (label[v] == j)
        label[v] = i;
    ++version[i];
    ++version[j];
    for (auto &[k, w] : between[i]) {
      int a = std::min(i, k), b = std::max(i, k);
      heap.push({gain(a, b), a, b, version[a], version[b]});
    }
  }
  return make_partition(std::move(label));
}

// ---------------------------------------------------------------------------
// Louvain

namespace {

struct WeightedGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj; // no self entries
  std::vector<double> self_loop;                        // w_ii, counted once
  std::vector<double> degree;                           // k_i incl. 2*w_ii
  double total_weight = 0;                              // m

  static WeightedGraph from_view(const GraphView &view) {
    WeightedGraph g;
    g.n = view.num_nodes;
    g.adj.assign(g.n, {});
    g.self_loop.assign(g.n, 0.0);
    g.degree.assign(g.n, 0.0);
    for (auto [u, v] : view.edges) {
      g.adj[u].push_back({v, 1.0});
      g.adj[v].push_back({u, 1.0});
      g.degree[u] += 1.0;
      g.degree[v] += 1.0;
      g.total_weight += 1.0;
    }
    return g;
  }
};

constexpr double kMinGain = 1e-12;

// One level of local moves. Returns the node->community map (dense) or an
// empty vector when no node moved.
std::vector<int> one_level(const WeightedGraph &g, Rng &rng) {
  std::vector<int> comm(g.n);
  std::vector<double> tot(g.n);
  for (int i = 0; i < g.n; ++i) {
    comm[i] = i;
    tot[i] = g.degree[i];
  }
  double m = g.total_weight;

  std::vector<int> order(g.n);
  for (int i = 0; i < g.n; ++i)
    order[i] = i;
  rng.shuffle(order);

  bool any_move = false;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int u : order) {
      int cu = comm[u];
      // Weight from u to each neighboring community.
      std::map<int, double> links;
      links[cu] += 0.0;
      for (auto [v, w] : g.adj[u])
        links[comm[v]] += w;
      tot[cu] -= g.degree[u];
      // Scaled insertion gain; common 1/m factor dropped.
      auto ins_gain = [&](int c, double w) {
        return w - tot[c] * g.degree[u] / (2.0 * m);
      };
      double base = ins_gain(cu, links[cu]);
      int best = cu;
      double best_gain = 0.0;
      for (auto &[c, w] : links) {
        if (c == cu)
          continue;
        double gain = ins_gain(c, w) - base;
        bool better = gain > best_gain + kMinGain;
        bool tie_lower = best != cu && std::abs(gain - best_gain) <= kMinGain &&
                         c < best;
        if (gain > kMinGain && (better || tie_lower)) {
          best = c;
          best_gain = gain;
        }
      }
      tot[best] += g.degree[u];
      if (best != cu) {
        comm[u] = best;
        improved = true;
        any_move = true;
      }
    }
  }
  if (!any_move)
    return {};
  return comm;
}

WeightedGraph aggregate(const WeightedGraph &g, const std::vector<int> &dense) {
  int k = *std::max_element(dense.begin(), dense.end()) + 1;
  WeightedGraph h;
  h.n = k;
  h.adj.assign(k, {});
  h.self_loop.assign(k, 0.0);
  h.degree.assign(k, 0.0);
  h.total_weight = g.total_weight;
  std::vector<std::map<int, double>> acc(k);
  for (int u = 0; u < g.n; ++u) {
    int cu = dense[u];
    h.self_loop[cu] += g.self_loop[u];
    for (auto [v, w] : g.adj[u]) {
      int cv = dense[v];
      if (cv == cu)
        h.self_loop[cu] += w / 2.0; // each intra edge visited twice
      else
        acc[cu][cv] += w;
    }
  }
  for (int c = 0; c < k; ++c) {
    h.degree[c] = 2.0 * h.self_loop[c];
    for (auto &[d, w] : acc[c]) {
      h.adj[c].push_back({d, w});
      h.degree[c] += w;
    }
  }
  return h;
}

} // namespace

Partition detect_louvain(const GraphView &view, uint64_t seed) {
  if (view.num_nodes == 0 || view.edges.empty())
    throw std::invalid_argument("detect_louvain: empty graph");

  Rng rng(seed);
  WeightedGraph g = WeightedGraph::from_view(view);
  std::vector<int> node_to_comm(view.num_nodes);
  for (int i = 0; i < view.num_nodes; ++i)
    node_to_comm[i] = i;

  while (true) {
    std::vector<int> moved = one_level(g, rng);
    if (moved.empty())
      break;
    // Renumber the level's communities densely.
    std::unordered_map<int, int> remap;
    std::vector<int> dense(g.n);
    int next = 0;
    for (int u = 0; u < g.n; ++u) {
      auto [it, ins] = remap.emplace(moved[u], next);
      if (ins)
        ++next;
      dense[u] = it->second;
    }
    for (auto &c : node_to_comm)
      c = dense[c];
    if (next == g.n)
      break; // nothing aggregated, fixed point
    g = aggregate(g, dense);
  }
  return make_partition(std::move(node_to_comm));
}

void write_partition_file(const Partition &p, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  for (size_t i = 0; i < p.assignment.size(); ++i)
    out << i << ' ' << p.assignment[i] << '\n';
}

} // namespace hsg
