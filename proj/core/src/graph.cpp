#include "hsg/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hsg {

std::vector<std::vector<int>> GraphView::adjacency() const {
  std::vector<std::vector<int>> adj(num_nodes);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

std::vector<int> EmbeddedGraph::clause_communities(int clause_id) const {
  std::vector<int> cs;
  for (int l : clause_nodes[clause_id].lits) {
    int c = cmty_of_var[std::abs(l)];
    if (std::find(cs.begin(), cs.end(), c) == cs.end())
      cs.push_back(c);
  }
  std::sort(cs.begin(), cs.end());
  return cs;
}

std::vector<int> EmbeddedGraph::clauses_of_community(int c) const {
  std::vector<int> out;
  for (int v : cmty_vars[c]) {
    for (int ln : {lit_node(v), lit_node(-v)})
      out.insert(out.end(), lit_clauses[ln].begin(), lit_clauses[ln].end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool EmbeddedGraph::clause_touches_community(int clause_id, int c) const {
  for (int l : clause_nodes[clause_id].lits)
    if (cmty_of_var[std::abs(l)] == c)
      return true;
  return false;
}

bool EmbeddedGraph::disjoint_vars(int a, int b) const {
  const auto &la = clause_nodes[a].lits;
  const auto &lb = clause_nodes[b].lits;
  for (int x : la)
    for (int y : lb)
      if (std::abs(x) == std::abs(y))
        return false;
  return true;
}

std::vector<int> EmbeddedGraph::alive_clause_ids() const {
  std::vector<int> ids;
  ids.reserve(alive_clauses_);
  for (int i = 0; i < static_cast<int>(clause_nodes.size()); ++i)
    if (clause_nodes[i].alive)
      ids.push_back(i);
  return ids;
}

void EmbeddedGraph::attach(int clause_id, int lit) {
  auto &v = lit_clauses[lit_node(lit)];
  auto it = std::lower_bound(v.begin(), v.end(), clause_id);
  if (it == v.end() || *it != clause_id)
    v.insert(it, clause_id);
}

void EmbeddedGraph::detach(int clause_id, int lit) {
  auto &v = lit_clauses[lit_node(lit)];
  auto it = std::lower_bound(v.begin(), v.end(), clause_id);
  if (it != v.end() && *it == clause_id)
    v.erase(it);
}

int EmbeddedGraph::add_clause_node(const std::vector<int> &lits, bool core) {
  int id = static_cast<int>(clause_nodes.size());
  ClauseNode node;
  node.lits = lits;
  std::sort(node.lits.begin(), node.lits.end());
  node.lits.erase(std::unique(node.lits.begin(), node.lits.end()),
                  node.lits.end());
  node.core = core;
  clause_nodes.push_back(std::move(node));
  for (int l : clause_nodes[id].lits)
    attach(id, l);
  ++alive_clauses_;
  return id;
}

void EmbeddedGraph::assign_clause_nodes(std::vector<ClauseNode> nodes) {
  clause_nodes = std::move(nodes);
  for (auto &v : lit_clauses)
    v.clear();
  alive_clauses_ = 0;
  for (int id = 0; id < static_cast<int>(clause_nodes.size()); ++id) {
    auto &cn = clause_nodes[id];
    std::sort(cn.lits.begin(), cn.lits.end());
    cn.lits.erase(std::unique(cn.lits.begin(), cn.lits.end()), cn.lits.end());
    if (!cn.alive)
      continue;
    ++alive_clauses_;
    for (int l : cn.lits)
      attach(id, l);
  }
}

int EmbeddedGraph::detach_to_new_node(int from,
                                      const std::vector<int> &moved_lits) {
  auto &src = clause_nodes[from];
  for (int l : moved_lits) {
    auto it = std::find(src.lits.begin(), src.lits.end(), l);
    if (it == src.lits.end())
      throw std::logic_error("detach_to_new_node: literal not in clause");
    src.lits.erase(it);
    detach(from, l);
  }
  return add_clause_node(moved_lits, false);
}

void EmbeddedGraph::validate() const {
  int alive = 0;
  for (int i = 0; i < static_cast<int>(clause_nodes.size()); ++i) {
    const auto &cn = clause_nodes[i];
    if (!cn.alive)
      continue;
    ++alive;
    for (int l : cn.lits) {
      if (l == 0 || std::abs(l) > num_vars)
        throw std::logic_error("clause literal out of range");
      const auto &lc = lit_clauses[lit_node(l)];
      if (!std::binary_search(lc.begin(), lc.end(), i))
        throw std::logic_error("occ edge missing in literal adjacency");
    }
  }
  if (alive != alive_clauses_)
    throw std::logic_error("alive clause count out of sync");
  for (int ln = 0; ln < static_cast<int>(lit_clauses.size()); ++ln)
    for (int c : lit_clauses[ln]) {
      if (!clause_nodes[c].alive)
        throw std::logic_error("literal adjacency references dead clause");
      int lit = node_lit(ln);
      const auto &ls = clause_nodes[c].lits;
      if (!std::binary_search(ls.begin(), ls.end(), lit))
        throw std::logic_error("literal adjacency references absent literal");
    }
  for (int v = 1; v <= num_vars; ++v) {
    int c = cmty_of_var[v];
    if (c < 0 || c >= num_communities)
      throw std::logic_error("variable without valid community");
    if (!std::binary_search(cmty_vars[c].begin(), cmty_vars[c].end(), v))
      throw std::logic_error("community membership out of sync");
  }
}

EmbeddedGraph build_embedded(const CnfFormula &f, const std::vector<int> &cmty,
                             const CoreSet &core) {
  if (static_cast<int>(cmty.size()) < f.num_vars + 1)
    throw std::invalid_argument("community map does not cover all variables");
  EmbeddedGraph g;
  g.num_vars = f.num_vars;
  g.lit_clauses.assign(2 * f.num_vars, {});

  // Dense community ids, preserving numeric order of the incoming ids.
  std::map<int, int> remap;
  for (int v = 1; v <= f.num_vars; ++v)
    remap.emplace(cmty[v], 0);
  int next = 0;
  for (auto &kv : remap)
    kv.second = next++;
  g.num_communities = next;
  g.cmty_of_var.assign(f.num_vars + 1, -1);
  g.cmty_vars.assign(next, {});
  for (int v = 1; v <= f.num_vars; ++v) {
    int c = remap.at(cmty[v]);
    g.cmty_of_var[v] = c;
    g.cmty_vars[c].push_back(v);
  }

  for (const auto &cl : f.clauses)
    g.add_clause_node(cl.lits, false);
  for (int idx : core.clause_indices) {
    if (idx < 0 || idx >= f.num_clauses())
      throw std::out_of_range("core index " + std::to_string(idx) +
                              " out of range");
    g.clause_nodes[idx].core = true;
  }
  return g;
}

CnfFormula to_formula(const EmbeddedGraph &g) {
  CnfFormula f;
  f.num_vars = g.num_vars;
  for (int i = 0; i < static_cast<int>(g.clause_nodes.size()); ++i) {
    const auto &cn = g.clause_nodes[i];
    if (!cn.alive)
      continue;
    if (cn.lits.empty())
      throw std::logic_error("to_formula: clause node " + std::to_string(i) +
                             " has degree 0");
    f.clauses.push_back(Clause{cn.lits});
  }
  return f;
}

GraphView derive_view(const CnfFormula &f, ViewKind kind) {
  GraphView view;
  view.kind = kind;
  std::set<std::pair<int, int>> es;
  auto add = [&es](int a, int b) {
    if (a == b)
      return;
    es.emplace(std::min(a, b), std::max(a, b));
  };

  int n = f.num_vars;
  int m = f.num_clauses();
  switch (kind) {
  case ViewKind::VIG:
    view.num_nodes = n;
    for (const auto &cl : f.clauses) {
      for (size_t i = 0; i < cl.lits.size(); ++i)
        for (size_t j = i + 1; j < cl.lits.size(); ++j)
          add(std::abs(cl.lits[i]) - 1, std::abs(cl.lits[j]) - 1);
    }
    break;
  case ViewKind::LIG:
    view.num_nodes = 2 * n;
    for (const auto &cl : f.clauses) {
      for (size_t i = 0; i < cl.lits.size(); ++i)
        for (size_t j = i + 1; j < cl.lits.size(); ++j)
          add(lit_node(cl.lits[i]), lit_node(cl.lits[j]));
    }
    break;
  case ViewKind::VCG:
    view.num_nodes = n + m;
    for (int ci = 0; ci < m; ++ci)
      for (int l : f.clauses[ci].lits)
        add(std::abs(l) - 1, n + ci);
    break;
  case ViewKind::LCG:
    view.num_nodes = 2 * n + m;
    for (int ci = 0; ci < m; ++ci)
      for (int l : f.clauses[ci].lits)
        add(lit_node(l), 2 * n + ci);
    break;
  }
  view.edges.assign(es.begin(), es.end());
  return view;
}

namespace {

std::vector<NodeRef> neighbors(const EmbeddedGraph &g, NodeRef n) {
  std::vector<NodeRef> out;
  switch (n.kind) {
  case NodeKind::PosLit:
  case NodeKind::NegLit: {
    for (int c : g.lit_clauses[n.id])
      out.push_back({NodeKind::Clause, c});
    out.push_back({NodeKind::Community, g.cmty_of_lit_node(n.id)});
    break;
  }
  case NodeKind::Clause: {
    if (!g.is_alive(n.id))
      throw std::invalid_argument("two_hop: unknown or dead clause node");
    for (int l : g.clause_nodes[n.id].lits) {
      int ln = lit_node(l);
      out.push_back({ln % 2 ? NodeKind::NegLit : NodeKind::PosLit, ln});
    }
    break;
  }
  case NodeKind::Community: {
    if (n.id < 0 || n.id >= g.num_communities)
      throw std::invalid_argument("two_hop: unknown community node");
    for (int v : g.cmty_vars[n.id]) {
      out.push_back({NodeKind::PosLit, lit_node(v)});
      out.push_back({NodeKind::NegLit, lit_node(-v)});
    }
    break;
  }
  }
  return out;
}

} // namespace

std::vector<NodeRef> two_hop(const EmbeddedGraph &g, NodeRef node) {
  if ((node.kind == NodeKind::PosLit || node.kind == NodeKind::NegLit) &&
      (node.id < 0 || node.id >= 2 * g.num_vars))
    throw std::invalid_argument("two_hop: unknown literal node");
  std::set<NodeRef> seen;
  for (NodeRef mid : neighbors(g, node))
    for (NodeRef dst : neighbors(g, mid))
      seen.insert(dst);
  seen.erase(node);
  return {seen.begin(), seen.end()};
}

void merge_clause_nodes(EmbeddedGraph &g, int u, int v) {
  if (u == v)
    throw std::invalid_argument("merge: u and v are the same node");
  if (!g.is_alive(u) || !g.is_alive(v))
    throw std::invalid_argument("merge: dead or unknown clause node");
  if (g.clause_nodes[u].core || g.clause_nodes[v].core)
    throw std::invalid_argument("merge: core clause nodes cannot be merged");
  if (!g.disjoint_vars(u, v))
    throw std::invalid_argument("merge: clauses share a variable");

  auto &cu = g.clause_nodes[u];
  auto &cv = g.clause_nodes[v];
  for (int l : cv.lits) {
    g.detach(v, l);
    cu.lits.push_back(l);
    g.attach(u, l);
  }
  std::sort(cu.lits.begin(), cu.lits.end());
  cv.lits.clear();
  cv.alive = false;
  --g.alive_clauses_;
}

std::string dump_graph(const EmbeddedGraph &g) {
  std::ostringstream out;
  for (int i = 0; i < static_cast<int>(g.clause_nodes.size()); ++i) {
    if (!g.clause_nodes[i].alive)
      continue;
    for (int l : g.clause_nodes[i].lits)
      out << 'L' << lit_node(l) << " C" << i << '\n';
  }
  for (int c = 0; c < g.num_communities; ++c)
    for (int v : g.cmty_vars[c])
      out << 'M' << c << " L" << lit_node(v) << '\n'
          << 'M' << c << " L" << lit_node(-v) << '\n';
  return out.str();
}

void write_community_file(const std::vector<int> &cmty_of_var,
                          const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  for (size_t v = 1; v < cmty_of_var.size(); ++v)
    out << v << ' ' << cmty_of_var[v] << '\n';
}

std::vector<int> read_community_file(const std::string &path, int num_vars) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::vector<int> cmty(num_vars + 1, -1);
  long var, c;
  while (in >> var >> c) {
    if (var < 1 || var > num_vars)
      throw std::runtime_error(path + ": variable id " + std::to_string(var) +
                               " out of range");
    cmty[var] = static_cast<int>(c);
  }
  for (int v = 1; v <= num_vars; ++v)
    if (cmty[v] < 0)
      throw std::runtime_error(path + ": variable " + std::to_string(v) +
                               " has no community");
  return cmty;
}

} // namespace hsg
