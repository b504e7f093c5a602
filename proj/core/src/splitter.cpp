#include "hsg/splitter.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hsg {

int SplitTrace::m1() const {
  int n = 0;
  for (const auto &e : events)
    n += e.stage == SplitStage::in_cmty;
  return n;
}

int SplitTrace::m2() const {
  int n = 0;
  for (const auto &e : events)
    n += e.stage == SplitStage::cross_cmty;
  return n;
}

namespace {

// Pool of candidate clause ids whose eligibility never returns once lost:
// stale entries are swap-removed on draw.
class ShrinkingPool {
public:
  explicit ShrinkingPool(std::vector<int> ids) : ids_(std::move(ids)) {}

  template <typename Eligible>
  std::optional<int> draw(Rng &rng, Eligible &&eligible) {
    while (!ids_.empty()) {
      size_t k = rng.index(ids_.size());
      int id = ids_[k];
      if (eligible(id))
        return id;
      ids_[k] = ids_.back();
      ids_.pop_back();
    }
    return std::nullopt;
  }

  void push(int id) { ids_.push_back(id); }

private:
  std::vector<int> ids_;
};

std::vector<int> noncore_ids(const EmbeddedGraph &g) {
  std::vector<int> ids;
  for (int id : g.alive_clause_ids())
    if (!g.clause_nodes[id].core)
      ids.push_back(id);
  return ids;
}

} // namespace

std::vector<SplitEvent> split_cross_community(EmbeddedGraph &g, Rng &rng) {
  std::vector<SplitEvent> events;
  ShrinkingPool pool(noncore_ids(g));
  auto multi_cmty = [&g](int id) {
    return g.clause_communities(id).size() > 1;
  };
  while (auto picked = pool.draw(rng, multi_cmty)) {
    int parent = *picked;
    std::vector<int> cs = g.clause_communities(parent);
    int target = cs[rng.index(cs.size())];
    std::vector<int> moved;
    for (int l : g.clause_nodes[parent].lits)
      if (g.cmty_of_var[std::abs(l)] == target)
        moved.push_back(l);
    int child = g.detach_to_new_node(parent, moved);
    events.push_back({SplitStage::cross_cmty, parent, child, moved});
    // The child is single-community by construction; the parent may still
    // span several and stays in the pool.
    pool.push(parent);
  }
  return events;
}

std::vector<SplitEvent> split_in_community(EmbeddedGraph &g, Rng &rng) {
  std::vector<SplitEvent> events;
  ShrinkingPool pool(noncore_ids(g));
  auto splittable = [&g](int id) { return g.clause_degree(id) > 1; };
  while (auto picked = pool.draw(rng, splittable)) {
    int parent = *picked;
    const auto &lits = g.clause_nodes[parent].lits;
    int moved = lits[rng.index(lits.size())];
    int child = g.detach_to_new_node(parent, {moved});
    events.push_back({SplitStage::in_cmty, parent, child, {moved}});
    pool.push(parent);
  }
  return events;
}

std::optional<int> sample_negative(const EmbeddedGraph &g, int u_pos,
                                   int v_pos, SplitStage stage, Rng &rng) {
  // The anchor community: for in-community splits both nodes live in it; for
  // cross-community splits it is the community detached onto v_pos.
  if (g.clause_degree(v_pos) == 0)
    throw std::invalid_argument("sample_negative: empty v_pos");
  int c = g.cmty_of_var[std::abs(g.clause_nodes[v_pos].lits.front())];

  std::vector<int> pool;
  if (stage == SplitStage::in_cmty) {
    for (int id : g.clauses_of_community(c))
      if (id != u_pos && id != v_pos)
        pool.push_back(id);
  } else {
    std::vector<int> reach = g.clauses_of_community(c);
    for (int id : g.alive_clause_ids()) {
      if (id == u_pos || id == v_pos || g.clause_nodes[id].core)
        continue;
      if (!std::binary_search(reach.begin(), reach.end(), id))
        pool.push_back(id);
    }
  }
  if (pool.empty())
    return std::nullopt;
  return pool[rng.index(pool.size())];
}

TemplateBundle build_template(const CnfFormula &f, const std::vector<int> &cmty,
                              const CoreSet &core, uint64_t seed) {
  for (const auto &cl : f.clauses)
    if (cl.empty())
      throw std::invalid_argument(
          "build_template: formula contains an empty clause");

  TemplateBundle out;
  out.graph = build_embedded(f, cmty, core);
  out.trace.core_indices = core.clause_indices;
  Rng rng(seed);

  // Same loops as the standalone stage functions, with the negative drawn on
  // the graph state right after each event.
  {
    ShrinkingPool pool(noncore_ids(out.graph));
    auto multi_cmty = [&](int id) {
      return out.graph.clause_communities(id).size() > 1;
    };
    while (auto picked = pool.draw(rng, multi_cmty)) {
      int parent = *picked;
      std::vector<int> cs = out.graph.clause_communities(parent);
      int target = cs[rng.index(cs.size())];
      std::vector<int> moved;
      for (int l : out.graph.clause_nodes[parent].lits)
        if (out.graph.cmty_of_var[std::abs(l)] == target)
          moved.push_back(l);
      int child = out.graph.detach_to_new_node(parent, moved);
      out.trace.events.push_back(
          {SplitStage::cross_cmty, parent, child, moved});
      pool.push(parent);
      auto neg = sample_negative(out.graph, parent, child,
                                 SplitStage::cross_cmty, rng);
      if (neg)
        out.tuples.push_back({parent, child, *neg,
                              static_cast<int>(out.trace.events.size()),
                              SplitStage::cross_cmty});
      else
        ++out.dropped_tuples;
    }
  }
  {
    ShrinkingPool pool(noncore_ids(out.graph));
    auto splittable = [&](int id) { return out.graph.clause_degree(id) > 1; };
    while (auto picked = pool.draw(rng, splittable)) {
      int parent = *picked;
      const auto &lits = out.graph.clause_nodes[parent].lits;
      int moved = lits[rng.index(lits.size())];
      int child = out.graph.detach_to_new_node(parent, {moved});
      out.trace.events.push_back(
          {SplitStage::in_cmty, parent, child, {moved}});
      pool.push(parent);
      auto neg =
          sample_negative(out.graph, parent, child, SplitStage::in_cmty, rng);
      if (neg)
        out.tuples.push_back({parent, child, *neg,
                              static_cast<int>(out.trace.events.size()),
                              SplitStage::in_cmty});
      else
        ++out.dropped_tuples;
    }
  }
  return out;
}

EmbeddedGraph replay_forward(const EmbeddedGraph &source,
                             const SplitTrace &trace, size_t prefix) {
  if (prefix > trace.events.size())
    throw std::out_of_range("replay_forward: prefix beyond trace end");
  EmbeddedGraph g = source;
  for (size_t i = 0; i < prefix; ++i) {
    const SplitEvent &ev = trace.events[i];
    int child = g.detach_to_new_node(ev.parent, ev.moved_lits);
    if (child != ev.child)
      throw std::logic_error("replay_forward: child id mismatch, trace does "
                             "not match the source graph");
  }
  return g;
}

EmbeddedGraph replay_inverse(const EmbeddedGraph &templ,
                             const SplitTrace &trace) {
  EmbeddedGraph g = templ;
  for (auto it = trace.events.rbegin(); it != trace.events.rend(); ++it)
    merge_clause_nodes(g, it->parent, it->child);
  // The undone children occupy the id tail; drop them so the result matches
  // the pre-split graph exactly and forward replay re-creates the same ids.
  while (!g.clause_nodes.empty() && !g.clause_nodes.back().alive)
    g.clause_nodes.pop_back();
  return g;
}

// ---------------------------------------------------------------------------
// Trace file

static const char *stage_name(SplitStage s) {
  return s == SplitStage::cross_cmty ? "cross" : "in";
}

static SplitStage parse_stage(const std::string &s) {
  if (s == "cross")
    return SplitStage::cross_cmty;
  if (s == "in")
    return SplitStage::in_cmty;
  throw std::runtime_error("trace file: unknown stage '" + s + "'");
}

void write_trace_file(const SplitTrace &trace,
                      const std::vector<TrainTuple> &tuples,
                      const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << "HSG-TRACE 1\n";
  out << "core " << trace.core_indices.size();
  for (int i : trace.core_indices)
    out << ' ' << i;
  out << '\n';
  out << "events " << trace.events.size() << '\n';
  for (const auto &ev : trace.events) {
    out << stage_name(ev.stage) << ' ' << ev.parent << ' ' << ev.child << ' ';
    for (size_t i = 0; i < ev.moved_lits.size(); ++i)
      out << (i ? "," : "") << ev.moved_lits[i];
    out << '\n';
  }
  out << "tuples " << tuples.size() << '\n';
  for (const auto &t : tuples)
    out << stage_name(t.stage) << ' ' << t.u_pos << ' ' << t.v_pos << ' '
        << t.v_neg << ' ' << t.snapshot << '\n';
}

TraceFile read_trace_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "HSG-TRACE 1")
    throw std::runtime_error(path + ": bad trace header '" + header + "'");

  TraceFile tf;
  std::string key;
  size_t n = 0;
  in >> key >> n;
  if (key != "core")
    throw std::runtime_error(path + ": expected 'core' section");
  tf.trace.core_indices.resize(n);
  for (auto &i : tf.trace.core_indices)
    in >> i;

  in >> key >> n;
  if (key != "events")
    throw std::runtime_error(path + ": expected 'events' section");
  tf.trace.events.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::string stage, lits;
    SplitEvent ev;
    in >> stage >> ev.parent >> ev.child >> lits;
    ev.stage = parse_stage(stage);
    std::istringstream ls(lits);
    std::string tok;
    while (std::getline(ls, tok, ','))
      ev.moved_lits.push_back(std::stoi(tok));
    if (ev.moved_lits.empty())
      throw std::runtime_error(path + ": event with no moved literals");
    tf.trace.events.push_back(std::move(ev));
  }

  in >> key >> n;
  if (key != "tuples")
    throw std::runtime_error(path + ": expected 'tuples' section");
  tf.tuples.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::string stage;
    TrainTuple t;
    in >> stage >> t.u_pos >> t.v_pos >> t.v_neg >> t.snapshot;
    t.stage = parse_stage(stage);
    tf.tuples.push_back(t);
  }
  if (!in)
    throw std::runtime_error(path + ": truncated trace file");
  return tf;
}

} // namespace hsg
