#include "hsg/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hsg {

EmbeddedGraph scramble_core(const EmbeddedGraph &g, const ScramblePolicy &pol,
                            ScrambleMap *map_out, bool whole_formula) {
  for (double p : {pol.p1, pol.p2, pol.p3})
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("scramble probabilities must be in [0,1]");

  std::vector<int> eligible_clauses;
  for (int id : g.alive_clause_ids())
    if (whole_formula || g.clause_nodes[id].core)
      eligible_clauses.push_back(id);
  std::set<int> var_set;
  for (int id : eligible_clauses)
    for (int l : g.clause_nodes[id].lits)
      var_set.insert(std::abs(l));
  std::vector<int> eligible_vars(var_set.begin(), var_set.end());

  Rng rng(pol.seed);
  ScrambleMap map;
  map.var_perm.resize(g.num_vars + 1);
  for (int v = 0; v <= g.num_vars; ++v)
    map.var_perm[v] = v;
  map.flip.assign(g.num_vars + 1, 0);
  map.clause_perm.resize(g.clause_nodes.size());
  for (size_t c = 0; c < g.clause_nodes.size(); ++c)
    map.clause_perm[c] = static_cast<int>(c);

  // Variable pass: exchange with a distinct eligible variable with prob p1.
  if (eligible_vars.size() > 1) {
    for (size_t i = 0; i < eligible_vars.size(); ++i) {
      if (!rng.coin(pol.p1))
        continue;
      size_t j = rng.index(eligible_vars.size() - 1);
      if (j >= i)
        ++j;
      std::swap(map.var_perm[eligible_vars[i]],
                map.var_perm[eligible_vars[j]]);
    }
  }
  // Clause pass, same scheme.
  if (eligible_clauses.size() > 1) {
    for (size_t i = 0; i < eligible_clauses.size(); ++i) {
      if (!rng.coin(pol.p2))
        continue;
      size_t j = rng.index(eligible_clauses.size() - 1);
      if (j >= i)
        ++j;
      std::swap(map.clause_perm[eligible_clauses[i]],
                map.clause_perm[eligible_clauses[j]]);
    }
  }
  // Polarity pass over the renamed ids of the eligible variables.
  for (int v : eligible_vars)
    if (rng.coin(pol.p3))
      map.flip[map.var_perm[v]] = 1;

  auto relabel = [&map](int lit) {
    int v = std::abs(lit);
    int nv = map.var_perm[v];
    bool neg = (lit < 0) != (map.flip[nv] != 0);
    return neg ? -nv : nv;
  };

  EmbeddedGraph out;
  out.num_vars = g.num_vars;
  out.num_communities = g.num_communities;
  out.lit_clauses.assign(2 * g.num_vars, {});
  out.cmty_of_var.assign(g.num_vars + 1, -1);
  out.cmty_vars.assign(g.num_communities, {});
  // Community affiliation follows the renaming, keeping the embedded graph
  // isomorphic to the input.
  for (int v = 1; v <= g.num_vars; ++v)
    out.cmty_of_var[map.var_perm[v]] = g.cmty_of_var[v];
  for (int v = 1; v <= g.num_vars; ++v)
    out.cmty_vars[out.cmty_of_var[v]].push_back(v);

  // Clause nodes: position new content per clause_perm, relabel literals.
  std::vector<EmbeddedGraph::ClauseNode> nodes(g.clause_nodes.size());
  for (size_t c = 0; c < g.clause_nodes.size(); ++c) {
    const auto &src = g.clause_nodes[c];
    auto &dst = nodes[map.clause_perm[c]];
    dst.alive = src.alive;
    dst.core = src.core;
    dst.lits.clear();
    for (int l : src.lits)
      dst.lits.push_back(relabel(l));
  }
  out.assign_clause_nodes(std::move(nodes));

  if (map_out)
    *map_out = map;
  return out;
}

std::vector<std::pair<int, int>> propose_pairs(const EmbeddedGraph &g,
                                               SplitStage stage, int k,
                                               Rng &rng) {
  std::vector<int> pool;
  for (int id : g.alive_clause_ids())
    if (!g.clause_nodes[id].core)
      pool.push_back(id);

  auto stage_ok = [&](int u, int v) {
    // Shared community for in-community pairs, fully disjoint community
    // sets for cross-community pairs.
    std::vector<int> cu = g.clause_communities(u);
    std::vector<int> cv = g.clause_communities(v);
    bool shared = false;
    for (int c : cu)
      if (std::binary_search(cv.begin(), cv.end(), c)) {
        shared = true;
        break;
      }
    return stage == SplitStage::in_cmty ? shared : !shared;
  };
  auto valid = [&](int u, int v) {
    return u != v && g.disjoint_vars(u, v) && stage_ok(u, v);
  };

  std::vector<std::pair<int, int>> found;
  if (pool.size() < 2)
    return found;
  std::set<std::pair<int, int>> seen;

  long attempts = 40L * std::max(k, 1);
  for (long a = 0; a < attempts && static_cast<int>(found.size()) < k; ++a) {
    int u = pool[rng.index(pool.size())];
    int v = pool[rng.index(pool.size())];
    if (u == v)
      continue;
    auto key = std::minmax(u, v);
    if (seen.count({key.first, key.second}))
      continue;
    if (!valid(u, v))
      continue;
    seen.insert({key.first, key.second});
    found.push_back({key.first, key.second});
  }
  if (!found.empty())
    return found;

  // Rejection found nothing: enumerate to distinguish a sparse pool from an
  // exhausted phase.
  std::vector<std::pair<int, int>> all;
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = i + 1; j < pool.size(); ++j)
      if (valid(pool[i], pool[j]))
        all.push_back({pool[i], pool[j]});
  rng.shuffle(all);
  if (static_cast<int>(all.size()) > k)
    all.resize(k);
  return all;
}

std::optional<MergeChoice> merge_step(EmbeddedGraph &g,
                                      const PairScorer &scorer,
                                      SplitStage stage, const GenConfig &cfg,
                                      Rng &rng) {
  std::vector<std::pair<int, int>> cand =
      propose_pairs(g, stage, cfg.candidates, rng);
  if (cand.empty())
    return std::nullopt;

  GnnGraph gg = make_gnn_graph(g);
  Matrix h = scorer_forward(scorer, gg);
  std::vector<double> scores(cand.size());
  for (size_t i = 0; i < cand.size(); ++i)
    scores[i] = pair_score(h, gg.clause_row[cand[i].first],
                           gg.clause_row[cand[i].second]);

  size_t pick = 0;
  if (cfg.selection == Selection::argmax) {
    for (size_t i = 1; i < cand.size(); ++i) {
      if (scores[i] > scores[pick] ||
          (scores[i] == scores[pick] && cand[i] < cand[pick]))
        pick = i;
    }
  } else {
    double total = 0.0;
    for (double s : scores)
      total += s;
    double r = rng.real01() * total;
    double acc = 0.0;
    for (size_t i = 0; i < cand.size(); ++i) {
      acc += scores[i];
      if (r < acc || i + 1 == cand.size()) {
        pick = i;
        break;
      }
    }
  }

  auto [u, v] = cand[pick];
  merge_clause_nodes(g, u, v);
  return MergeChoice{u, v, scores[pick], static_cast<int>(cand.size())};
}

GenResult generate(const EmbeddedGraph &templ, int m1, int m2,
                   const PairScorer &in_scorer, const PairScorer &cross_scorer,
                   const ScramblePolicy &policy, const GenConfig &cfg) {
  if (m1 < 0 || m2 < 0)
    throw std::invalid_argument("generate: negative step counts");
  if (in_scorer.backbone != cross_scorer.backbone ||
      in_scorer.dim() != cross_scorer.dim() ||
      in_scorer.num_layers() != cross_scorer.num_layers())
    throw std::invalid_argument("generate: scorer pair mismatch");
  if (cfg.alpha <= 0.0)
    throw std::invalid_argument("generate: alpha must be positive");

  GenResult r;
  EmbeddedGraph g =
      scramble_core(templ, policy, &r.scramble, cfg.whole_formula_scramble);

  r.k_origin.num_vars = g.num_vars;
  for (int id : g.alive_clause_ids())
    if (g.clause_nodes[id].core)
      r.k_origin.clauses.push_back(Clause{g.clause_nodes[id].lits});

  // Round-half-up on alpha*m2; the residual lands on n1 so the merge budget
  // m1 + m2 is conserved.
  long n2 = static_cast<long>(std::floor(cfg.alpha * double(m2) + 0.5));
  n2 = std::clamp(n2, 0L, static_cast<long>(m1 + m2));
  long n1 = static_cast<long>(m1 + m2) - n2;
  r.n1_planned = static_cast<int>(n1);
  r.n2_planned = static_cast<int>(n2);

  Rng rng(cfg.seed);
  int step = 0;
  for (long i = 0; i < n1; ++i) {
    auto choice = merge_step(g, in_scorer, SplitStage::in_cmty, cfg, rng);
    if (!choice)
      break; // in-community pool exhausted
    r.log.push_back({++step, SplitStage::in_cmty, choice->u, choice->v,
                     choice->score, choice->candidates});
    ++r.n1_done;
  }
  for (long i = 0; i < n2; ++i) {
    auto choice = merge_step(g, cross_scorer, SplitStage::cross_cmty, cfg, rng);
    if (!choice)
      break; // cross-community pool exhausted
    r.log.push_back({++step, SplitStage::cross_cmty, choice->u, choice->v,
                     choice->score, choice->candidates});
    ++r.n2_done;
  }

  r.formula = to_formula(g);
  return r;
}

std::string gen_log_jsonl(const GenResult &r) {
  std::ostringstream out;
  char buf[160];
  for (const auto &e : r.log) {
    std::snprintf(buf, sizeof buf,
                  "{\"step\":%d,\"stage\":\"%s\",\"u\":%d,\"v\":%d,"
                  "\"score\":%.9g,\"candidates\":%d}\n",
                  e.step, e.stage == SplitStage::in_cmty ? "in" : "cross", e.u,
                  e.v, e.score, e.candidates);
    out << buf;
  }
  return out.str();
}

} // namespace hsg
