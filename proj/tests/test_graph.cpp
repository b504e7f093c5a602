#include <doctest.h>

#include <set>

#include "hsg/graph.hpp"
#include "hsg/synthetic.hpp"
#include "oracles.hpp"

using namespace hsg;

namespace {

std::vector<int> uniform_cmty(int num_vars, int c = 0) {
  return std::vector<int>(num_vars + 1, c);
}

size_t occ_edge_count(const EmbeddedGraph &g) {
  size_t n = 0;
  for (int id : g.alive_clause_ids())
    n += g.clause_nodes[id].lits.size();
  return n;
}

std::multiset<std::vector<int>> clause_multiset(const CnfFormula &f) {
  std::multiset<std::vector<int>> s;
  for (const auto &c : f.clauses)
    s.insert(c.normalized());
  return s;
}

} // namespace

TEST_CASE("build_embedded: node and edge counts") {
  CnfFormula f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n");
  EmbeddedGraph g = build_embedded(f, uniform_cmty(2), {});
  CHECK(g.num_vars == 2);              // 4 literal nodes
  CHECK(g.alive_clause_count() == 2);
  CHECK(g.num_communities == 1);
  CHECK(occ_edge_count(g) == 3);
  size_t aff = 0;
  for (int c = 0; c < g.num_communities; ++c)
    aff += 2 * g.cmty_vars[c].size();
  CHECK(aff == 4);
  for (int id : g.alive_clause_ids())
    CHECK_FALSE(g.clause_nodes[id].core);
  g.validate();
}

TEST_CASE("build_embedded: errors") {
  CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n");
  std::vector<int> partial(2, 0); // too short to cover var 2
  CHECK_THROWS(build_embedded(f, partial, {}));
  CHECK_THROWS(build_embedded(f, uniform_cmty(2), CoreSet{{5}, CoreSource::file}));
}

TEST_CASE("to_formula inverts build_embedded") {
  CnfFormula f = parse_dimacs("p cnf 1 1\n1 0\n");
  EmbeddedGraph g = build_embedded(f, uniform_cmty(1), {});
  CHECK(to_formula(g).clauses[0].lits == std::vector<int>{1});

  for (uint64_t seed = 0; seed < 200; ++seed) {
    CnfFormula r = random_formula(seed, 2 + seed % 12, 1 + seed % 25, 4);
    EmbeddedGraph gr = build_embedded(r, uniform_cmty(r.num_vars), {});
    CHECK(clause_multiset(to_formula(gr)) == clause_multiset(r));
  }
}

TEST_CASE("to_formula rejects degree-0 clause nodes") {
  CnfFormula f = parse_dimacs("p cnf 1 1\n1 0\n");
  EmbeddedGraph g = build_embedded(f, uniform_cmty(1), {});
  g.add_clause_node({}, false);
  CHECK_THROWS(to_formula(g));
}

TEST_CASE("derive_view: VIG basics") {
  CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n");
  GraphView vig = derive_view(f, ViewKind::VIG);
  REQUIRE(vig.edges.size() == 1);
  CHECK(vig.edges[0] == std::pair{0, 1});

  // no self-loop from a tautological clause
  ParseWarnings w;
  CnfFormula t = parse_dimacs("p cnf 1 1\n1 -1 0\n", &w);
  CHECK(derive_view(t, ViewKind::VIG).edges.empty());
  CHECK(derive_view(t, ViewKind::LIG).edges.size() == 1); // two literal nodes
}

TEST_CASE("derive_view: VIG matches pairwise-scan oracle on random 3-CNF") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    CnfFormula f = random_formula(seed + 99, 10, 30, 3);
    GraphView vig = derive_view(f, ViewKind::VIG);
    CHECK(vig.edges.size() == oracle::vig_edge_count_direct(f));
  }
}

TEST_CASE("derive_view: bipartite views") {
  CnfFormula f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n");
  GraphView vcg = derive_view(f, ViewKind::VCG);
  CHECK(vcg.num_nodes == 4);
  CHECK(vcg.edges.size() == 3);
  GraphView lcg = derive_view(f, ViewKind::LCG);
  CHECK(lcg.num_nodes == 6);
  CHECK(lcg.edges.size() == 3);
  for (auto [u, v] : lcg.edges)
    CHECK(((u < 4) != (v < 4))); // literal on one side, clause on the other
}

TEST_CASE("two_hop: clause to community and clause to clause") {
  CnfFormula f = parse_dimacs("p cnf 2 2\n1 0\n1 2 0\n");
  std::vector<int> cmty{-1, 0, 1};
  EmbeddedGraph g = build_embedded(f, cmty, {});
  auto hops = two_hop(g, {NodeKind::Clause, 0});
  CHECK(std::find(hops.begin(), hops.end(), NodeRef{NodeKind::Community, 0}) !=
        hops.end());
  CHECK(std::find(hops.begin(), hops.end(), NodeRef{NodeKind::Clause, 1}) !=
        hops.end());
  auto hops1 = two_hop(g, {NodeKind::Clause, 1});
  CHECK(std::find(hops1.begin(), hops1.end(), NodeRef{NodeKind::Clause, 0}) !=
        hops1.end());
  CHECK_THROWS(two_hop(g, {NodeKind::Clause, 99}));
}

TEST_CASE("two_hop matches the adjacency-squaring oracle") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.plant_core = false;
    SyntheticFormula sf = make_community_formula(spec);
    EmbeddedGraph g = build_embedded(sf.formula, sf.cmty_of_var, sf.core);
    std::vector<NodeRef> starts = {
        {NodeKind::Clause, int(seed) % g.alive_clause_count()},
        {NodeKind::Community, int(seed) % g.num_communities},
        {NodeKind::PosLit, int(2 * (seed % g.num_vars))},
    };
    for (NodeRef s : starts) {
      auto got = two_hop(g, s);
      auto want = oracle::two_hop_matrix(g, s);
      CHECK(std::set<NodeRef>(got.begin(), got.end()) == want);
    }
  }
}

TEST_CASE("merge_clause_nodes: basic merge and counting") {
  CnfFormula f = parse_dimacs("p cnf 2 2\n1 0\n2 0\n");
  EmbeddedGraph g = build_embedded(f, uniform_cmty(2), {});
  size_t occ_before = occ_edge_count(g);
  merge_clause_nodes(g, 0, 1);
  CHECK(g.alive_clause_count() == 1);
  CHECK(g.clause_nodes[0].lits == std::vector<int>{1, 2});
  CHECK_FALSE(g.clause_nodes[1].alive);
  CHECK(occ_edge_count(g) == occ_before); // occ edges conserved
  g.validate();
}

TEST_CASE("merge_clause_nodes: preconditions") {
  CnfFormula f = parse_dimacs("p cnf 2 4\n1 0\n-1 0\n2 0\n-2 0\n");
  EmbeddedGraph g =
      build_embedded(f, uniform_cmty(2), CoreSet{{0}, CoreSource::file});
  CHECK_THROWS(merge_clause_nodes(g, 0, 2)); // core participant
  CHECK_THROWS(merge_clause_nodes(g, 1, 1)); // same node
  CHECK_THROWS(merge_clause_nodes(g, 2, 3)); // overlapping variable
  merge_clause_nodes(g, 1, 2);               // (-1) and (2) are fine
  CHECK(g.clause_nodes[1].lits == std::vector<int>{-1, 2});
  CHECK_THROWS(merge_clause_nodes(g, 1, 2)); // v is dead now
}

TEST_CASE("merge equals clause-set union through to_formula") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    CnfFormula f = random_formula(seed + 7, 10, 8, 3);
    EmbeddedGraph g = build_embedded(f, uniform_cmty(10), {});
    auto ids = g.alive_clause_ids();
    // find a mergeable pair
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = i + 1; j < ids.size(); ++j) {
        if (!g.disjoint_vars(ids[i], ids[j]))
          continue;
        std::vector<int> expect;
        auto a = g.clause_nodes[ids[i]].lits, b = g.clause_nodes[ids[j]].lits;
        expect.insert(expect.end(), a.begin(), a.end());
        expect.insert(expect.end(), b.begin(), b.end());
        std::sort(expect.begin(), expect.end());
        merge_clause_nodes(g, ids[i], ids[j]);
        CHECK(g.clause_nodes[ids[i]].lits == expect);
        goto next_seed;
      }
  next_seed:;
  }
}

TEST_CASE("LCG view of to_formula matches the embedded occ structure") {
  SyntheticSpec spec;
  spec.seed = 3;
  SyntheticFormula sf = make_community_formula(spec);
  EmbeddedGraph g = build_embedded(sf.formula, sf.cmty_of_var, sf.core);
  CnfFormula f = to_formula(g);
  GraphView lcg = derive_view(f, ViewKind::LCG);
  CHECK(lcg.edges.size() == occ_edge_count(g));
}

TEST_CASE("community file round-trip") {
  std::vector<int> cmty{-1, 0, 0, 1, 2};
  std::string path = "/tmp/hsg_test_cmty.txt";
  write_community_file(cmty, path);
  CHECK(read_community_file(path, 4) == cmty);
}

TEST_CASE("graph dump has one line per edge with type prefixes") {
  CnfFormula f = parse_dimacs("p cnf 1 1\n1 0\n");
  EmbeddedGraph g = build_embedded(f, uniform_cmty(1), {});
  std::string dump = dump_graph(g);
  CHECK(dump.find("L0 C0") != std::string::npos);
  CHECK(dump.find("M0 L0") != std::string::npos);
  CHECK(dump.find("M0 L1") != std::string::npos);
}
