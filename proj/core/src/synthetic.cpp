#include "hsg/synthetic.hpp"

#include <algorithm>
#include <stdexcept>

#include "hsg/rng.hpp"

namespace hsg {

CnfFormula make_pigeonhole(int pigeons, int holes) {
  CnfFormula f;
  f.num_vars = pigeons * holes;
  auto var = [holes](int p, int h) { return p * holes + h + 1; };
  for (int p = 0; p < pigeons; ++p) {
    Clause c;
    for (int h = 0; h < holes; ++h)
      c.lits.push_back(var(p, h));
    f.clauses.push_back(std::move(c));
  }
  for (int h = 0; h < holes; ++h)
    for (int p1 = 0; p1 < pigeons; ++p1)
      for (int p2 = p1 + 1; p2 < pigeons; ++p2)
        f.clauses.push_back(Clause{-var(p1, h), -var(p2, h)});
  return f;
}

namespace {

Clause random_clause(Rng &rng, const std::vector<int> &vars, int size) {
  std::vector<int> pool = vars;
  rng.shuffle(pool);
  Clause c;
  int k = std::min<int>(size, static_cast<int>(pool.size()));
  for (int i = 0; i < k; ++i)
    c.lits.push_back(rng.coin(0.5) ? pool[i] : -pool[i]);
  return c;
}

} // namespace

SyntheticFormula make_community_formula(const SyntheticSpec &spec) {
  if (spec.communities < 1 || spec.vars_per_community < 2)
    throw std::invalid_argument("make_community_formula: degenerate spec");
  Rng rng(spec.seed);
  SyntheticFormula out;

  std::vector<std::vector<int>> members(spec.communities);
  int next_var = 1;
  for (int c = 0; c < spec.communities; ++c)
    for (int i = 0; i < spec.vars_per_community; ++i)
      members[c].push_back(next_var++);

  CnfFormula &f = out.formula;
  for (int c = 0; c < spec.communities; ++c)
    for (int i = 0; i < spec.clauses_per_community; ++i)
      f.clauses.push_back(random_clause(rng, members[c], spec.clause_size));

  for (int i = 0; spec.communities > 1 && i < spec.cross_clauses; ++i) {
    int c1 = static_cast<int>(rng.index(spec.communities));
    int c2 = static_cast<int>(rng.index(spec.communities - 1));
    if (c2 >= c1)
      ++c2;
    int v1 = members[c1][rng.index(members[c1].size())];
    int v2 = members[c2][rng.index(members[c2].size())];
    Clause cl;
    cl.lits.push_back(rng.coin(0.5) ? v1 : -v1);
    cl.lits.push_back(rng.coin(0.5) ? v2 : -v2);
    f.clauses.push_back(std::move(cl));
  }

  int core_cmty = -1;
  if (spec.plant_core) {
    CnfFormula php = make_pigeonhole(3, 2);
    int base = next_var - 1;
    next_var += php.num_vars;
    core_cmty = spec.communities;
    int first_core_clause = f.num_clauses();
    for (const auto &cl : php.clauses) {
      Clause shifted;
      for (int l : cl.lits)
        shifted.lits.push_back(l > 0 ? l + base : l - base);
      f.clauses.push_back(std::move(shifted));
    }
    for (int i = first_core_clause; i < f.num_clauses(); ++i)
      out.core.clause_indices.push_back(i);
    out.core.source = CoreSource::file;
  }

  f.num_vars = next_var - 1;
  out.cmty_of_var.assign(f.num_vars + 1, -1);
  for (int c = 0; c < spec.communities; ++c)
    for (int v : members[c])
      out.cmty_of_var[v] = c;
  if (spec.plant_core)
    for (int v = spec.communities * spec.vars_per_community + 1;
         v <= f.num_vars; ++v)
      out.cmty_of_var[v] = core_cmty;
  return out;
}

CnfFormula random_formula(uint64_t seed, int num_vars, int num_clauses,
                          int max_clause_size) {
  Rng rng(seed);
  CnfFormula f;
  f.num_vars = num_vars;
  std::vector<int> vars(num_vars);
  for (int v = 1; v <= num_vars; ++v)
    vars[v - 1] = v;
  for (int i = 0; i < num_clauses; ++i) {
    int size = 1 + static_cast<int>(rng.index(max_clause_size));
    f.clauses.push_back(random_clause(rng, vars, size));
  }
  return f;
}

CnfFormula random_unsat_formula(uint64_t seed, int num_vars) {
  for (uint64_t attempt = 0;; ++attempt) {
    Rng rng(seed + attempt * 0x9e3779b97f4a7c15ULL);
    CnfFormula f =
        random_formula(rng.next_u64(), num_vars, 7 * num_vars, 3);
    if (!brute_force_sat(f, num_vars).satisfiable)
      return f;
  }
}

} // namespace hsg
