#include "hsg/postprocess.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hsg {

void HardnessThreshold::validate() const {
  if (!(min_solve_seconds > 0.0) || min_solve_seconds > timeout)
    throw std::invalid_argument(
        "threshold: need 0 < min_solve_seconds <= timeout");
  if (max_iterations < 1)
    throw std::invalid_argument("threshold: max_iterations must be >= 1");
}

namespace {

std::set<std::vector<int>> normalized_set(const std::vector<Clause> &cs) {
  std::set<std::vector<int>> s;
  for (const auto &c : cs)
    s.insert(c.normalized());
  return s;
}

// First file-order clause of f whose normalized form is in `targets`.
std::optional<int> first_match(const CnfFormula &f,
                               const std::set<std::vector<int>> &targets) {
  for (int i = 0; i < f.num_clauses(); ++i)
    if (targets.count(f.clauses[i].normalized()))
      return i;
  return std::nullopt;
}

CnfFormula append_fresh_var(const CnfFormula &f, int clause_index) {
  CnfFormula out = f;
  ++out.num_vars;
  out.clauses[clause_index].lits.push_back(out.num_vars);
  return out;
}

} // namespace

std::optional<CnfFormula>
loosen_step(const CnfFormula &f_prev, const std::vector<Clause> &k_origin,
            const std::vector<Clause> &detected_core) {
  std::set<std::vector<int>> origin = normalized_set(k_origin);
  std::set<std::vector<int>> diff;
  for (const auto &c : detected_core) {
    auto n = c.normalized();
    if (!origin.count(n))
      diff.insert(std::move(n));
  }
  if (diff.empty())
    return std::nullopt;
  auto idx = first_match(f_prev, diff);
  if (!idx)
    throw std::invalid_argument(
        "loosen_step: detected core clause not present in the formula");
  return append_fresh_var(f_prev, *idx);
}

PostprocessResult postprocess(const CnfFormula &f,
                              const std::vector<Clause> &k_origin,
                              const HardnessThreshold &threshold,
                              SolveTimeFn solve_time,
                              CoreFinderFn core_finder) {
  threshold.validate();
  PostprocessResult r;
  r.formula = f;
  for (int iter = 1; iter <= threshold.max_iterations; ++iter) {
    double secs = solve_time(r.formula);
    if (secs >= threshold.min_solve_seconds) {
      r.log.push_back({iter, secs, -1, "threshold_met"});
      r.hit_threshold = true;
      return r;
    }
    std::vector<Clause> core = core_finder(r.formula);
    auto next = loosen_step(r.formula, k_origin, core);
    if (!next) {
      r.log.push_back(
          {iter, secs, static_cast<int>(core.size()), "converged"});
      r.converged = true;
      return r;
    }
    r.formula = std::move(*next);
    r.log.push_back({iter, secs, static_cast<int>(core.size()), "loosened"});
  }
  r.aborted = true;
  r.log.push_back({threshold.max_iterations + 1, 0.0, -1, "max_iterations"});
  return r;
}

CnfFormula flip_to_sat(const CnfFormula &f, const std::vector<Clause> &k_origin,
                       int var_limit) {
  if (k_origin.empty())
    throw std::invalid_argument("flip_to_sat: empty origin core");
  std::set<std::vector<int>> origin = normalized_set(k_origin);
  if (!first_match(f, origin))
    throw std::invalid_argument("flip_to_sat: origin core not present");

  CnfFormula cur = f;
  while (true) {
    if (brute_force_sat(cur, var_limit).satisfiable)
      return cur;
    auto idx = first_match(cur, origin);
    if (!idx)
      throw std::runtime_error(
          "flip_to_sat: origin core fully loosened but formula is still "
          "unsatisfiable");
    // Once loosened the clause no longer matches the origin set.
    cur = append_fresh_var(cur, *idx);
  }
}

std::string postprocess_log_csv(const PostprocessResult &r) {
  std::ostringstream out;
  out << "iter,solve_seconds,core_size,action\n";
  char buf[120];
  for (const auto &it : r.log) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%d,%s\n", it.iter,
                  it.solve_seconds, it.core_size, it.action.c_str());
    out << buf;
  }
  return out.str();
}

} // namespace hsg
