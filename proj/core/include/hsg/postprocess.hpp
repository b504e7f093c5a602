#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsg/cnf.hpp"

namespace hsg {

struct HardnessThreshold {
  double min_solve_seconds = 0.0;
  std::string solver;
  double timeout = 0.0;
  int max_iterations = 1;

  void validate() const;
};

/// Measured solve seconds for a formula (wired to the harness or a stub).
using SolveTimeFn = std::function<double(const CnfFormula &)>;
/// Detected unsatisfiable core as clauses.
using CoreFinderFn = std::function<std::vector<Clause>(const CnfFormula &)>;

/// Appends one fresh positive literal to the first (file-order) clause of
/// detected_core \ k_origin and bumps num_vars. nullopt when the difference
/// is empty (detected core inside the origin: converged, no step taken).
std::optional<CnfFormula> loosen_step(const CnfFormula &f_prev,
                                      const std::vector<Clause> &k_origin,
                                      const std::vector<Clause> &detected_core);

struct PostprocessIter {
  int iter;
  double solve_seconds;
  int core_size; // -1 when no detection ran
  std::string action;
};

struct PostprocessResult {
  CnfFormula formula;
  std::vector<PostprocessIter> log;
  bool hit_threshold = false;
  bool converged = false; // detected core subsumed by the origin
  bool aborted = false;   // max_iterations exhausted
};

/// Measure, loosen, repeat until the hardness threshold is met, the core
/// detector converges onto the origin, or max_iterations runs out.
PostprocessResult postprocess(const CnfFormula &f,
                              const std::vector<Clause> &k_origin,
                              const HardnessThreshold &threshold,
                              SolveTimeFn solve_time, CoreFinderFn core_finder);

/// Loosens clauses inside k_origin until the formula is satisfiable
/// (verified by the DPLL oracle). Already-satisfiable input is returned
/// unchanged.
CnfFormula flip_to_sat(const CnfFormula &f, const std::vector<Clause> &k_origin,
                       int var_limit = kDefaultOracleVarLimit);

/// "iter,solve_seconds,core_size,action" rows.
std::string postprocess_log_csv(const PostprocessResult &r);

} // namespace hsg
