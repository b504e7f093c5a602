#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsg/cnf.hpp"

namespace hsg {

/// External solver adapter. `args` may hold the placeholders {instance},
/// {proof} and {core}; tuning parameters land in extra_args.
struct SolverSpec {
  std::string name;
  std::string exe;
  std::vector<std::string> args;
  std::vector<std::string> extra_args;
  int sat_exit = 10;
  int unsat_exit = 20;

  /// Registration check: the executable exists and is runnable.
  void validate() const;
};

enum class RunStatus { SAT, UNSAT, TIMEOUT, ERROR };

const char *run_status_name(RunStatus s);

struct RunRecord {
  std::string solver;
  std::string instance;
  RunStatus status = RunStatus::ERROR;
  double cpu_seconds = 0.0;
  double wall_seconds = 0.0;
  double limit_seconds = 0.0;
  std::string stderr_tail;
};

/// Spawns the solver on the instance with a CPU-seconds budget (plus a wall
/// backstop for sleepers), kills the whole process group on overrun, and
/// accounts CPU via wait4 rusage. TIMEOUT records cpu_seconds = limit.
RunRecord run_solver(const SolverSpec &spec, const std::string &instance_path,
                     double limit_seconds);

/// Bounded worker pool, one solver process per worker at a time. Records are
/// returned sorted by (instance, solver).
std::vector<RunRecord> run_corpus(std::span<const SolverSpec> solvers,
                                  std::span<const std::string> instances,
                                  double limit_seconds, int workers);

struct CoreDetectResult {
  CoreSet core; // indices into the instance formula
  CnfFormula core_clauses;
  std::string core_path;
};

/// Proof-then-check pipeline: the solver writes a proof for the UNSAT
/// instance, the checker reduces it to a core CNF, and the core clauses are
/// matched back to instance clause indices by normalized literal multiset.
CoreDetectResult detect_core_external(const std::string &instance_path,
                                      const CnfFormula &instance,
                                      const SolverSpec &solver,
                                      const SolverSpec &checker,
                                      const std::string &workdir);

struct InstanceRanking {
  std::string instance;
  std::vector<std::string> ranking; // best solver first
  bool had_tie = false;
};

struct RankReport {
  std::vector<InstanceRanking> per_instance;
  std::vector<std::pair<std::string, double>> average_rank; // sorted
  std::optional<double> accuracy; // fraction exactly matching the reference
  int instances_with_ties = 0;
};

/// Ranks solvers per instance by ascending cpu_seconds (TIMEOUT counts as
/// the limit, name breaks ties) and scores exact recovery of `reference`.
RankReport rank_solvers(std::span<const RunRecord> records,
                        const std::vector<std::string> &reference);

struct TuneGrid {
  std::vector<std::string> param_names;
  std::vector<std::vector<std::string>> values; // one list per parameter
  std::string arg_format = "-{name}={value}";

  long combinations() const;
};

struct TuneResult {
  std::vector<std::pair<std::string, std::string>> best_params;
  double t_generated = 0.0; // mean cpu on the generated corpus, best params
  double t_test = 0.0;      // mean cpu on the test corpus, best params
  double t_default = 0.0;   // mean cpu on the test corpus, default params
  double gain = 0.0;        // (t_default - t_test) / t_default
  long evaluations = 0;
  std::vector<std::pair<std::vector<std::string>, double>> grid_objective;
};

/// Exhaustive grid search: every combination evaluated exactly once on the
/// generated corpus (mean cpu, TIMEOUT counted as the limit), minimizer
/// re-evaluated on the test corpus against the solver defaults.
TuneResult tune_grid(const SolverSpec &solver, const TuneGrid &grid,
                     std::span<const std::string> generated_corpus,
                     std::span<const std::string> test_corpus,
                     double limit_seconds, int workers = 1);

/// "instance,solver,status,cpu_s,wall_s,limit_s" rows.
std::string records_csv(std::span<const RunRecord> records);
std::string tune_report_csv(const TuneResult &r);

} // namespace hsg
