#include "hsg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fcntl.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace hsg {

void SolverSpec::validate() const {
  if (access(exe.c_str(), X_OK) != 0)
    throw std::invalid_argument("solver '" + name + "': executable " + exe +
                                " is not runnable");
}

const char *run_status_name(RunStatus s) {
  switch (s) {
  case RunStatus::SAT:
    return "SAT";
  case RunStatus::UNSAT:
    return "UNSAT";
  case RunStatus::TIMEOUT:
    return "TIMEOUT";
  case RunStatus::ERROR:
    return "ERROR";
  }
  return "ERROR";
}

namespace {

std::string substitute(std::string s, const std::string &key,
                       const std::string &value) {
  size_t pos;
  while ((pos = s.find(key)) != std::string::npos)
    s.replace(pos, key.size(), value);
  return s;
}

std::vector<std::string> render_args(const SolverSpec &spec,
                                     const std::string &instance,
                                     const std::string &proof = "",
                                     const std::string &core = "") {
  std::vector<std::string> out;
  for (const auto &a : spec.args) {
    std::string r = substitute(a, "{instance}", instance);
    r = substitute(r, "{proof}", proof);
    r = substitute(r, "{core}", core);
    out.push_back(std::move(r));
  }
  for (const auto &a : spec.extra_args)
    out.push_back(a);
  return out;
}

// utime + stime of a live process, in seconds; nullopt once it is gone.
std::optional<double> proc_cpu_seconds(pid_t pid) {
  char path[64];
  std::snprintf(path, sizeof path, "/proc/%d/stat", pid);
  std::ifstream in(path);
  if (!in)
    return std::nullopt;
  std::string content;
  std::getline(in, content);
  // Skip past the parenthesized command, which may contain spaces.
  size_t close = content.rfind(')');
  if (close == std::string::npos)
    return std::nullopt;
  std::istringstream rest(content.substr(close + 1));
  std::string tok;
  // Fields 3..13 precede utime(14), stime(15); we are positioned at field 3.
  long utime = 0, stime = 0;
  for (int field = 3; field <= 15 && rest >> tok; ++field) {
    if (field == 14)
      utime = std::stol(tok);
    if (field == 15)
      stime = std::stol(tok);
  }
  long ticks = sysconf(_SC_CLK_TCK);
  return double(utime + stime) / double(ticks);
}

} // namespace

RunRecord run_solver(const SolverSpec &spec, const std::string &instance_path,
                     double limit_seconds) {
  RunRecord rec;
  rec.solver = spec.name;
  rec.instance = instance_path;
  rec.limit_seconds = limit_seconds;

  if (access(instance_path.c_str(), R_OK) != 0) {
    rec.status = RunStatus::ERROR;
    rec.stderr_tail = "instance file not readable";
    return rec;
  }

  int errpipe[2];
  if (pipe(errpipe) != 0)
    throw std::runtime_error("pipe() failed");

  std::vector<std::string> args = render_args(spec, instance_path);
  std::vector<char *> argv;
  argv.push_back(const_cast<char *>(spec.exe.c_str()));
  for (auto &a : args)
    argv.push_back(const_cast<char *>(a.c_str()));
  argv.push_back(nullptr);

  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    close(errpipe[0]);
    close(errpipe[1]);
    throw std::runtime_error("fork() failed");
  }
  if (pid == 0) {
    setpgid(0, 0); // own process group so the whole tree can be killed
    close(errpipe[0]);
    dup2(errpipe[1], 2);
    close(errpipe[1]);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) {
      dup2(devnull, 1);
      close(devnull);
    }
    // Hard CPU backstop one second past the soft limit we police ourselves.
    rlimit rl;
    rl.rlim_cur = static_cast<rlim_t>(std::ceil(limit_seconds)) + 1;
    rl.rlim_max = rl.rlim_cur + 1;
    setrlimit(RLIMIT_CPU, &rl);
    execv(spec.exe.c_str(), argv.data());
    std::fprintf(stderr, "exec failed: %s\n", std::strerror(errno));
    _exit(127);
  }

  setpgid(pid, pid);
  close(errpipe[1]);
  fcntl(errpipe[0], F_SETFL, O_NONBLOCK);

  const double wall_cap = 3.0 * limit_seconds + 10.0;
  bool killed = false;
  std::string err;
  char buf[1024];

  auto drain_stderr = [&]() {
    ssize_t n;
    while ((n = read(errpipe[0], buf, sizeof buf)) > 0) {
      err.append(buf, static_cast<size_t>(n));
      if (err.size() > 8192)
        err.erase(0, err.size() - 4096);
    }
  };

  int status = 0;
  rusage usage{};
  while (true) {
    drain_stderr();
    pid_t done = wait4(pid, &status, WNOHANG, &usage);
    if (done == pid)
      break;
    if (done < 0 && errno != EINTR)
      break;
    double wall = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    auto cpu = proc_cpu_seconds(pid);
    if ((cpu && *cpu > limit_seconds) || wall > wall_cap) {
      killed = true;
      kill(-pid, SIGKILL);
      wait4(pid, &status, 0, &usage);
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  drain_stderr();
  close(errpipe[0]);

  rec.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  rec.cpu_seconds = double(usage.ru_utime.tv_sec + usage.ru_stime.tv_sec) +
                    double(usage.ru_utime.tv_usec + usage.ru_stime.tv_usec) /
                        1e6;
  rec.stderr_tail = err.substr(err.size() > 2048 ? err.size() - 2048 : 0);

  bool cpu_overrun = rec.cpu_seconds > limit_seconds;
  if (killed || cpu_overrun ||
      (WIFSIGNALED(status) && WTERMSIG(status) == SIGXCPU)) {
    rec.status = RunStatus::TIMEOUT;
    rec.cpu_seconds = limit_seconds;
    return rec;
  }
  if (WIFEXITED(status)) {
    int code = WEXITSTATUS(status);
    if (code == spec.sat_exit)
      rec.status = RunStatus::SAT;
    else if (code == spec.unsat_exit)
      rec.status = RunStatus::UNSAT;
    else {
      rec.status = RunStatus::ERROR;
      if (rec.stderr_tail.empty())
        rec.stderr_tail = "unrecognized exit code " + std::to_string(code);
    }
  } else {
    rec.status = RunStatus::ERROR;
    if (rec.stderr_tail.empty())
      rec.stderr_tail = "terminated by signal";
  }
  return rec;
}

std::vector<RunRecord> run_corpus(std::span<const SolverSpec> solvers,
                                  std::span<const std::string> instances,
                                  double limit_seconds, int workers) {
  struct Job {
    const SolverSpec *spec;
    const std::string *instance;
  };
  std::vector<Job> jobs;
  for (const auto &s : solvers)
    for (const auto &i : instances)
      jobs.push_back({&s, &i});

  std::vector<RunRecord> records(jobs.size());
  std::atomic<size_t> next{0};
  int n_workers = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w)
    pool.emplace_back([&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= jobs.size())
          return;
        records[i] =
            run_solver(*jobs[i].spec, *jobs[i].instance, limit_seconds);
      }
    });
  for (auto &t : pool)
    t.join();

  std::sort(records.begin(), records.end(),
            [](const RunRecord &a, const RunRecord &b) {
              if (a.instance != b.instance)
                return a.instance < b.instance;
              return a.solver < b.solver;
            });
  return records;
}

CoreDetectResult detect_core_external(const std::string &instance_path,
                                      const CnfFormula &instance,
                                      const SolverSpec &solver,
                                      const SolverSpec &checker,
                                      const std::string &workdir) {
  std::string base = instance_path;
  if (auto slash = base.rfind('/'); slash != std::string::npos)
    base = base.substr(slash + 1);
  std::string proof_path = workdir + "/" + base + ".proof";
  std::string core_path = workdir + "/" + base + ".core.cnf";

  SolverSpec sv = solver;
  sv.args.clear();
  for (const auto &a : solver.args)
    sv.args.push_back(
        substitute(substitute(a, "{proof}", proof_path), "{core}", core_path));
  RunRecord solve = run_solver(sv, instance_path, 1e9);
  if (solve.status == RunStatus::SAT)
    throw std::runtime_error("detect_core_external: no proof of "
                             "unsatisfiability, instance is satisfiable");
  if (solve.status != RunStatus::UNSAT)
    throw std::runtime_error("detect_core_external: solver failed: " +
                             solve.stderr_tail);

  SolverSpec ck = checker;
  ck.args.clear();
  for (const auto &a : checker.args)
    ck.args.push_back(
        substitute(substitute(a, "{proof}", proof_path), "{core}", core_path));
  // Checker exit conventions vary (drat-trim returns 0); success means the
  // core file exists and parses.
  RunRecord check = run_solver(ck, instance_path, 1e9);
  if (check.status == RunStatus::TIMEOUT)
    throw std::runtime_error("detect_core_external: checker timed out");
  if (access(core_path.c_str(), R_OK) != 0)
    throw std::runtime_error("detect_core_external: checker produced no core "
                             "file: " +
                             check.stderr_tail);

  CnfFormula core_cnf = read_dimacs_file(core_path);

  // Match each core clause to an instance clause by normalized literal
  // multiset, consuming matches so duplicates pair off one to one.
  std::map<std::vector<int>, std::vector<int>> by_shape;
  for (int i = 0; i < instance.num_clauses(); ++i)
    by_shape[instance.clauses[i].normalized()].push_back(i);
  CoreDetectResult result;
  result.core.source = CoreSource::external_checker;
  for (const auto &cl : core_cnf.clauses) {
    auto it = by_shape.find(cl.normalized());
    if (it == by_shape.end() || it->second.empty())
      throw std::runtime_error(
          "detect_core_external: core clause not found in instance");
    result.core.clause_indices.push_back(it->second.back());
    it->second.pop_back();
  }
  std::sort(result.core.clause_indices.begin(),
            result.core.clause_indices.end());
  result.core_clauses = core_cnf;
  result.core_path = core_path;
  return result;
}

RankReport rank_solvers(std::span<const RunRecord> records,
                        const std::vector<std::string> &reference) {
  if (records.empty())
    throw std::invalid_argument("rank_solvers: no records");
  std::map<std::string, std::map<std::string, const RunRecord *>> by_instance;
  std::vector<std::string> solver_names;
  for (const auto &r : records) {
    by_instance[r.instance][r.solver] = &r;
    if (std::find(solver_names.begin(), solver_names.end(), r.solver) ==
        solver_names.end())
      solver_names.push_back(r.solver);
  }
  std::sort(solver_names.begin(), solver_names.end());

  RankReport report;
  std::map<std::string, double> rank_sum;
  int matches = 0;
  for (auto &[instance, recs] : by_instance) {
    if (recs.size() != solver_names.size())
      throw std::invalid_argument("rank_solvers: missing records for " +
                                  instance);
    struct Key {
      double time;
      std::string name;
    };
    std::vector<Key> keys;
    for (auto &[name, rec] : recs) {
      double t = rec->status == RunStatus::SAT || rec->status == RunStatus::UNSAT
                     ? rec->cpu_seconds
                     : rec->limit_seconds; // TIMEOUT and ERROR sort last
      keys.push_back({t, name});
    }
    std::sort(keys.begin(), keys.end(), [](const Key &a, const Key &b) {
      if (a.time != b.time)
        return a.time < b.time;
      return a.name < b.name;
    });
    InstanceRanking ir;
    ir.instance = instance;
    for (size_t i = 0; i < keys.size(); ++i) {
      ir.ranking.push_back(keys[i].name);
      rank_sum[keys[i].name] += double(i + 1);
      if (i > 0 && keys[i].time == keys[i - 1].time)
        ir.had_tie = true;
    }
    if (ir.had_tie)
      ++report.instances_with_ties;
    if (!reference.empty() && ir.ranking == reference)
      ++matches;
    report.per_instance.push_back(std::move(ir));
  }

  for (const auto &name : solver_names)
    report.average_rank.push_back(
        {name, rank_sum[name] / double(by_instance.size())});
  std::sort(report.average_rank.begin(), report.average_rank.end(),
            [](auto &a, auto &b) {
              if (a.second != b.second)
                return a.second < b.second;
              return a.first < b.first;
            });
  if (!reference.empty())
    report.accuracy = double(matches) / double(by_instance.size());
  return report;
}

long TuneGrid::combinations() const {
  long n = 1;
  for (const auto &v : values)
    n *= static_cast<long>(v.size());
  return n;
}

namespace {

double mean_cpu(const SolverSpec &spec,
                std::span<const std::string> instances, double limit,
                int workers) {
  std::vector<RunRecord> recs =
      run_corpus(std::span(&spec, 1), instances, limit, workers);
  double sum = 0.0;
  for (const auto &r : recs)
    sum += r.status == RunStatus::TIMEOUT ? r.limit_seconds : r.cpu_seconds;
  return sum / double(recs.size());
}

} // namespace

TuneResult tune_grid(const SolverSpec &solver, const TuneGrid &grid,
                     std::span<const std::string> generated_corpus,
                     std::span<const std::string> test_corpus,
                     double limit_seconds, int workers) {
  if (grid.param_names.size() != grid.values.size())
    throw std::invalid_argument("tune_grid: mismatched grid shape");
  if (generated_corpus.empty() || test_corpus.empty())
    throw std::invalid_argument("tune_grid: empty corpus");

  TuneResult result;
  std::optional<double> best;
  std::vector<std::string> best_values;

  long total = grid.combinations();
  for (long ci = 0; ci < total; ++ci) {
    // Decode the flat index; the last parameter varies fastest.
    long rem = ci;
    std::vector<std::string> values(grid.param_names.size());
    for (size_t p = grid.param_names.size(); p-- > 0;) {
      values[p] = grid.values[p][rem % grid.values[p].size()];
      rem /= static_cast<long>(grid.values[p].size());
    }
    SolverSpec tuned = solver;
    for (size_t p = 0; p < grid.param_names.size(); ++p)
      tuned.extra_args.push_back(substitute(
          substitute(grid.arg_format, "{name}", grid.param_names[p]),
          "{value}", values[p]));
    double objective =
        mean_cpu(tuned, generated_corpus, limit_seconds, workers);
    result.grid_objective.push_back({values, objective});
    ++result.evaluations;
    if (!best || objective < *best) {
      best = objective;
      best_values = values;
    }
  }

  result.t_generated = *best;
  for (size_t p = 0; p < grid.param_names.size(); ++p)
    result.best_params.push_back({grid.param_names[p], best_values[p]});

  SolverSpec best_spec = solver;
  for (size_t p = 0; p < grid.param_names.size(); ++p)
    best_spec.extra_args.push_back(substitute(
        substitute(grid.arg_format, "{name}", grid.param_names[p]), "{value}",
        best_values[p]));
  result.t_test = mean_cpu(best_spec, test_corpus, limit_seconds, workers);
  result.t_default = mean_cpu(solver, test_corpus, limit_seconds, workers);
  result.gain = (result.t_default - result.t_test) / result.t_default;
  return result;
}

std::string records_csv(std::span<const RunRecord> records) {
  std::ostringstream out;
  out << "instance,solver,status,cpu_s,wall_s,limit_s\n";
  char buf[64];
  for (const auto &r : records) {
    out << r.instance << ',' << r.solver << ',' << run_status_name(r.status);
    std::snprintf(buf, sizeof buf, ",%.6g,%.6g,%.6g\n", r.cpu_seconds,
                  r.wall_seconds, r.limit_seconds);
    out << buf;
  }
  return out.str();
}

std::string tune_report_csv(const TuneResult &r) {
  std::ostringstream out;
  out << "best_hyperparameters,t_g,t_t,gain\n";
  std::string params;
  for (size_t i = 0; i < r.best_params.size(); ++i) {
    if (i)
      params += ' ';
    params += r.best_params[i].first + "=" + r.best_params[i].second;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, ",%.6g,%.6g,%+.2f%%\n", r.t_generated,
                r.t_test, r.gain * 100.0);
  out << '"' << params << '"' << buf;
  return out.str();
}

} // namespace hsg
