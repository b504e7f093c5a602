#include "hsg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hsg {

double clustering_coefficient(const GraphView &vig) {
  if (vig.num_nodes == 0)
    throw std::invalid_argument("clustering_coefficient: empty graph");
  auto adj = vig.adjacency();
  std::vector<std::set<int>> nb(vig.num_nodes);
  for (int u = 0; u < vig.num_nodes; ++u)
    nb[u] = std::set<int>(adj[u].begin(), adj[u].end());

  double sum = 0.0;
  for (int u = 0; u < vig.num_nodes; ++u) {
    size_t d = nb[u].size();
    if (d < 2)
      continue;
    long closed = 0;
    for (int v : nb[u])
      for (int w : nb[u]) {
        if (v >= w)
          continue;
        if (nb[v].count(w))
          ++closed;
      }
    sum += 2.0 * double(closed) / (double(d) * double(d - 1));
  }
  return sum / double(vig.num_nodes);
}

StructStats modularity_suite(const CnfFormula &f, uint64_t seed) {
  if (f.clauses.empty())
    throw std::invalid_argument("modularity_suite: formula has no clauses");
  StructStats s;
  auto q_of = [&](ViewKind kind) -> std::optional<double> {
    GraphView view = derive_view(f, kind);
    if (view.edges.empty())
      return std::nullopt; // undefined, not zero
    Partition p = detect_louvain(view, seed);
    return modularity(view, p);
  };
  s.vig_modularity = q_of(ViewKind::VIG);
  s.vcg_modularity = q_of(ViewKind::VCG);
  s.lig_modularity = q_of(ViewKind::LIG);
  s.lcg_modularity = q_of(ViewKind::LCG);
  return s;
}

std::vector<int> clause_degrees(const CnfFormula &f) {
  std::vector<int> out;
  out.reserve(f.clauses.size());
  for (const auto &cl : f.clauses) {
    std::set<int> vars;
    for (int l : cl.lits)
      vars.insert(std::abs(l));
    out.push_back(static_cast<int>(vars.size()));
  }
  return out;
}

StructStats compute_struct_stats(const CnfFormula &f, uint64_t seed) {
  StructStats s = modularity_suite(f, seed);
  GraphView vig = derive_view(f, ViewKind::VIG);
  if (vig.num_nodes > 0)
    s.vig_clustering = clustering_coefficient(vig);
  try {
    PowerlawFit fit = powerlaw_alpha(clause_degrees(f));
    s.vcg_alpha_c = fit.alpha;
  } catch (const std::exception &) {
    s.vcg_alpha_c = std::nullopt; // degenerate degree distribution
  }
  return s;
}

PowerlawFit powerlaw_alpha(const std::vector<int> &degrees) {
  if (degrees.size() < 10)
    throw std::invalid_argument("powerlaw_alpha: need at least 10 samples");
  std::vector<int> xs = degrees;
  std::sort(xs.begin(), xs.end());
  if (xs.front() < 1)
    throw std::invalid_argument("powerlaw_alpha: degrees must be positive");
  if (xs.front() == xs.back())
    throw std::invalid_argument("powerlaw_alpha: degenerate distribution");

  std::vector<int> distinct(xs.begin(), xs.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());

  std::optional<PowerlawFit> best;
  for (int x_min : distinct) {
    auto tail_begin = std::lower_bound(xs.begin(), xs.end(), x_min);
    size_t n = static_cast<size_t>(xs.end() - tail_begin);
    if (n < 2)
      continue;
    double log_sum = 0.0;
    for (auto it = tail_begin; it != xs.end(); ++it)
      log_sum += std::log(double(*it) / (double(x_min) - 0.5));
    if (log_sum <= 0.0)
      continue; // all tail values equal x_min
    double alpha = 1.0 + double(n) / log_sum;

    // KS distance between the empirical tail CDF and the fitted CDF
    // P(X >= x) = ((x - 0.5) / (x_min - 0.5))^(1 - alpha).
    double ks = 0.0;
    size_t seen = 0;
    for (size_t i = 0; i < n;) {
      size_t j = i;
      int x = *(tail_begin + i);
      while (j < n && *(tail_begin + j) == x)
        ++j;
      seen += j - i;
      double emp_cdf = double(seen) / double(n);
      double fit_ccdf_next = std::pow(
          (double(x) + 0.5) / (double(x_min) - 0.5), 1.0 - alpha);
      double fit_cdf = 1.0 - fit_ccdf_next;
      ks = std::max(ks, std::abs(emp_cdf - fit_cdf));
      i = j;
    }
    if (!best || ks < best->ks)
      best = PowerlawFit{alpha, x_min, ks, static_cast<int>(n)};
  }
  if (!best)
    throw std::invalid_argument("powerlaw_alpha: degenerate distribution");
  return *best;
}

namespace {

struct Acc {
  double sum = 0.0, sum_sq = 0.0;
  long n = 0;
  void add(std::optional<double> v) {
    if (!v)
      return;
    sum += *v;
    sum_sq += *v * *v;
    ++n;
  }
  std::optional<double> mean() const {
    if (n == 0)
      return std::nullopt;
    return sum / double(n);
  }
  std::optional<double> stddev() const {
    if (n == 0)
      return std::nullopt;
    if (n == 1)
      return 0.0;
    double m = sum / double(n);
    double var = (sum_sq - double(n) * m * m) / double(n - 1);
    return std::sqrt(std::max(0.0, var));
  }
};

using Field = std::optional<double> StructStats::*;

constexpr std::pair<const char *, Field> kFields[] = {
    {"vig_clustering", &StructStats::vig_clustering},
    {"vig_modularity", &StructStats::vig_modularity},
    {"vcg_alpha_c", &StructStats::vcg_alpha_c},
    {"vcg_modularity", &StructStats::vcg_modularity},
    {"lig_modularity", &StructStats::lig_modularity},
    {"lcg_modularity", &StructStats::lcg_modularity},
};

} // namespace

CorpusReport corpus_report(std::span<const StructStats> generated,
                           std::span<const StructStats> ground_truth) {
  if (generated.empty() || ground_truth.empty())
    throw std::invalid_argument("corpus_report: empty corpus");
  CorpusReport r;
  for (auto [name, field] : kFields) {
    Acc gen, gt;
    for (const auto &s : generated)
      gen.add(s.*field);
    for (const auto &s : ground_truth)
      gt.add(s.*field);
    MetricAggregate m;
    m.name = name;
    m.gen_mean = gen.mean();
    m.gen_std = gen.stddev();
    m.gt_mean = gt.mean();
    m.gt_std = gt.stddev();
    if (m.gen_mean && m.gt_mean && *m.gt_mean != 0.0)
      m.rel_err_percent =
          std::abs(*m.gen_mean - *m.gt_mean) / std::abs(*m.gt_mean) * 100.0;
    r.metrics.push_back(std::move(m));
  }
  return r;
}

namespace {

std::string opt_str(std::optional<double> v) {
  if (!v)
    return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

} // namespace

std::string corpus_report_csv(const CorpusReport &r) {
  std::ostringstream out;
  out << "metric,gen_mean,gen_std,gt_mean,gt_std,rel_err_percent\n";
  for (const auto &m : r.metrics)
    out << m.name << ',' << opt_str(m.gen_mean) << ',' << opt_str(m.gen_std)
        << ',' << opt_str(m.gt_mean) << ',' << opt_str(m.gt_std) << ','
        << opt_str(m.rel_err_percent) << '\n';
  return out.str();
}

std::string struct_stats_jsonl(const std::string &instance,
                               const StructStats &s) {
  std::ostringstream out;
  out << "{\"instance\":\"" << instance << '"';
  for (auto [name, field] : kFields) {
    out << ",\"" << name << "\":";
    if (s.*field) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.9g", *(s.*field));
      out << buf;
    } else {
      out << "null";
    }
  }
  out << "}\n";
  return out.str();
}

} // namespace hsg
