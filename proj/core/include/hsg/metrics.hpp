#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsg/cnf.hpp"
#include "hsg/community.hpp"
#include "hsg/graph.hpp"

namespace hsg {

/// Per-instance structural statistics (null = undefined on this instance).
struct StructStats {
  std::optional<double> vig_clustering;
  std::optional<double> vig_modularity;
  std::optional<double> vcg_alpha_c;
  std::optional<double> vcg_modularity;
  std::optional<double> lig_modularity;
  std::optional<double> lcg_modularity;
};

/// Mean over nodes of 2*triangles / (deg*(deg-1)); degree < 2 contributes 0.
double clustering_coefficient(const GraphView &vig);

/// Louvain modularity of each derived view; edgeless views come back null.
StructStats modularity_suite(const CnfFormula &f, uint64_t seed);

/// modularity_suite plus clustering and the clause power-law exponent.
StructStats compute_struct_stats(const CnfFormula &f, uint64_t seed);

struct PowerlawFit {
  double alpha;
  int x_min;
  double ks; // KS distance at the chosen x_min
  int tail_n;
};

/// Discrete MLE with the continuous approximation
/// alpha = 1 + n / sum(ln(x / (x_min - 0.5))), x_min selected by minimal
/// KS distance between empirical and fitted tail CCDF.
PowerlawFit powerlaw_alpha(const std::vector<int> &degrees);

/// VCG clause-side degrees, i.e. distinct-variable clause sizes.
std::vector<int> clause_degrees(const CnfFormula &f);

struct MetricAggregate {
  std::string name;
  std::optional<double> gen_mean, gen_std;
  std::optional<double> gt_mean, gt_std;
  std::optional<double> rel_err_percent;
};

struct CorpusReport {
  std::vector<MetricAggregate> metrics; // fixed order, six rows
};

/// Mean and sample std per metric over both corpora plus
/// |mean_gen - mean_gt| / |mean_gt| as a percentage. Nulls are excluded
/// from aggregation.
CorpusReport corpus_report(std::span<const StructStats> generated,
                           std::span<const StructStats> ground_truth);

std::string corpus_report_csv(const CorpusReport &r);
std::string struct_stats_jsonl(const std::string &instance,
                               const StructStats &s);

} // namespace hsg
