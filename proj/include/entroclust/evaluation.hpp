#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "entroclust/clustering.hpp"
#include "entroclust/dfg.hpp"
#include "entroclust/errors.hpp"
#include "entroclust/event_log.hpp"
#include "entroclust/relevance.hpp"
#include "entroclust/rng.hpp"

namespace entroclust {

struct MetricRow {
  std::string method_tag;
  std::string log_name;
  std::map<std::string, double> values;  // er_avg, graph_density, graph_entropy
};

// Case-count weighted cluster metrics: every cluster is scored against its
// own DFG and the scores are averaged with weight case_count / total cases.
inline MetricRow weighted_metrics(const Clustering& clustering, const VariantLog& log,
                                  bool include_sentinels = true, std::string log_name = "") {
  double er = 0.0;
  double gd = 0.0;
  double ge = 0.0;
  const double total = static_cast<double>(log.total_cases);
  for (const Cluster& cl : clustering.clusters) {
    double cluster_bits = 0.0;
    for (std::size_t v : cl.member_indices) {
      cluster_bits += static_cast<double>(log.variants[v].multiplicity) *
                      trace_er(log.variants[v].trace, cl.dfg);
    }
    const double weight = static_cast<double>(cl.case_count) / total;
    er += weight * (cluster_bits / static_cast<double>(cl.case_count));
    gd += weight * graph_density(cl.dfg, include_sentinels);
    ge += weight * graph_entropy(cl.dfg, include_sentinels);
  }
  MetricRow row;
  row.method_tag = clustering.method_tag;
  row.log_name = std::move(log_name);
  row.values = {{"er_avg", er}, {"graph_density", gd}, {"graph_entropy", ge}};
  return row;
}

enum class Method { kEc, kEcSplit, kRandom, kFreqKmeans };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kEc: return "ec";
    case Method::kEcSplit: return "ec-split";
    case Method::kRandom: return "random";
    case Method::kFreqKmeans: return "freq-kmeans";
  }
  return "?";
}

// One entry point for every clustering method, so the CLI and the elbow
// sweep configure runs identically. `init` only matters for ec / ec-split.
inline Clustering run_method(const VariantLog& log, Method method, InitStrategy init,
                             std::size_t k, std::uint64_t seed, int threads = 1) {
  Rng rng(seed);
  Clustering c;
  switch (method) {
    case Method::kEc:
      c = ec_cluster(log, k, detail::make_seeds(log, k, init, rng, threads), threads);
      break;
    case Method::kEcSplit:
      c = ec_split(log, k, init, rng, threads);
      break;
    case Method::kRandom:
      c = random_clustering(log, k, rng);
      break;
    case Method::kFreqKmeans:
      c = frequency_kmeanspp(log, k, rng, threads);
      break;
  }
  c.rng_seed = seed;
  return c;
}

struct SweepMethod {
  Method method = Method::kEc;
  InitStrategy init = InitStrategy::kPlusPlus;
};

struct ElbowCell {
  std::string method_tag;
  std::size_t k = 0;
  std::optional<MetricRow> row;  // empty when the method cannot produce this k
  std::string error;
};

namespace detail {

inline std::string sweep_tag(const SweepMethod& m) {
  switch (m.method) {
    case Method::kEc: return std::string("ec_") + to_string(m.init);
    case Method::kEcSplit: return std::string("ecsplit_") + to_string(m.init);
    case Method::kRandom: return "random";
    case Method::kFreqKmeans: return "freq_kmeans";
  }
  return "?";
}

}  // namespace detail

// Runs every (method, k) cell of the elbow experiment. Each cell draws its
// own rng stream from (seed, method tag, k), so the sweep is reproducible
// and cells may run in parallel. Cells a method cannot produce (e.g.
// ec-split with k=1) carry the error message instead of metrics.
inline std::vector<ElbowCell> elbow_sweep(const VariantLog& log,
                                          const std::vector<std::size_t>& k_values,
                                          const std::vector<SweepMethod>& methods,
                                          std::uint64_t seed, bool include_sentinels = true,
                                          int threads = 1) {
  for (std::size_t k : k_values) {
    detail::require_k_in_range(k, log.variants.size(), "elbow_sweep");
  }
  std::vector<ElbowCell> cells(methods.size() * k_values.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    const SweepMethod& m = methods[i / k_values.size()];
    const std::size_t k = k_values[i % k_values.size()];
    ElbowCell& cell = cells[i];
    cell.method_tag = detail::sweep_tag(m);
    cell.k = k;
    try {
      Clustering c =
          run_method(log, m.method, m.init, k, derive_seed(seed, cell.method_tag, k), 1);
      cell.row = weighted_metrics(c, log, include_sentinels);
    } catch (const Error& e) {
      cell.error = e.what();
    }
  });
  return cells;
}

// Per-log ranks of a methods x logs matrix, 1 = best. Ties receive the mean
// of the tied rank positions, so each column still sums to k(k+1)/2.
inline std::vector<std::vector<double>> rank_matrix(const std::vector<std::vector<double>>& values,
                                                    bool lower_is_better = true) {
  if (values.empty() || values[0].empty()) {
    throw ArgumentError("rank_matrix: empty matrix");
  }
  const std::size_t k = values.size();
  const std::size_t n = values[0].size();
  for (const auto& row : values) {
    if (row.size() != n) throw ArgumentError("rank_matrix: ragged matrix");
    for (double x : row) {
      if (!std::isfinite(x)) throw ArgumentError("rank_matrix: non-finite cell");
    }
  }
  std::vector<std::vector<double>> ranks(k, std::vector<double>(n, 0.0));
  for (std::size_t log = 0; log < n; ++log) {
    std::vector<std::size_t> order(k);
    for (std::size_t j = 0; j < k; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[a][log] != values[b][log]) {
        return lower_is_better ? values[a][log] < values[b][log] : values[a][log] > values[b][log];
      }
      return a < b;
    });
    std::size_t i = 0;
    while (i < k) {
      std::size_t j = i;
      while (j + 1 < k && values[order[j + 1]][log] == values[order[i]][log]) ++j;
      const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t t = i; t <= j; ++t) ranks[order[t]][log] = mean_rank;
      i = j + 1;
    }
  }
  return ranks;
}

inline std::vector<double> average_ranks(const std::vector<std::vector<double>>& values,
                                         bool lower_is_better = true) {
  std::vector<std::vector<double>> ranks = rank_matrix(values, lower_is_better);
  std::vector<double> avg(ranks.size(), 0.0);
  for (std::size_t j = 0; j < ranks.size(); ++j) {
    for (double r : ranks[j]) avg[j] += r;
    avg[j] /= static_cast<double>(ranks[j].size());
  }
  return avg;
}

// Upper tail of the chi-square distribution via the regularized incomplete
// gamma function Q(df/2, x/2).
inline double chi_square_upper_tail(double x, double df) {
  if (!(x >= 0.0)) throw ArgumentError("chi_square_upper_tail: statistic must be >= 0");
  if (!(df >= 1.0)) throw ArgumentError("chi_square_upper_tail: df must be >= 1");
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

struct FriedmanResult {
  double chi2 = 0.0;
  double p_value = 1.0;
};

// Friedman rank test over a methods x logs matrix:
//   chi2 = 12 / (N k (k+1)) * sum_j R_j^2 - 3 N (k+1)
// where R_j is method j's rank sum over the N logs. The p-value is the
// chi-square upper tail with k-1 degrees of freedom. Fully tied columns
// drive the statistic to 0 and the p-value to 1.
inline FriedmanResult friedman_test(const std::vector<std::vector<double>>& values,
                                    bool lower_is_better = true) {
  if (values.size() < 2) throw ArgumentError("friedman_test: need >= 2 methods");
  if (values[0].size() < 2) throw ArgumentError("friedman_test: need >= 2 logs");
  std::vector<std::vector<double>> ranks = rank_matrix(values, lower_is_better);
  const double k = static_cast<double>(values.size());
  const double n = static_cast<double>(values[0].size());
  double sum_sq = 0.0;
  for (const auto& row : ranks) {
    double rank_sum = 0.0;
    for (double r : row) rank_sum += r;
    sum_sq += rank_sum * rank_sum;
  }
  FriedmanResult result;
  result.chi2 = 12.0 / (n * k * (k + 1.0)) * sum_sq - 3.0 * n * (k + 1.0);
  if (result.chi2 < 0.0 && result.chi2 > -1e-9) result.chi2 = 0.0;  // tie rounding
  result.p_value = chi_square_upper_tail(result.chi2, k - 1.0);
  return result;
}

// Critical values q_0.05 of the studentized range statistic divided by
// sqrt(2), for k = 2..12 compared methods. The same values ship as
// data/nemenyi_q_alpha05.csv with their derivation notes; a test asserts
// the two stay in sync.
inline constexpr double kNemenyiQAlpha05[] = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949,
                                              3.031, 3.102, 3.164, 3.219, 3.268};

// Nemenyi critical difference: two methods differ significantly when their
// average ranks are more than CD = q_alpha * sqrt(k(k+1)/(6N)) apart.
inline double nemenyi_cd(std::size_t k_methods, std::size_t n_logs, double alpha = 0.05) {
  if (alpha != 0.05) throw ArgumentError("nemenyi_cd: only alpha = 0.05 is tabulated");
  if (k_methods < 2 || k_methods > 12) {
    throw ArgumentError("nemenyi_cd: k = " + std::to_string(k_methods) +
                        " outside tabulated range 2..12");
  }
  if (n_logs < 1) throw ArgumentError("nemenyi_cd: need at least one log");
  const double k = static_cast<double>(k_methods);
  const double n = static_cast<double>(n_logs);
  return kNemenyiQAlpha05[k_methods - 2] * std::sqrt(k * (k + 1.0) / (6.0 * n));
}

struct RankReport {
  std::string metric;
  std::vector<std::string> methods;
  std::vector<std::string> logs;
  std::vector<std::vector<double>> matrix;  // methods x logs
  std::vector<double> avg_ranks;
  std::optional<double> friedman_chi2;  // absent when fewer than 2 logs/methods
  std::optional<double> p_value;
  std::optional<double> cd;
  std::vector<std::pair<std::string, std::string>> pairs_significant;
};

// Full ranking pipeline over a metric matrix. Average ranks are always
// produced; the Friedman statistic and the Nemenyi threshold are filled in
// only when the matrix is large enough (>= 2 methods and logs; CD further
// requires k within the tabulated 2..12).
inline RankReport rank_report(std::string metric, std::vector<std::string> methods,
                              std::vector<std::string> logs,
                              std::vector<std::vector<double>> matrix,
                              bool lower_is_better = true) {
  if (methods.size() != matrix.size()) {
    throw ArgumentError("rank_report: method names do not match matrix rows");
  }
  RankReport report;
  report.metric = std::move(metric);
  report.methods = std::move(methods);
  report.logs = std::move(logs);
  report.matrix = std::move(matrix);
  if (!report.matrix.empty() && report.logs.size() != report.matrix[0].size()) {
    throw ArgumentError("rank_report: log names do not match matrix columns");
  }
  report.avg_ranks = average_ranks(report.matrix, lower_is_better);
  if (report.matrix.size() >= 2 && report.matrix[0].size() >= 2) {
    FriedmanResult friedman = friedman_test(report.matrix, lower_is_better);
    report.friedman_chi2 = friedman.chi2;
    report.p_value = friedman.p_value;
    if (report.matrix.size() <= 12) {
      report.cd = nemenyi_cd(report.matrix.size(), report.matrix[0].size());
      for (std::size_t a = 0; a < report.methods.size(); ++a) {
        for (std::size_t b = a + 1; b < report.methods.size(); ++b) {
          if (std::abs(report.avg_ranks[a] - report.avg_ranks[b]) > *report.cd) {
            report.pairs_significant.emplace_back(report.methods[a], report.methods[b]);
          }
        }
      }
    }
  }
  return report;
}

}  // namespace entroclust
