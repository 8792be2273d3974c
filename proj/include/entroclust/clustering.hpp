#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "entroclust/dfg.hpp"
#include "entroclust/errors.hpp"
#include "entroclust/event_log.hpp"
#include "entroclust/parallel.hpp"
#include "entroclust/relevance.hpp"
#include "entroclust/rng.hpp"

namespace entroclust {

enum class InitStrategy { kRandom, kPlusPlus, kPlusPlusNorm };

inline const char* to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::kRandom: return "rand";
    case InitStrategy::kPlusPlus: return "pp";
    case InitStrategy::kPlusPlusNorm: return "ppnorm";
  }
  return "?";
}

struct SeedSet {
  std::vector<std::size_t> seed_indices;  // in selection order; seed j founds cluster j
  InitStrategy strategy = InitStrategy::kRandom;
};

struct Cluster {
  std::vector<std::size_t> member_indices;  // ascending variant indices
  Dfg dfg;
  std::int64_t case_count = 0;
};

// One greedy assignment decision: the candidate cost against every cluster
// at the moment the variant was placed.
struct AssignmentStep {
  std::size_t variant_index = 0;
  std::vector<double> scores;
  std::size_t chosen = 0;
};

struct Clustering {
  std::vector<Cluster> clusters;
  std::vector<std::size_t> assignment;  // variant index -> cluster index
  std::string method_tag;
  std::uint64_t rng_seed = 0;
  // Diagnostics. assignment_log is filled by the greedy pass only;
  // candidate_evaluations counts trace_er calls made to score candidates.
  std::vector<AssignmentStep> assignment_log;
  std::int64_t candidate_evaluations = 0;
};

namespace detail {

inline void require_k_in_range(std::size_t k, std::size_t variant_count, const char* who) {
  if (k < 1) throw ArgumentError(std::string(who) + ": k must be >= 1");
  if (k > variant_count) {
    throw ArgumentError(std::string(who) + ": k = " + std::to_string(k) + " exceeds " +
                        std::to_string(variant_count) + " variants");
  }
}

inline void require_augmented_log(const VariantLog& log, const char* who) {
  for (const Variant& v : log.variants) require_augmented(v.trace, who);
}

// Builds the clusters/assignment from a finished variant->cluster map.
inline Clustering clustering_from_assignment(const VariantLog& log,
                                             const std::vector<std::size_t>& assignment,
                                             std::size_t k) {
  Clustering c;
  c.assignment = assignment;
  c.clusters.resize(k);
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    Cluster& cl = c.clusters[assignment[v]];
    cl.member_indices.push_back(v);
    add_variant(cl.dfg, log.variants[v].trace, log.variants[v].multiplicity);
    cl.case_count += log.variants[v].multiplicity;
  }
  return c;
}

}  // namespace detail

// Uniform seed selection without replacement.
inline SeedSet init_random(const VariantLog& log, std::size_t k, Rng& rng) {
  detail::require_k_in_range(k, log.variants.size(), "init_random");
  SeedSet s;
  s.strategy = InitStrategy::kRandom;
  s.seed_indices = sample_without_replacement(rng, log.variants.size(), k);
  return s;
}

// Distance normalization for ++norm seeding: deflate a loopy trace's raw
// seed distance by the ER against its own single-trace DFG. Loop-free
// traces (self-ER 0) are left untouched.
inline double normalized_seed_distance(double raw, double self_bits) {
  return self_bits > 0.0 ? raw / self_bits : raw;
}

// k-means++-style seeding on pairwise ER distances: first seed uniform, each
// further seed sampled among the remaining variants with probability
// proportional to the squared distance to its closest seed. When every
// distance is zero the draw falls back to uniform.
inline SeedSet init_plusplus(const VariantLog& log, std::size_t k, Rng& rng,
                             bool normalize = false, int threads = 1) {
  detail::require_k_in_range(k, log.variants.size(), "init_plusplus");
  detail::require_augmented_log(log, "init_plusplus");
  const std::size_t n = log.variants.size();

  SeedSet s;
  s.strategy = normalize ? InitStrategy::kPlusPlusNorm : InitStrategy::kPlusPlus;
  s.seed_indices.push_back(uniform_index(rng, n));

  std::vector<double> self_bits;
  if (normalize) {
    self_bits.assign(n, 0.0);
    parallel_for(n, threads, [&](std::size_t v) { self_bits[v] = self_er(log.variants[v].trace); });
  }

  std::vector<bool> is_seed(n, false);
  is_seed[s.seed_indices[0]] = true;
  std::vector<double> dmin(n, std::numeric_limits<double>::infinity());

  while (s.seed_indices.size() < k) {
    const Trace& latest = log.variants[s.seed_indices.back()].trace;
    parallel_for(n, threads, [&](std::size_t v) {
      if (is_seed[v]) return;
      double d = pairwise_er(log.variants[v].trace, latest);
      if (normalize) d = normalized_seed_distance(d, self_bits[v]);
      if (d < dmin[v]) dmin[v] = d;
    });

    std::vector<std::size_t> candidates;
    std::vector<double> weights;
    candidates.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
      if (is_seed[v]) continue;
      candidates.push_back(v);
      weights.push_back(dmin[v] * dmin[v]);
    }
    double total = 0.0;
    for (double w : weights) total += w;
    std::size_t pick = total > 0.0 ? candidates[weighted_index(rng, weights)]
                                   : candidates[uniform_index(rng, candidates.size())];
    s.seed_indices.push_back(pick);
    is_seed[pick] = true;
  }
  return s;
}

// Greedy entropic clustering: every seed founds a cluster with its full
// multiplicity; the remaining variants, visited in decreasing multiplicity
// (ties by first appearance, i.e. variant-log order), each join the cluster
// whose DFG — with the variant hypothetically added at full multiplicity —
// encodes them most cheaply. Ties go to the lowest cluster index.
inline Clustering ec_cluster(const VariantLog& log, std::size_t k, const SeedSet& seeds,
                             int threads = 1) {
  detail::require_k_in_range(k, log.variants.size(), "ec_cluster");
  detail::require_augmented_log(log, "ec_cluster");
  if (seeds.seed_indices.size() != k) {
    throw ArgumentError("ec_cluster: seed set size does not match k");
  }
  const std::size_t n = log.variants.size();
  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

  Clustering c;
  c.method_tag = std::string("ec_") + to_string(seeds.strategy);
  c.assignment.assign(n, kUnassigned);
  c.clusters.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t sv = seeds.seed_indices[j];
    if (sv >= n) throw ArgumentError("ec_cluster: seed index out of range");
    if (c.assignment[sv] != kUnassigned) throw ArgumentError("ec_cluster: duplicate seed index");
    Cluster& cl = c.clusters[j];
    cl.member_indices.push_back(sv);
    add_variant(cl.dfg, log.variants[sv].trace, log.variants[sv].multiplicity);
    cl.case_count += log.variants[sv].multiplicity;
    c.assignment[sv] = j;
  }

  std::vector<double> scores(k);
  for (std::size_t v = 0; v < n; ++v) {
    if (c.assignment[v] != kUnassigned) continue;  // seed
    const Variant& variant = log.variants[v];
    Dfg delta = variant_delta(variant.trace, variant.multiplicity);
    parallel_for(k, threads, [&](std::size_t j) {
      scores[j] = trace_er(variant.trace, c.clusters[j].dfg, &delta);
    });
    c.candidate_evaluations += static_cast<std::int64_t>(k);

    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (scores[j] < scores[best]) best = j;
    }
    Cluster& cl = c.clusters[best];
    cl.member_indices.push_back(v);
    add_variant(cl.dfg, variant.trace, variant.multiplicity);
    cl.case_count += variant.multiplicity;
    c.assignment[v] = best;
    c.assignment_log.push_back({v, scores, best});
  }
  return c;
}

namespace detail {

inline SeedSet make_seeds(const VariantLog& log, std::size_t k, InitStrategy strategy, Rng& rng,
                          int threads) {
  switch (strategy) {
    case InitStrategy::kRandom: return init_random(log, k, rng);
    case InitStrategy::kPlusPlus: return init_plusplus(log, k, rng, false, threads);
    case InitStrategy::kPlusPlusNorm: return init_plusplus(log, k, rng, true, threads);
  }
  throw ArgumentError("make_seeds: unknown strategy");
}

}  // namespace detail

// Recursive bisection: start from a 2-way entropic clustering, then keep
// splitting the cluster with the worst average ER (against its own DFG)
// until k clusters exist. A single-variant cluster cannot split; the next
// worst is tried, and when nothing is splittable the attained count is
// simply smaller than k. One rng stream is shared across all recursive
// seedings so a single seed reproduces the run.
inline Clustering ec_split(const VariantLog& log, std::size_t k, InitStrategy strategy, Rng& rng,
                           int threads = 1) {
  if (k < 2) throw ArgumentError("ec_split: k must be >= 2");
  detail::require_k_in_range(k, log.variants.size(), "ec_split");

  Clustering c = ec_cluster(log, 2, detail::make_seeds(log, 2, strategy, rng, threads), threads);
  std::int64_t evals = c.candidate_evaluations;

  while (c.clusters.size() < k) {
    // Rank clusters by average ER, worst first; ties keep the lower index.
    std::vector<std::size_t> order(c.clusters.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::vector<double> er(c.clusters.size());
    for (std::size_t j = 0; j < c.clusters.size(); ++j) {
      const Cluster& cl = c.clusters[j];
      double total = 0.0;
      for (std::size_t v : cl.member_indices) {
        total += static_cast<double>(log.variants[v].multiplicity) *
                 trace_er(log.variants[v].trace, cl.dfg);
      }
      er[j] = total / static_cast<double>(cl.case_count);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (er[a] != er[b]) return er[a] > er[b];
      return a < b;
    });

    std::size_t target = c.clusters.size();
    for (std::size_t j : order) {
      if (c.clusters[j].member_indices.size() >= 2) {
        target = j;
        break;
      }
    }
    if (target == c.clusters.size()) break;  // nothing splittable, stop early

    std::vector<std::size_t> members = c.clusters[target].member_indices;
    std::sort(members.begin(), members.end());
    VariantLog part = sub_log(log, members);
    Clustering split =
        ec_cluster(part, 2, detail::make_seeds(part, 2, strategy, rng, threads), threads);
    evals += split.candidate_evaluations;

    Cluster left, right;
    for (std::size_t i = 0; i < 2; ++i) {
      Cluster& dst = i == 0 ? left : right;
      for (std::size_t sub_index : split.clusters[i].member_indices) {
        dst.member_indices.push_back(members[sub_index]);
      }
      std::sort(dst.member_indices.begin(), dst.member_indices.end());
      dst.dfg = split.clusters[i].dfg;
      dst.case_count = split.clusters[i].case_count;
    }
    c.clusters[target] = std::move(left);
    c.clusters.insert(c.clusters.begin() + static_cast<std::ptrdiff_t>(target) + 1,
                      std::move(right));
  }

  c.assignment.assign(log.variants.size(), 0);
  for (std::size_t j = 0; j < c.clusters.size(); ++j) {
    for (std::size_t v : c.clusters[j].member_indices) c.assignment[v] = j;
  }
  c.method_tag = std::string("ecsplit_") + to_string(strategy);
  c.assignment_log.clear();  // steps of the inner runs use sub-log indices
  c.candidate_evaluations = evals;
  return c;
}

// Baseline: uniform variant-to-cluster assignment. Empty clusters are
// repaired by moving the least frequent member out of the cluster with the
// most variants.
inline Clustering random_clustering(const VariantLog& log, std::size_t k, Rng& rng) {
  detail::require_k_in_range(k, log.variants.size(), "random_clustering");
  detail::require_augmented_log(log, "random_clustering");
  const std::size_t n = log.variants.size();

  std::vector<std::size_t> assignment(n);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t v = 0; v < n; ++v) {
    assignment[v] = uniform_index(rng, k);
    members[assignment[v]].push_back(v);
  }
  for (std::size_t j = 0; j < k; ++j) {
    while (members[j].empty()) {
      std::size_t donor = 0;
      for (std::size_t d = 1; d < k; ++d) {
        if (members[d].size() > members[donor].size()) donor = d;
      }
      std::size_t moved = members[donor].back();
      members[donor].pop_back();
      members[j].push_back(moved);
      assignment[moved] = j;
    }
  }

  Clustering c = detail::clustering_from_assignment(log, assignment, k);
  c.method_tag = "random";
  return c;
}

// Relative activity frequencies of a trace over the given (sorted, sentinel
// free) vocabulary. The empty trace maps to the zero vector.
inline std::vector<double> activity_profile(const Trace& t, const std::vector<std::string>& vocab) {
  require_augmented(t, "activity_profile");
  std::vector<double> profile(vocab.size(), 0.0);
  std::size_t length = 0;
  for (const std::string& a : t) {
    if (a == kBos || a == kEos) continue;
    ++length;
    auto it = std::lower_bound(vocab.begin(), vocab.end(), a);
    if (it != vocab.end() && *it == a) {
      profile[static_cast<std::size_t>(it - vocab.begin())] += 1.0;
    }
  }
  if (length > 0) {
    for (double& x : profile) x /= static_cast<double>(length);
  }
  return profile;
}

namespace detail {

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

}  // namespace detail

// Baseline: k-means++ on normalized activity-frequency profiles, variants
// weighted by multiplicity. Lloyd iterations stop when the largest centroid
// shift drops below 1e-6 (or after 100 rounds); empty clusters seize the
// point farthest from its current centroid.
inline Clustering frequency_kmeanspp(const VariantLog& log, std::size_t k, Rng& rng,
                                     int threads = 1) {
  detail::require_k_in_range(k, log.variants.size(), "frequency_kmeanspp");
  detail::require_augmented_log(log, "frequency_kmeanspp");
  const std::size_t n = log.variants.size();

  std::vector<std::string> vocab(log.vocabulary.begin(), log.vocabulary.end());
  std::vector<std::vector<double>> profiles(n);
  parallel_for(n, threads,
               [&](std::size_t v) { profiles[v] = activity_profile(log.variants[v].trace, vocab); });
  std::vector<double> weight(n);
  for (std::size_t v = 0; v < n; ++v) {
    weight[v] = static_cast<double>(log.variants[v].multiplicity);
  }

  // ++ seeding: first center by case weight, then weight * squared distance
  // to the closest chosen center.
  std::vector<std::size_t> centers;
  std::vector<bool> is_center(n, false);
  centers.push_back(weighted_index(rng, weight));
  is_center[centers[0]] = true;
  std::vector<double> dmin(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    const std::vector<double>& latest = profiles[centers.back()];
    for (std::size_t v = 0; v < n; ++v) {
      double d = detail::squared_distance(profiles[v], latest);
      if (d < dmin[v]) dmin[v] = d;
    }
    std::vector<std::size_t> candidates;
    std::vector<double> weights;
    for (std::size_t v = 0; v < n; ++v) {
      if (is_center[v]) continue;
      candidates.push_back(v);
      weights.push_back(weight[v] * dmin[v]);
    }
    double total = 0.0;
    for (double w : weights) total += w;
    std::size_t pick = total > 0.0 ? candidates[weighted_index(rng, weights)]
                                   : candidates[uniform_index(rng, candidates.size())];
    centers.push_back(pick);
    is_center[pick] = true;
  }

  std::vector<std::vector<double>> centroids(k);
  for (std::size_t j = 0; j < k; ++j) centroids[j] = profiles[centers[j]];

  std::vector<std::size_t> assignment(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    // Assign to the nearest centroid, ties to the lowest cluster index.
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t best = 0;
      double best_d = detail::squared_distance(profiles[v], centroids[0]);
      for (std::size_t j = 1; j < k; ++j) {
        double d = detail::squared_distance(profiles[v], centroids[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      assignment[v] = best;
      members[best].push_back(v);
    }

    // Repair empties: seize the point farthest from its own centroid among
    // donors that keep at least one member.
    for (std::size_t j = 0; j < k; ++j) {
      while (members[j].empty()) {
        std::size_t grabbed = n;
        double far_d = -1.0;
        for (std::size_t v = 0; v < n; ++v) {
          if (members[assignment[v]].size() < 2) continue;
          double d = detail::squared_distance(profiles[v], centroids[assignment[v]]);
          if (d > far_d) {
            far_d = d;
            grabbed = v;
          }
        }
        if (grabbed == n) break;
        auto& donor = members[assignment[grabbed]];
        donor.erase(std::find(donor.begin(), donor.end(), grabbed));
        assignment[grabbed] = j;
        members[j].push_back(grabbed);
      }
    }

    // Multiplicity-weighted centroid update.
    double max_shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<double> mean(vocab.size(), 0.0);
      double mass = 0.0;
      for (std::size_t v : members[j]) {
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += weight[v] * profiles[v][i];
        mass += weight[v];
      }
      if (mass > 0.0) {
        for (double& x : mean) x /= mass;
      }
      double shift = std::sqrt(detail::squared_distance(mean, centroids[j]));
      if (shift > max_shift) max_shift = shift;
      centroids[j] = std::move(mean);
    }
    if (max_shift < 1e-6) break;
  }

  Clustering c = detail::clustering_from_assignment(log, assignment, k);
  c.method_tag = "freq_kmeans";
  return c;
}

// Partition and count consistency check used by tests: every variant sits in
// exactly one cluster, case counts add up, and each cluster DFG equals the
// rebuild from its members.
inline void check_clustering_invariants(const Clustering& c, const VariantLog& log) {
  std::vector<int> seen(log.variants.size(), 0);
  std::int64_t cases = 0;
  for (std::size_t j = 0; j < c.clusters.size(); ++j) {
    const Cluster& cl = c.clusters[j];
    if (cl.member_indices.empty()) throw ContractError("clustering invariant: empty cluster");
    std::int64_t case_count = 0;
    Dfg rebuilt;
    for (std::size_t v : cl.member_indices) {
      if (v >= log.variants.size()) throw ContractError("clustering invariant: bad index");
      seen[v] += 1;
      if (c.assignment.at(v) != j) throw ContractError("clustering invariant: assignment mismatch");
      case_count += log.variants[v].multiplicity;
      add_variant(rebuilt, log.variants[v].trace, log.variants[v].multiplicity);
    }
    if (case_count != cl.case_count) throw ContractError("clustering invariant: case count");
    if (!(rebuilt == cl.dfg)) throw ContractError("clustering invariant: dfg mismatch");
    cases += case_count;
  }
  for (int s : seen) {
    if (s != 1) throw ContractError("clustering invariant: not a partition");
  }
  if (cases != log.total_cases) throw ContractError("clustering invariant: total cases");
}

}  // namespace entroclust
