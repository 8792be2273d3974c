#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "entroclust/dfg.hpp"
#include "entroclust/errors.hpp"
#include "entroclust/event_log.hpp"

namespace entroclust {

// Underflow threshold for a whole-trace probability. Fixed (not a CLI knob)
// so scores stay comparable across runs.
inline constexpr double kUnderflowEpsilon = 1e-10;

// Cost ceiling in bits: -log2(epsilon).
inline const double kMaxCostBits = -std::log2(kUnderflowEpsilon);

// A hypothetical count increment, used to score a variant against a cluster
// DFG "as if already added" without mutating shared state. The delta is just
// the single-variant DFG of the candidate.
inline Dfg variant_delta(const Trace& t, std::int64_t multiplicity) {
  Dfg d;
  add_variant(d, t, multiplicity);
  return d;
}

// Information cost in bits of encoding one augmented trace with the DFG's
// transition probabilities: -log2 of the product of edge probabilities along
// the trace, accumulated in log space and clamped at -log2(epsilon).
// When clamped is non-null it is set to whether the raw probability fell
// below epsilon. A zero-probability transition (the trace was not part of
// the model) raises NonFittingTraceError.
inline double trace_er(const Trace& t, const Dfg& g, const Dfg* overlay = nullptr,
                       bool* clamped = nullptr) {
  require_augmented(t, "trace_er");
  double bits = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const std::string& a = t[i];
    const std::string& b = t[i + 1];
    std::int64_t edge = g.edge_count(a, b);
    std::int64_t source = g.node_count(a);
    if (overlay != nullptr) {
      edge += overlay->edge_count(a, b);
      source += overlay->node_count(a);
    }
    if (edge <= 0) {
      throw NonFittingTraceError("trace_er: zero-probability transition \"" + a + "\" -> \"" +
                                 b + "\"");
    }
    bits -= std::log2(static_cast<double>(edge) / static_cast<double>(source));
  }
  if (bits > kMaxCostBits) {
    if (clamped != nullptr) *clamped = true;
    return kMaxCostBits;
  }
  if (clamped != nullptr) *clamped = false;
  return bits;
}

struct VariantCost {
  std::size_t variant_index = 0;
  double cost_bits = 0.0;
};

// Per-trace and aggregate entropic relevance of a (log, DFG) pair.
struct ErReport {
  std::vector<VariantCost> per_variant;
  double total_bits = 0.0;    // sum of multiplicity * cost over variants
  double average_bits = 0.0;  // total_bits / total_cases
  std::int64_t clamped_count = 0;
};

// Average entropic relevance of a variant log against a DFG: cost per trace
// via trace_er, weighted by multiplicity, divided by the total case count.
// A non-fitting variant propagates as NonFittingTraceError tagged with its
// index.
inline ErReport average_er(const VariantLog& log, const Dfg& g, const Dfg* overlay = nullptr) {
  ErReport report;
  report.per_variant.reserve(log.variants.size());
  for (std::size_t i = 0; i < log.variants.size(); ++i) {
    const Variant& v = log.variants[i];
    bool clamped = false;
    double cost;
    try {
      cost = trace_er(v.trace, g, overlay, &clamped);
    } catch (const NonFittingTraceError& e) {
      throw NonFittingTraceError("variant " + std::to_string(i) + ": " + e.what(),
                                 static_cast<long long>(i));
    }
    report.per_variant.push_back({i, cost});
    report.total_bits += static_cast<double>(v.multiplicity) * cost;
    if (clamped) ++report.clamped_count;
  }
  report.average_bits =
      log.total_cases > 0 ? report.total_bits / static_cast<double>(log.total_cases) : 0.0;
  return report;
}

// Seed distance for ++ initialization: the average ER of two traces against
// the DFG discovered from just those two traces (multiplicity 1 each).
// Symmetric by construction; 0 for identical loop-free traces.
inline double pairwise_er(const Trace& a, const Trace& b) {
  require_augmented(a, "pairwise_er");
  require_augmented(b, "pairwise_er");
  Dfg g = build_dfg({{a, 1}, {b, 1}});
  return 0.5 * (trace_er(a, g) + trace_er(b, g));
}

// ER of a trace against its own single-trace DFG. Exactly 0 for traces
// without repeated activities; positive when repetition forces probabilistic
// branching.
inline double self_er(const Trace& t) {
  require_augmented(t, "self_er");
  Dfg g = build_dfg({{t, 1}});
  return trace_er(t, g);
}

}  // namespace entroclust
