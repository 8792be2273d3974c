#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "entroclust/errors.hpp"
#include "entroclust/event_log.hpp"

namespace entroclust {

// Directly-follows graph stored as sparse count dictionaries over activity
// labels (including the sentinels). Transition probabilities are always
// derived on demand from the exact integer counts.
struct Dfg {
  std::map<std::string, std::int64_t> node_counts;
  std::map<std::string, std::map<std::string, std::int64_t>> out_edges;

  friend bool operator==(const Dfg& a, const Dfg& b) {
    return a.node_counts == b.node_counts && a.out_edges == b.out_edges;
  }

  std::int64_t node_count(const std::string& a) const {
    auto it = node_counts.find(a);
    return it == node_counts.end() ? 0 : it->second;
  }

  std::int64_t edge_count(const std::string& a, const std::string& b) const {
    auto it = out_edges.find(a);
    if (it == out_edges.end()) return 0;
    auto jt = it->second.find(b);
    return jt == it->second.end() ? 0 : jt->second;
  }

  std::int64_t total_edges() const {
    std::int64_t n = 0;
    for (const auto& [src, targets] : out_edges) n += static_cast<std::int64_t>(targets.size());
    return n;
  }

  bool empty() const { return node_counts.empty(); }
};

// Adds the node/edge counts of one augmented variant, weighted by its
// multiplicity.
inline void add_variant(Dfg& g, const Trace& t, std::int64_t multiplicity) {
  require_augmented(t, "add_variant");
  if (multiplicity < 1) throw ContractError("add_variant: multiplicity must be >= 1");
  for (const std::string& a : t) g.node_counts[a] += multiplicity;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    g.out_edges[t[i]][t[i + 1]] += multiplicity;
  }
}

// Exact inverse of add_variant. Entries reaching zero are erased so that the
// maps stay sparse and map equality means count equality. Removing counts
// that were never added is a contract error; the graph is left untouched.
inline void remove_variant(Dfg& g, const Trace& t, std::int64_t multiplicity) {
  require_augmented(t, "remove_variant");
  if (multiplicity < 1) throw ContractError("remove_variant: multiplicity must be >= 1");

  // Dry run: collect the decrement per node/edge and verify availability.
  std::map<std::string, std::int64_t> node_dec;
  std::map<std::pair<std::string, std::string>, std::int64_t> edge_dec;
  for (const std::string& a : t) node_dec[a] += multiplicity;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    edge_dec[{t[i], t[i + 1]}] += multiplicity;
  }
  for (const auto& [label, dec] : node_dec) {
    if (g.node_count(label) < dec) {
      throw ContractError("remove_variant: node \"" + label + "\" count would go below zero");
    }
  }
  for (const auto& [edge, dec] : edge_dec) {
    if (g.edge_count(edge.first, edge.second) < dec) {
      throw ContractError("remove_variant: edge \"" + edge.first + "\" -> \"" + edge.second +
                          "\" count would go below zero");
    }
  }

  for (const auto& [label, dec] : node_dec) {
    auto it = g.node_counts.find(label);
    it->second -= dec;
    if (it->second == 0) g.node_counts.erase(it);
  }
  for (const auto& [edge, dec] : edge_dec) {
    auto it = g.out_edges.find(edge.first);
    auto jt = it->second.find(edge.second);
    jt->second -= dec;
    if (jt->second == 0) it->second.erase(jt);
    if (it->second.empty()) g.out_edges.erase(it);
  }
}

// Discovers the DFG of a list of augmented (trace, multiplicity) variants by
// plain counting of activities and adjacent pairs.
inline Dfg build_dfg(const std::vector<std::pair<Trace, std::int64_t>>& variants) {
  Dfg g;
  for (const auto& [trace, multiplicity] : variants) add_variant(g, trace, multiplicity);
  return g;
}

inline Dfg build_dfg(const VariantLog& log) {
  Dfg g;
  for (const Variant& v : log.variants) add_variant(g, v.trace, v.multiplicity);
  return g;
}

// P(b | a) = c_E(a,b) / c_N(a). Absent edges give 0; an unknown source node
// is a contract error.
inline double transition_prob(const Dfg& g, const std::string& a, const std::string& b) {
  std::int64_t source = g.node_count(a);
  if (source <= 0) throw ContractError("transition_prob: unknown source node \"" + a + "\"");
  return static_cast<double>(g.edge_count(a, b)) / static_cast<double>(source);
}

namespace detail {

inline bool is_sentinel(const std::string& label) { return label == kBos || label == kEos; }

}  // namespace detail

// Present edges over maximum possible directed edges (self-loops excluded
// from the maximum). With include_sentinels=false, BOS/EOS nodes and every
// edge touching them are dropped before counting.
inline double graph_density(const Dfg& g, bool include_sentinels = true) {
  std::int64_t nodes = 0;
  for (const auto& [label, count] : g.node_counts) {
    if (include_sentinels || !detail::is_sentinel(label)) ++nodes;
  }
  if (nodes < 2) {
    throw UndefinedMetricError("graph_density: fewer than 2 nodes after sentinel filtering");
  }
  std::int64_t edges = 0;
  for (const auto& [src, targets] : g.out_edges) {
    if (!include_sentinels && detail::is_sentinel(src)) continue;
    for (const auto& [dst, count] : targets) {
      if (!include_sentinels && detail::is_sentinel(dst)) continue;
      ++edges;
    }
  }
  return static_cast<double>(edges) / (static_cast<double>(nodes) * static_cast<double>(nodes - 1));
}

// Sum over nodes of the Shannon entropy (bits) of their outgoing transition
// distributions. Nodes without outgoing edges contribute 0. The sentinel
// flag filters which nodes enter the outer sum; the per-node distributions
// themselves are kept intact (they would not normalize otherwise).
inline double graph_entropy(const Dfg& g, bool include_sentinels = true) {
  double total = 0.0;
  for (const auto& [src, targets] : g.out_edges) {
    if (!include_sentinels && detail::is_sentinel(src)) continue;
    double source_count = static_cast<double>(g.node_count(src));
    double h = 0.0;
    for (const auto& [dst, count] : targets) {
      double p = static_cast<double>(count) / source_count;
      h -= p * std::log2(p);
    }
    total += h;
  }
  return total;
}

struct DotOptions {
  bool probabilities = true;  // label edges "count (prob)" instead of "count"
};

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

// Renders the graph as a GraphViz digraph. Sentinel nodes are drawn as gray
// circles labelled BOS/EOS, activities as boxes. Probabilities use 3
// decimals.
inline std::string to_dot(const Dfg& g, const DotOptions& options = {}) {
  std::ostringstream os;
  os << "digraph dfg {\n";
  os << "  rankdir=LR;\n";
  for (const auto& [label, count] : g.node_counts) {
    os << "  \"" << detail::dot_escape(label) << "\" [";
    if (detail::is_sentinel(label)) {
      os << "shape=circle, style=filled, fillcolor=gray85, label=\""
         << (label == kBos ? "BOS" : "EOS") << "\"";
    } else {
      os << "shape=box, label=\"" << detail::dot_escape(label) << "\\n" << count << "\"";
    }
    os << "];\n";
  }
  for (const auto& [src, targets] : g.out_edges) {
    for (const auto& [dst, count] : targets) {
      os << "  \"" << detail::dot_escape(src) << "\" -> \"" << detail::dot_escape(dst)
         << "\" [label=\"" << count;
      if (options.probabilities) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", transition_prob(g, src, dst));
        os << " (" << buf << ")";
      }
      os << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

// Structural invariant check used by tests and fuzzing: edge endpoints are
// counted nodes, outgoing counts sum to the source count for non-EOS nodes,
// EOS never emits, BOS never receives, and no zero entries exist.
inline void check_dfg_invariants(const Dfg& g) {
  for (const auto& [label, count] : g.node_counts) {
    if (count <= 0) throw ContractError("dfg invariant: node \"" + label + "\" has count <= 0");
  }
  std::map<std::string, std::int64_t> outflow;
  for (const auto& [src, targets] : g.out_edges) {
    if (src == kEos) throw ContractError("dfg invariant: EOS has outgoing edges");
    if (targets.empty()) throw ContractError("dfg invariant: empty adjacency for \"" + src + "\"");
    for (const auto& [dst, count] : targets) {
      if (count <= 0) {
        throw ContractError("dfg invariant: edge \"" + src + "\" -> \"" + dst + "\" count <= 0");
      }
      if (dst == kBos) throw ContractError("dfg invariant: BOS has incoming edges");
      if (g.node_count(src) < 1 || g.node_count(dst) < 1) {
        throw ContractError("dfg invariant: edge endpoint missing from node counts");
      }
      outflow[src] += count;
    }
  }
  for (const auto& [src, flow] : outflow) {
    if (flow != g.node_count(src)) {
      throw ContractError("dfg invariant: outflow of \"" + src + "\" does not match node count");
    }
  }
}

}  // namespace entroclust
