#pragma once

// Shared fixtures and independent oracles for the test suite. Oracles
// deliberately recompute results from first principles (naive probability
// products, brute-force counting, textbook special-function expansions)
// instead of reusing library code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "entroclust/core.hpp"

namespace testutil {

using entroclust::Dfg;
using entroclust::Rng;
using entroclust::Trace;
using entroclust::Variant;
using entroclust::VariantLog;

// --- fixtures -------------------------------------------------------------

// Builds an augmented trace from bare labels.
inline Trace aug(const std::vector<std::string>& labels) {
  Trace t;
  t.reserve(labels.size() + 2);
  t.push_back(entroclust::kBos);
  t.insert(t.end(), labels.begin(), labels.end());
  t.push_back(entroclust::kEos);
  return t;
}

// Hand-builds a canonical VariantLog from (bare trace, multiplicity) pairs,
// mirroring the documented ordering rules without going through ingestion.
inline VariantLog make_log(const std::vector<std::pair<std::vector<std::string>, std::int64_t>>& spec_pairs) {
  VariantLog log;
  std::int64_t case_cursor = 0;
  for (const auto& [labels, multiplicity] : spec_pairs) {
    Variant v;
    v.trace = aug(labels);
    v.multiplicity = multiplicity;
    v.first_seen_index = case_cursor;
    case_cursor += multiplicity;
    for (const std::string& a : labels) log.vocabulary.insert(a);
    log.variants.push_back(std::move(v));
  }
  log.total_cases = case_cursor;
  std::stable_sort(log.variants.begin(), log.variants.end(),
                   [](const Variant& a, const Variant& b) {
                     if (a.multiplicity != b.multiplicity) return a.multiplicity > b.multiplicity;
                     return a.first_seen_index < b.first_seen_index;
                   });
  return log;
}

// --- naive entropic-relevance oracle --------------------------------------

// Probability of one trace as a plain product of count ratios, reading the
// integer counts straight out of the maps.
inline double naive_trace_prob(const Trace& t, const Dfg& g, const Dfg* overlay = nullptr) {
  double p = 1.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    double edge = static_cast<double>(g.edge_count(t[i], t[i + 1]));
    double node = static_cast<double>(g.node_count(t[i]));
    if (overlay != nullptr) {
      edge += static_cast<double>(overlay->edge_count(t[i], t[i + 1]));
      node += static_cast<double>(overlay->node_count(t[i]));
    }
    p *= edge / node;
  }
  return p;
}

inline double naive_trace_er(const Trace& t, const Dfg& g, const Dfg* overlay = nullptr) {
  double p = naive_trace_prob(t, g, overlay);
  if (p <= 0.0) throw std::runtime_error("naive_trace_er: non-fitting trace");
  return -std::log2(std::max(p, 1e-10));
}

inline double naive_average_er(const VariantLog& log, const Dfg& g) {
  double total = 0.0;
  std::int64_t cases = 0;
  for (const Variant& v : log.variants) {
    total += static_cast<double>(v.multiplicity) * naive_trace_er(v.trace, g);
    cases += v.multiplicity;
  }
  return cases > 0 ? total / static_cast<double>(cases) : 0.0;
}

// --- random generators ----------------------------------------------------

inline std::vector<std::string> small_alphabet(std::size_t n) {
  std::vector<std::string> a;
  for (std::size_t i = 0; i < n; ++i) a.push_back(std::string(1, static_cast<char>('A' + i)));
  return a;
}

// Random variant log: up to max_variants distinct traces (repeats allowed
// inside a trace, so loops occur), multiplicities 1..5.
inline VariantLog random_log(Rng& rng, std::size_t max_activities = 8,
                             std::size_t max_variants = 10, std::size_t max_length = 12) {
  const std::vector<std::string> alphabet =
      small_alphabet(1 + entroclust::uniform_index(rng, max_activities));
  const std::size_t target = 1 + entroclust::uniform_index(rng, max_variants);
  std::set<std::vector<std::string>> seen;
  std::vector<std::pair<std::vector<std::string>, std::int64_t>> variants;
  for (int attempt = 0; attempt < 400 && variants.size() < target; ++attempt) {
    std::size_t len = entroclust::uniform_index(rng, max_length + 1);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < len; ++i) {
      labels.push_back(alphabet[entroclust::uniform_index(rng, alphabet.size())]);
    }
    if (!seen.insert(labels).second) continue;
    variants.emplace_back(std::move(labels),
                          static_cast<std::int64_t>(1 + entroclust::uniform_index(rng, 5)));
  }
  return make_log(variants);
}

// A trace without repeated activities: a random-length prefix of a shuffled
// label pool.
inline Trace random_loop_free_trace(Rng& rng, std::size_t max_length = 12) {
  std::vector<std::string> pool;
  for (char c = 'a'; c <= 'z'; ++c) pool.push_back(std::string("act_") + c);
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[entroclust::uniform_index(rng, i)]);
  }
  pool.resize(entroclust::uniform_index(rng, max_length + 1));
  return aug(pool);
}

// --- chi-square oracle ----------------------------------------------------

// Regularized upper incomplete gamma Q(a, x) via the textbook series /
// continued-fraction split, independent of the library's implementation.
inline double gamma_q_oracle(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q_oracle: bad arguments");
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi_square_upper_oracle(double x, double df) {
  return gamma_q_oracle(df / 2.0, x / 2.0);
}

// --- DOT grammar check ----------------------------------------------------

// Minimal DOT checker: one digraph block whose statements are node lines,
// edge lines, or graph attributes. Returns an empty string when the text
// parses, else a description of the first offending line.
inline std::string check_dot_grammar(const std::string& text) {
  static const std::regex node_re(
      R"(^\s*"(?:[^"\\]|\\.)*"\s*\[[^\]]*\];\s*$)");
  static const std::regex edge_re(
      R"(^\s*"(?:[^"\\]|\\.)*"\s*->\s*"(?:[^"\\]|\\.)*"\s*\[[^\]]*\];\s*$)");
  static const std::regex attr_re(R"(^\s*\w+\s*=\s*\w+;\s*$)");
  std::istringstream in(text);
  std::string line;
  bool opened = false;
  bool closed = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("//", 0) == 0) continue;
    if (closed) return "content after closing brace: " + line;
    if (!opened) {
      if (line != "digraph dfg {") return "missing digraph header, got: " + line;
      opened = true;
      continue;
    }
    if (line == "}") {
      closed = true;
      continue;
    }
    if (!std::regex_match(line, node_re) && !std::regex_match(line, edge_re) &&
        !std::regex_match(line, attr_re)) {
      return "unrecognized statement: " + line;
    }
  }
  if (!opened) return "no digraph block found";
  if (!closed) return "digraph block never closed";
  return "";
}

// --- scratch directories --------------------------------------------------

inline std::filesystem::path make_temp_dir(const std::string& hint) {
  static int counter = 0;
  std::filesystem::path dir = std::filesystem::temp_directory_path() /
                              ("entroclust_" + hint + "_" + std::to_string(::getpid()) + "_" +
                               std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
