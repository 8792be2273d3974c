#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "entroclust/errors.hpp"

namespace entroclust {

// Reserved sentinel activities. Prepending/appending them to every trace lets
// a directly-follows graph carry initialization and termination probabilities.
inline const std::string kBos = "__BOS__";
inline const std::string kEos = "__EOS__";

// A trace is the ordered activity sequence of one case.
using Trace = std::vector<std::string>;

// A single recorded event. order_key is an integer position or a timestamp
// converted to microseconds; ties are broken by input order.
struct Event {
  std::string case_id;
  std::string activity;
  std::int64_t order_key = 0;
};

// One distinct trace with its case count. first_seen_index is the position
// (in source-case order) of the first case exhibiting this trace.
struct Variant {
  Trace trace;
  std::int64_t multiplicity = 0;
  std::int64_t first_seen_index = 0;
};

// Multiset of traces compressed to distinct variants. Iteration order is
// deterministic: decreasing multiplicity, ties by first_seen_index.
// vocabulary never contains the sentinels. case_ids, when non-empty, holds
// the source case ids per variant (same outer order as variants).
struct VariantLog {
  std::vector<Variant> variants;
  std::set<std::string> vocabulary;
  std::int64_t total_cases = 0;
  std::vector<std::vector<std::string>> case_ids;
};

inline bool is_augmented(const Trace& t) {
  return t.size() >= 2 && t.front() == kBos && t.back() == kEos;
}

inline void require_augmented(const Trace& t, const char* who) {
  if (!is_augmented(t)) {
    throw ContractError(std::string(who) + ": trace is not BOS/EOS-augmented");
  }
}

// Groups events by case, orders each case by order_key (stable on ties) and
// folds identical traces into variants. Empty input yields an empty log.
inline VariantLog to_variant_log(const std::vector<Event>& events) {
  // Case order = order of first appearance of each case id in the input.
  std::vector<std::string> case_order;
  std::map<std::string, std::vector<std::pair<std::int64_t, const Event*>>> by_case;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    auto [it, inserted] = by_case.try_emplace(e.case_id);
    if (inserted) case_order.push_back(e.case_id);
    it->second.emplace_back(e.order_key, &e);
  }

  VariantLog log;
  std::map<Trace, std::size_t> variant_of;  // trace -> index into log.variants
  for (std::size_t case_idx = 0; case_idx < case_order.size(); ++case_idx) {
    auto& entries = by_case[case_order[case_idx]];
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Trace trace;
    trace.reserve(entries.size());
    for (const auto& [key, ev] : entries) {
      trace.push_back(ev->activity);
      log.vocabulary.insert(ev->activity);
    }
    auto it = variant_of.find(trace);
    if (it == variant_of.end()) {
      variant_of.emplace(trace, log.variants.size());
      log.variants.push_back(
          {std::move(trace), 1, static_cast<std::int64_t>(case_idx)});
      log.case_ids.push_back({case_order[case_idx]});
    } else {
      log.variants[it->second].multiplicity += 1;
      log.case_ids[it->second].push_back(case_order[case_idx]);
    }
  }
  log.total_cases = static_cast<std::int64_t>(case_order.size());

  // Canonical order: decreasing multiplicity, ties by first appearance.
  std::vector<std::size_t> perm(log.variants.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (log.variants[a].multiplicity != log.variants[b].multiplicity) {
      return log.variants[a].multiplicity > log.variants[b].multiplicity;
    }
    return log.variants[a].first_seen_index < log.variants[b].first_seen_index;
  });
  VariantLog sorted;
  sorted.vocabulary = std::move(log.vocabulary);
  sorted.total_cases = log.total_cases;
  sorted.variants.reserve(perm.size());
  sorted.case_ids.reserve(perm.size());
  for (std::size_t i : perm) {
    sorted.variants.push_back(std::move(log.variants[i]));
    sorted.case_ids.push_back(std::move(log.case_ids[i]));
  }
  return sorted;
}

// Adds BOS/EOS to every trace. A vocabulary collision with the reserved
// labels is a hard error; silently renaming would corrupt reported models.
inline VariantLog augment_bos_eos(const VariantLog& log) {
  for (const std::string& sentinel : {kBos, kEos}) {
    if (log.vocabulary.count(sentinel)) {
      throw ContractError("augment_bos_eos: activity label collides with reserved sentinel \"" +
                          sentinel + "\"");
    }
  }
  VariantLog out = log;
  for (Variant& v : out.variants) {
    Trace t;
    t.reserve(v.trace.size() + 2);
    t.push_back(kBos);
    t.insert(t.end(), v.trace.begin(), v.trace.end());
    t.push_back(kEos);
    v.trace = std::move(t);
  }
  return out;
}

// Restricts a log to the given variant indices (kept in the given order).
// first_seen_index values are inherited so tie-breaking stays globally
// consistent in recursive clustering.
inline VariantLog sub_log(const VariantLog& log, const std::vector<std::size_t>& indices) {
  VariantLog out;
  out.variants.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= log.variants.size()) {
      throw ArgumentError("sub_log: variant index out of range");
    }
    const Variant& v = log.variants[idx];
    out.variants.push_back(v);
    out.total_cases += v.multiplicity;
    for (const std::string& a : v.trace) {
      if (a != kBos && a != kEos) out.vocabulary.insert(a);
    }
    if (!log.case_ids.empty()) out.case_ids.push_back(log.case_ids[idx]);
  }
  return out;
}

}  // namespace entroclust
