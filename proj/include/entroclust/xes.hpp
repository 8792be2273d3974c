#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "entroclust/errors.hpp"
#include "entroclust/event_log.hpp"
#include "entroclust/timeparse.hpp"

namespace entroclust {

namespace detail {

inline std::optional<std::string> xes_attr(const boost::property_tree::ptree& element,
                                           const std::string& tag, const std::string& key) {
  for (const auto& [name, child] : element) {
    if (name != tag) continue;
    auto k = child.get_optional<std::string>("<xmlattr>.key");
    if (k && *k == key) {
      auto v = child.get_optional<std::string>("<xmlattr>.value");
      if (v) return *v;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Reads the XES subset needed here: log -> trace -> event, with concept:name
// string attributes and optional time:timestamp dates. All other attributes
// are ignored. Within one trace, timestamps become the order key only when
// every event carries one; otherwise document order is kept.
inline std::vector<Event> parse_xes(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("XES: malformed markup at line " + std::to_string(e.line()) + ": " +
                     e.message());
  }
  auto log = tree.get_child_optional("log");
  if (!log) throw ParseError("XES: missing <log> root element");

  std::vector<Event> events;
  std::int64_t trace_index = 0;
  for (const auto& [name, trace_el] : *log) {
    if (name != "trace") continue;
    std::string case_id;
    if (auto cn = detail::xes_attr(trace_el, "string", "concept:name")) {
      case_id = *cn;
    } else {
      case_id = "trace@" + std::to_string(trace_index);
    }

    struct Raw {
      std::string activity;
      std::optional<std::int64_t> timestamp;
    };
    std::vector<Raw> raw;
    for (const auto& [child_name, event_el] : trace_el) {
      if (child_name != "event") continue;
      auto activity = detail::xes_attr(event_el, "string", "concept:name");
      if (!activity) {
        throw ParseError("XES: event without concept:name in trace \"" + case_id + "\"");
      }
      Raw r;
      r.activity = *activity;
      if (auto ts = detail::xes_attr(event_el, "date", "time:timestamp")) {
        r.timestamp = parse_rfc3339_micros(*ts);
      }
      raw.push_back(std::move(r));
    }

    bool all_timestamped = !raw.empty();
    for (const Raw& r : raw) {
      if (!r.timestamp) all_timestamped = false;
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      Event e;
      e.case_id = case_id;
      e.activity = std::move(raw[i].activity);
      e.order_key = all_timestamped ? *raw[i].timestamp : static_cast<std::int64_t>(i);
      events.push_back(std::move(e));
    }
    ++trace_index;
  }
  return events;
}

}  // namespace entroclust
