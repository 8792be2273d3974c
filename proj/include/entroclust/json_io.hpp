#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entroclust/clustering.hpp"
#include "entroclust/csv.hpp"
#include "entroclust/dfg.hpp"
#include "entroclust/errors.hpp"
#include "entroclust/evaluation.hpp"
#include "entroclust/event_log.hpp"
#include "entroclust/relevance.hpp"

namespace entroclust {

using Json = nlohmann::ordered_json;

// Ordered key/value pairs describing the run configuration. Echoed into
// every artifact: as a "config" object in JSON files, as a leading "#"
// comment in CSV files and "//" in DOT files.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

inline Json config_to_json(const ConfigEcho& config) {
  Json j = Json::object();
  for (const auto& [key, value] : config) j[key] = value;
  return j;
}

inline std::string config_comment(const ConfigEcho& config, const std::string& prefix) {
  std::string line = prefix;
  for (std::size_t i = 0; i < config.size(); ++i) {
    if (i > 0) line += ' ';
    line += config[i].first + '=' + config[i].second;
  }
  line += '\n';
  return line;
}

namespace detail {

// Shortest round-trip decimal form of a double (what the JSON serializer
// emits), reused for CSV cells so both formats agree byte-for-byte.
inline std::string format_double(double x) { return Json(x).dump(); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace detail

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw Error("failed writing file: " + path);
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Variant-log JSON: traces are stored without sentinels and augmented on load.

inline Json variant_log_to_json(const VariantLog& log) {
  Json j;
  Json variants = Json::array();
  for (const Variant& v : log.variants) {
    require_augmented(v.trace, "variant_log_to_json");
    Json trace = Json::array();
    for (std::size_t i = 1; i + 1 < v.trace.size(); ++i) trace.push_back(v.trace[i]);
    variants.push_back(Json{{"trace", std::move(trace)}, {"multiplicity", v.multiplicity}});
  }
  j["variants"] = std::move(variants);
  j["total_cases"] = log.total_cases;
  return j;
}

inline VariantLog variant_log_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("variants") || !j["variants"].is_array()) {
    throw ParseError("variant log JSON: missing \"variants\" array");
  }
  if (!j.contains("total_cases") || !j["total_cases"].is_number_integer()) {
    throw ParseError("variant log JSON: missing integer \"total_cases\"");
  }
  VariantLog log;
  std::int64_t case_cursor = 0;
  for (std::size_t i = 0; i < j["variants"].size(); ++i) {
    const Json& entry = j["variants"][i];
    if (!entry.is_object() || !entry.contains("trace") || !entry["trace"].is_array() ||
        !entry.contains("multiplicity") || !entry["multiplicity"].is_number_integer()) {
      throw ParseError("variant log JSON: variant " + std::to_string(i) +
                       " needs a \"trace\" array and an integer \"multiplicity\"");
    }
    Variant v;
    for (const Json& label : entry["trace"]) {
      if (!label.is_string() || label.get<std::string>().empty()) {
        throw ParseError("variant log JSON: variant " + std::to_string(i) +
                         " has a non-string or empty activity label");
      }
      v.trace.push_back(label.get<std::string>());
    }
    v.multiplicity = entry["multiplicity"].get<std::int64_t>();
    if (v.multiplicity < 1) {
      throw ParseError("variant log JSON: variant " + std::to_string(i) +
                       " has multiplicity < 1");
    }
    v.first_seen_index = case_cursor;
    case_cursor += v.multiplicity;
    for (const std::string& a : v.trace) log.vocabulary.insert(a);
    log.variants.push_back(std::move(v));
  }
  log.total_cases = case_cursor;
  if (j["total_cases"].get<std::int64_t>() != case_cursor) {
    throw ParseError("variant log JSON: total_cases = " +
                     std::to_string(j["total_cases"].get<std::int64_t>()) +
                     " does not match the multiplicity sum " + std::to_string(case_cursor));
  }
  std::sort(log.variants.begin(), log.variants.end(), [](const Variant& a, const Variant& b) {
    if (a.multiplicity != b.multiplicity) return a.multiplicity > b.multiplicity;
    return a.first_seen_index < b.first_seen_index;
  });
  std::set<Trace> distinct;
  for (const Variant& v : log.variants) {
    if (!distinct.insert(v.trace).second) {
      throw ParseError("variant log JSON: duplicate trace (variants must be distinct)");
    }
  }
  return augment_bos_eos(log);
}

// ---------------------------------------------------------------------------
// DFG snapshot.

inline Json dfg_to_json(const Dfg& g) {
  Json nodes = Json::object();
  for (const auto& [label, count] : g.node_counts) nodes[label] = count;
  Json edges = Json::array();
  for (const auto& [from, targets] : g.out_edges) {
    for (const auto& [to, count] : targets) {
      edges.push_back(Json{{"from", from}, {"to", to}, {"count", count}});
    }
  }
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline Dfg dfg_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_object() ||
      !j.contains("edges") || !j["edges"].is_array()) {
    throw ParseError("DFG JSON: expected {\"nodes\": {...}, \"edges\": [...]}");
  }
  Dfg g;
  for (const auto& [label, count] : j["nodes"].items()) {
    if (!count.is_number_integer()) throw ParseError("DFG JSON: node count must be an integer");
    g.node_counts[label] = count.get<std::int64_t>();
  }
  for (const Json& edge : j["edges"]) {
    if (!edge.is_object() || !edge.contains("from") || !edge.contains("to") ||
        !edge.contains("count") || !edge["count"].is_number_integer()) {
      throw ParseError("DFG JSON: edge needs \"from\", \"to\" and integer \"count\"");
    }
    g.out_edges[edge["from"].get<std::string>()][edge["to"].get<std::string>()] =
        edge["count"].get<std::int64_t>();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Clustering artifacts.

inline Json clustering_to_json(const Clustering& c, const ConfigEcho& config = {}) {
  Json j;
  if (!config.empty()) j["config"] = config_to_json(config);
  j["method"] = c.method_tag;
  j["seed"] = c.rng_seed;
  Json clusters = Json::array();
  for (const Cluster& cl : c.clusters) {
    clusters.push_back(Json{{"variants", cl.member_indices}, {"case_count", cl.case_count}});
  }
  j["clusters"] = std::move(clusters);
  return j;
}

// Rebuilds a Clustering (including per-cluster DFGs) from its JSON form and
// the variant log it partitions.
inline Clustering clustering_from_json(const Json& j, const VariantLog& log) {
  if (!j.is_object() || !j.contains("clusters") || !j["clusters"].is_array()) {
    throw ParseError("clustering JSON: missing \"clusters\" array");
  }
  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  Clustering c;
  c.method_tag = j.value("method", std::string());
  c.rng_seed = j.value("seed", std::uint64_t{0});
  c.assignment.assign(log.variants.size(), kUnassigned);
  for (const Json& entry : j["clusters"]) {
    if (!entry.is_object() || !entry.contains("variants") || !entry["variants"].is_array()) {
      throw ParseError("clustering JSON: cluster needs a \"variants\" array");
    }
    Cluster cl;
    for (const Json& index : entry["variants"]) {
      if (!index.is_number_integer()) {
        throw ParseError("clustering JSON: variant indices must be integers");
      }
      const std::size_t v = index.get<std::size_t>();
      if (v >= log.variants.size()) {
        throw ParseError("clustering JSON: variant index " + std::to_string(v) +
                         " out of range for " + std::to_string(log.variants.size()) +
                         " variants");
      }
      if (c.assignment[v] != kUnassigned) {
        throw ParseError("clustering JSON: variant " + std::to_string(v) +
                         " appears in two clusters");
      }
      c.assignment[v] = c.clusters.size();
      cl.member_indices.push_back(v);
      add_variant(cl.dfg, log.variants[v].trace, log.variants[v].multiplicity);
      cl.case_count += log.variants[v].multiplicity;
    }
    c.clusters.push_back(std::move(cl));
  }
  for (std::size_t v = 0; v < c.assignment.size(); ++v) {
    if (c.assignment[v] == kUnassigned) {
      throw ParseError("clustering JSON: variant " + std::to_string(v) +
                       " is not assigned to any cluster");
    }
  }
  return c;
}

// Per-case assignment CSV. Cases are listed per variant in index order;
// logs ingested without case identifiers get synthetic "v<i>_case<n>" ids.
inline std::string assignments_to_csv(const Clustering& c, const VariantLog& log,
                                      const ConfigEcho& config = {}) {
  std::string out;
  if (!config.empty()) out += config_comment(config, "# ");
  out += "case_id,cluster\n";
  for (std::size_t v = 0; v < log.variants.size(); ++v) {
    const bool has_ids = v < log.case_ids.size() &&
                         static_cast<std::int64_t>(log.case_ids[v].size()) ==
                             log.variants[v].multiplicity;
    for (std::int64_t i = 0; i < log.variants[v].multiplicity; ++i) {
      const std::string case_id =
          has_ids ? log.case_ids[v][static_cast<std::size_t>(i)]
                  : "v" + std::to_string(v) + "_case" + std::to_string(i + 1);
      out += detail::csv_field(case_id) + ',' + std::to_string(c.assignment[v]) + '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metric and ranking artifacts.

inline Json metric_row_to_json(const MetricRow& row, const ConfigEcho& config = {}) {
  Json j;
  if (!config.empty()) j["config"] = config_to_json(config);
  j["method_tag"] = row.method_tag;
  j["log_name"] = row.log_name;
  j["values"] = row.values;
  return j;
}

inline Json er_report_to_json(const ErReport& report, const ConfigEcho& config = {}) {
  Json j;
  if (!config.empty()) j["config"] = config_to_json(config);
  j["average_bits"] = report.average_bits;
  j["total_bits"] = report.total_bits;
  j["clamped"] = report.clamped_count;
  Json per_variant = Json::array();
  for (const VariantCost& v : report.per_variant) {
    per_variant.push_back(Json{{"variant", v.variant_index}, {"bits", v.cost_bits}});
  }
  j["per_variant"] = std::move(per_variant);
  return j;
}

inline Json rank_report_to_json(const RankReport& report, const ConfigEcho& config = {}) {
  Json j;
  if (!config.empty()) j["config"] = config_to_json(config);
  j["metric"] = report.metric;
  Json avg = Json::object();
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    avg[report.methods[i]] = report.avg_ranks[i];
  }
  j["avg_ranks"] = std::move(avg);
  j["friedman_chi2"] = report.friedman_chi2 ? Json(*report.friedman_chi2) : Json(nullptr);
  j["p_value"] = report.p_value ? Json(*report.p_value) : Json(nullptr);
  j["cd"] = report.cd ? Json(*report.cd) : Json(nullptr);
  Json pairs = Json::array();
  for (const auto& [a, b] : report.pairs_significant) {
    pairs.push_back(Json::array({a, b}));
  }
  j["pairs_significant"] = std::move(pairs);
  return j;
}

inline std::string elbow_to_csv(const std::vector<ElbowCell>& cells,
                                const ConfigEcho& config = {}) {
  std::string out;
  if (!config.empty()) out += config_comment(config, "# ");
  out += "method,k,er,graph_density,graph_entropy\n";
  for (const ElbowCell& cell : cells) {
    out += detail::csv_field(cell.method_tag) + ',' + std::to_string(cell.k) + ',';
    if (cell.row) {
      out += detail::format_double(cell.row->values.at("er_avg")) + ',' +
             detail::format_double(cell.row->values.at("graph_density")) + ',' +
             detail::format_double(cell.row->values.at("graph_entropy"));
    } else {
      out += ",,";  // missing cell
    }
    out += '\n';
  }
  return out;
}

struct MetricMatrix {
  std::vector<std::string> methods;
  std::vector<std::string> logs;
  std::vector<std::vector<double>> values;  // methods x logs
};

// Metric-matrix CSV: header "method,<log>,<log>,...", one row per method.
// "#" comment lines are skipped. Every cell must hold a number; a blank
// cell is rejected with a hint to drop that log's column.
inline MetricMatrix metric_matrix_from_csv(const std::string& text) {
  std::istringstream in(text);
  MetricMatrix m;
  std::vector<std::string> row;
  std::size_t line_number = 0;
  bool saw_header = false;
  while (true) {
    ++line_number;
    if (!detail::read_csv_row(in, ',', &row)) break;
    if (row.empty() || (row.size() == 1 && row[0].empty())) continue;
    if (!row[0].empty() && row[0][0] == '#') continue;
    if (!saw_header) {
      if (row.size() < 2) {
        throw ParseError("metric matrix CSV: header needs a method column and >= 1 log column");
      }
      m.logs.assign(row.begin() + 1, row.end());
      saw_header = true;
      continue;
    }
    if (row.size() != m.logs.size() + 1) {
      throw ParseError("metric matrix CSV: line " + std::to_string(line_number) + " has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(m.logs.size() + 1));
    }
    m.methods.push_back(row[0]);
    std::vector<double> values;
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].empty()) {
        throw ParseError("metric matrix CSV: missing value for method \"" + row[0] +
                         "\", log \"" + m.logs[i - 1] +
                         "\" — drop that log's column and rerun on the subset");
      }
      try {
        std::size_t consumed = 0;
        values.push_back(std::stod(row[i], &consumed));
        if (consumed != row[i].size()) throw std::invalid_argument(row[i]);
      } catch (const std::exception&) {
        throw ParseError("metric matrix CSV: line " + std::to_string(line_number) +
                         ": \"" + row[i] + "\" is not a number");
      }
    }
    m.values.push_back(std::move(values));
  }
  if (!saw_header || m.methods.empty()) {
    throw ParseError("metric matrix CSV: no data rows found");
  }
  return m;
}

inline std::string json_file_text(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace entroclust
