#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "entroclust/errors.hpp"
#include "entroclust/event_log.hpp"
#include "entroclust/timeparse.hpp"

namespace entroclust {

enum class OrderKind { kTimestamp, kIndex };

// Column mapping for CSV ingestion. The header row is mandatory.
struct CsvConfig {
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::string order_column = "ts";
  OrderKind order_kind = OrderKind::kTimestamp;
  char delimiter = ',';
};

namespace detail {

// RFC-4180-ish row reader: quoted fields, doubled quotes, CR/LF endings.
// Returns false on end of input.
inline bool read_csv_row(std::istream& in, char delim, std::vector<std::string>* fields) {
  fields->clear();
  int c = in.get();
  if (c == std::istream::traits_type::eof()) return false;
  std::string field;
  bool quoted = false;
  while (true) {
    if (c == std::istream::traits_type::eof()) {
      fields->push_back(field);
      return true;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == delim) {
      fields->push_back(field);
      field.clear();
    } else if (ch == '\n') {
      fields->push_back(field);
      return true;
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      fields->push_back(field);
      return true;
    } else {
      field.push_back(ch);
    }
    c = in.get();
  }
}

}  // namespace detail

// Reads a delimited event table into Events, one per data row, preserving
// file order so later stable sorting keeps equal order keys in row order.
inline std::vector<Event> parse_csv(std::istream& in, const CsvConfig& config) {
  std::vector<std::string> row;
  if (!detail::read_csv_row(in, config.delimiter, &row)) {
    throw ParseError("CSV: empty input, header row required");
  }
  long case_col = -1, act_col = -1, order_col = -1;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] == config.case_column) case_col = static_cast<long>(i);
    if (row[i] == config.activity_column) act_col = static_cast<long>(i);
    if (row[i] == config.order_column) order_col = static_cast<long>(i);
  }
  if (case_col < 0) throw ParseError("CSV: missing column \"" + config.case_column + "\"");
  if (act_col < 0) throw ParseError("CSV: missing column \"" + config.activity_column + "\"");
  if (order_col < 0) throw ParseError("CSV: missing column \"" + config.order_column + "\"");

  std::vector<Event> events;
  std::int64_t row_number = 1;  // header was row 1
  while (detail::read_csv_row(in, config.delimiter, &row)) {
    ++row_number;
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    auto field = [&](long col) -> const std::string& {
      if (static_cast<std::size_t>(col) >= row.size()) {
        throw ParseError("CSV row " + std::to_string(row_number) + ": too few fields");
      }
      return row[static_cast<std::size_t>(col)];
    };
    Event e;
    e.case_id = field(case_col);
    e.activity = field(act_col);
    if (e.activity.empty()) {
      throw ParseError("CSV row " + std::to_string(row_number) + ": empty activity");
    }
    const std::string& order = field(order_col);
    if (config.order_kind == OrderKind::kIndex) {
      try {
        std::size_t used = 0;
        e.order_key = std::stoll(order, &used);
        if (used != order.size()) throw std::invalid_argument(order);
      } catch (const std::exception&) {
        throw ParseError("CSV row " + std::to_string(row_number) + ": bad order index \"" +
                         order + "\"");
      }
    } else {
      try {
        e.order_key = parse_rfc3339_micros(order);
      } catch (const ParseError& err) {
        throw ParseError("CSV row " + std::to_string(row_number) + ": " + err.what());
      }
    }
    events.push_back(std::move(e));
  }
  return events;
}

}  // namespace entroclust
