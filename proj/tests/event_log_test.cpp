#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "entroclust/core.hpp"
#include "test_util.hpp"

namespace ec = entroclust;
using testutil::aug;

namespace {

std::vector<ec::Event> csv_events(const std::string& text, ec::CsvConfig config = {}) {
  std::istringstream in(text);
  return ec::parse_csv(in, config);
}

std::vector<ec::Event> xes_events(const std::string& text) {
  std::istringstream in(text);
  return ec::parse_xes(in);
}

TEST(ParseCsv, ThreeRowsBecomeThreeEvents) {
  auto events = csv_events(
      "case,activity,ts\n"
      "c1,A,2024-01-01T10:00:00Z\n"
      "c1,B,2024-01-01T10:05:00Z\n"
      "c2,A,2024-01-01T11:00:00Z\n");
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0].case_id, "c1");
  EXPECT_EQ(events[0].activity, "A");
  EXPECT_EQ(events[2].case_id, "c2");
  EXPECT_LT(events[0].order_key, events[1].order_key);
}

TEST(ParseCsv, MissingActivityColumnNamesIt) {
  try {
    csv_events("case,act,ts\nc1,A,1\n");
    FAIL() << "expected ParseError";
  } catch (const ec::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("activity"), std::string::npos);
  }
}

TEST(ParseCsv, EqualTimestampsKeepFileOrder) {
  // Both rows of c1 carry the same timestamp; the documented rule is a
  // stable sort, so the file order B-then-A must survive into the trace.
  auto events = csv_events(
      "case,activity,ts\n"
      "c1,B,2024-01-01T10:00:00Z\n"
      "c1,A,2024-01-01T10:00:00Z\n");
  ec::VariantLog log = ec::augment_bos_eos(ec::to_variant_log(events));
  ASSERT_EQ(log.variants.size(), 1u);
  EXPECT_EQ(log.variants[0].trace, aug({"B", "A"}));
}

TEST(ParseCsv, IntegerOrderKind) {
  ec::CsvConfig config;
  config.order_column = "pos";
  config.order_kind = ec::OrderKind::kIndex;
  auto events = csv_events(
      "case,activity,pos\n"
      "c1,B,2\n"
      "c1,A,1\n",
      config);
  ec::VariantLog log = ec::augment_bos_eos(ec::to_variant_log(events));
  ASSERT_EQ(log.variants.size(), 1u);
  EXPECT_EQ(log.variants[0].trace, aug({"A", "B"}));
}

TEST(ParseCsv, BadRowReportsRowNumber) {
  ec::CsvConfig config;
  config.order_kind = ec::OrderKind::kIndex;
  try {
    csv_events("case,activity,ts\nc1,A,1\nc1,B,oops\n", config);
    FAIL() << "expected ParseError";
  } catch (const ec::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
}

TEST(ParseCsv, EmptyActivityRejected) {
  ec::CsvConfig config;
  config.order_kind = ec::OrderKind::kIndex;
  EXPECT_THROW(csv_events("case,activity,ts\nc1,,1\n", config), ec::ParseError);
}

TEST(ParseCsv, QuotedFieldsAndCustomDelimiter) {
  ec::CsvConfig config;
  config.order_kind = ec::OrderKind::kIndex;
  config.delimiter = ';';
  auto events = csv_events(
      "case;activity;ts\n"
      "c1;\"check; twice\";1\n"
      "c1;\"say \"\"hi\"\"\";2\n",
      config);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].activity, "check; twice");
  EXPECT_EQ(events[1].activity, "say \"hi\"");
}

TEST(ParseXes, SingleTraceTwoEvents) {
  auto events = xes_events(
      "<log><trace>"
      "<string key=\"concept:name\" value=\"case7\"/>"
      "<event><string key=\"concept:name\" value=\"A\"/></event>"
      "<event><string key=\"concept:name\" value=\"B\"/></event>"
      "</trace></log>");
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].case_id, "case7");
  EXPECT_EQ(events[0].activity, "A");
  EXPECT_EQ(events[1].activity, "B");
  EXPECT_LT(events[0].order_key, events[1].order_key);
}

TEST(ParseXes, ZeroTraces) {
  EXPECT_TRUE(xes_events("<log></log>").empty());
}

TEST(ParseXes, TimestampsOutOfDocumentOrderAreSorted) {
  // Timestamps deliberately reversed relative to document order; the
  // oracle is a plain sort by timestamp.
  auto events = xes_events(
      "<log><trace>"
      "<string key=\"concept:name\" value=\"c\"/>"
      "<event><string key=\"concept:name\" value=\"C\"/>"
      "<date key=\"time:timestamp\" value=\"2024-01-01T10:02:00Z\"/></event>"
      "<event><string key=\"concept:name\" value=\"A\"/>"
      "<date key=\"time:timestamp\" value=\"2024-01-01T10:00:00Z\"/></event>"
      "<event><string key=\"concept:name\" value=\"B\"/>"
      "<date key=\"time:timestamp\" value=\"2024-01-01T10:01:00Z\"/></event>"
      "</trace></log>");
  ec::VariantLog log = ec::augment_bos_eos(ec::to_variant_log(events));
  ASSERT_EQ(log.variants.size(), 1u);
  EXPECT_EQ(log.variants[0].trace, aug({"A", "B", "C"}));
}

TEST(ParseXes, PartialTimestampsFallBackToDocumentOrder) {
  auto events = xes_events(
      "<log><trace>"
      "<event><string key=\"concept:name\" value=\"B\"/>"
      "<date key=\"time:timestamp\" value=\"2024-01-01T10:00:00Z\"/></event>"
      "<event><string key=\"concept:name\" value=\"A\"/></event>"
      "</trace></log>");
  ec::VariantLog log = ec::augment_bos_eos(ec::to_variant_log(events));
  ASSERT_EQ(log.variants.size(), 1u);
  EXPECT_EQ(log.variants[0].trace, aug({"B", "A"}));
}

TEST(ParseXes, EventWithoutNameIdentifiesTrace) {
  try {
    xes_events(
        "<log><trace>"
        "<string key=\"concept:name\" value=\"broken-case\"/>"
        "<event><string key=\"org:resource\" value=\"r\"/></event>"
        "</trace></log>");
    FAIL() << "expected ParseError";
  } catch (const ec::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("broken-case"), std::string::npos);
  }
}

TEST(ParseXes, MalformedMarkupReportsLocation) {
  try {
    xes_events("<log><trace><event></log>");
    FAIL() << "expected ParseError";
  } catch (const ec::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
  }
}

TEST(ToVariantLog, CountsAndOrder) {
  std::vector<ec::Event> events;
  auto add = [&](const std::string& c, const std::string& a, std::int64_t k) {
    events.push_back({c, a, k});
  };
  add("1", "A", 0);
  add("1", "B", 1);
  add("2", "A", 0);
  add("2", "B", 1);
  add("3", "A", 0);
  add("3", "C", 1);
  ec::VariantLog log = ec::to_variant_log(events);
  ASSERT_EQ(log.variants.size(), 2u);
  EXPECT_EQ(log.variants[0].trace, (ec::Trace{"A", "B"}));
  EXPECT_EQ(log.variants[0].multiplicity, 2);
  EXPECT_EQ(log.variants[1].trace, (ec::Trace{"A", "C"}));
  EXPECT_EQ(log.variants[1].multiplicity, 1);
  EXPECT_EQ(log.total_cases, 3);
  EXPECT_EQ(log.vocabulary, (std::set<std::string>{"A", "B", "C"}));
}

TEST(ToVariantLog, EmptyInput) {
  ec::VariantLog log = ec::to_variant_log({});
  EXPECT_TRUE(log.variants.empty());
  EXPECT_EQ(log.total_cases, 0);
}

TEST(ToVariantLog, TenIdenticalCases) {
  std::vector<ec::Event> events;
  for (int c = 0; c < 10; ++c) {
    events.push_back({"case" + std::to_string(c), "A", 0});
    events.push_back({"case" + std::to_string(c), "B", 1});
  }
  ec::VariantLog log = ec::to_variant_log(events);
  ASSERT_EQ(log.variants.size(), 1u);
  EXPECT_EQ(log.variants[0].multiplicity, 10);
  EXPECT_EQ(log.total_cases, 10);
}

TEST(ToVariantLog, DeterministicOrderAcrossParses) {
  // Equal multiplicities tie-break by first appearance; parse twice and
  // compare orderings.
  const std::string csv =
      "case,activity,ts\n"
      "c1,X,1\nc2,Y,1\nc3,Z,1\n";
  ec::CsvConfig config;
  config.order_kind = ec::OrderKind::kIndex;
  ec::VariantLog a = ec::to_variant_log(csv_events(csv, config));
  ec::VariantLog b = ec::to_variant_log(csv_events(csv, config));
  ASSERT_EQ(a.variants.size(), 3u);
  EXPECT_EQ(a.variants[0].trace, (ec::Trace{"X"}));
  EXPECT_EQ(a.variants[1].trace, (ec::Trace{"Y"}));
  EXPECT_EQ(a.variants[2].trace, (ec::Trace{"Z"}));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.variants[i].trace, b.variants[i].trace);
    EXPECT_EQ(a.variants[i].first_seen_index, b.variants[i].first_seen_index);
  }
}

TEST(ToVariantLog, RoundTripPreservesCaseMultiset) {
  // Expanding variants by multiplicity must reproduce the original multiset
  // of case traces.
  ec::Rng rng(2024);
  for (int round = 0; round < 20; ++round) {
    std::vector<ec::Event> events;
    std::map<ec::Trace, std::int64_t> source_multiset;
    const std::size_t cases = 1 + ec::uniform_index(rng, 12);
    for (std::size_t c = 0; c < cases; ++c) {
      ec::Trace t;
      const std::size_t len = ec::uniform_index(rng, 5);
      for (std::size_t i = 0; i < len; ++i) {
        t.push_back(std::string(1, static_cast<char>('A' + ec::uniform_index(rng, 3))));
        events.push_back({"case" + std::to_string(c), t.back(),
                          static_cast<std::int64_t>(i)});
      }
      if (t.empty()) continue;  // cases exist only if they have events
      source_multiset[t] += 1;
    }
    ec::VariantLog log = ec::to_variant_log(events);
    std::map<ec::Trace, std::int64_t> rebuilt;
    std::int64_t total = 0;
    for (const ec::Variant& v : log.variants) {
      rebuilt[v.trace] += v.multiplicity;
      total += v.multiplicity;
    }
    EXPECT_EQ(rebuilt, source_multiset);
    EXPECT_EQ(total, log.total_cases);
  }
}

TEST(Augment, BasicAndEmpty) {
  ec::VariantLog log = ec::to_variant_log({{"c1", "A", 0}, {"c1", "B", 1}});
  ec::VariantLog augmented = ec::augment_bos_eos(log);
  ASSERT_EQ(augmented.variants.size(), 1u);
  EXPECT_EQ(augmented.variants[0].trace, aug({"A", "B"}));
  EXPECT_EQ(augmented.variants[0].multiplicity, log.variants[0].multiplicity);

  ec::VariantLog empty_trace;
  empty_trace.variants.push_back({{}, 1, 0});
  empty_trace.total_cases = 1;
  ec::VariantLog out = ec::augment_bos_eos(empty_trace);
  EXPECT_EQ(out.variants[0].trace, (ec::Trace{ec::kBos, ec::kEos}));
}

TEST(Augment, SentinelCollisionIsError) {
  ec::VariantLog log = ec::to_variant_log({{"c1", ec::kBos, 0}});
  try {
    ec::augment_bos_eos(log);
    FAIL() << "expected ContractError";
  } catch (const ec::ContractError& e) {
    EXPECT_NE(std::string(e.what()).find(ec::kBos), std::string::npos);
  }
}

TEST(SubLog, KeepsFirstSeenAndCounts) {
  ec::VariantLog log = testutil::make_log({{{"A", "B"}, 3}, {{"A", "C"}, 2}, {{"B"}, 1}});
  ec::VariantLog part = ec::sub_log(log, {0, 2});
  ASSERT_EQ(part.variants.size(), 2u);
  EXPECT_EQ(part.variants[0].trace, log.variants[0].trace);
  EXPECT_EQ(part.variants[1].trace, log.variants[2].trace);
  EXPECT_EQ(part.variants[0].first_seen_index, log.variants[0].first_seen_index);
  EXPECT_EQ(part.variants[1].first_seen_index, log.variants[2].first_seen_index);
  EXPECT_EQ(part.total_cases, 4);
  EXPECT_THROW(ec::sub_log(log, {5}), ec::ArgumentError);
}

TEST(VariantLogJson, ExportImportRoundTrip) {
  ec::VariantLog log = testutil::make_log({{{"A", "B"}, 2}, {{"A", "C"}, 1}, {{}, 1}});
  ec::Json j = ec::variant_log_to_json(log);
  EXPECT_EQ(j["total_cases"], 4);
  EXPECT_EQ(j["variants"][0]["trace"], (std::vector<std::string>{"A", "B"}));
  ec::VariantLog back = ec::variant_log_from_json(j);
  ASSERT_EQ(back.variants.size(), log.variants.size());
  for (std::size_t i = 0; i < log.variants.size(); ++i) {
    EXPECT_EQ(back.variants[i].trace, log.variants[i].trace);
    EXPECT_EQ(back.variants[i].multiplicity, log.variants[i].multiplicity);
  }
  EXPECT_EQ(back.total_cases, log.total_cases);
  EXPECT_EQ(back.vocabulary, log.vocabulary);
}

TEST(VariantLogJson, RejectsBadInput) {
  EXPECT_THROW(ec::variant_log_from_json(ec::Json::parse(R"({"total_cases": 1})")),
               ec::ParseError);
  // total_cases disagreeing with the multiplicity sum
  EXPECT_THROW(ec::variant_log_from_json(ec::Json::parse(
                   R"({"variants":[{"trace":["A"],"multiplicity":2}],"total_cases":1})")),
               ec::ParseError);
  // multiplicity below one
  EXPECT_THROW(ec::variant_log_from_json(ec::Json::parse(
                   R"({"variants":[{"trace":["A"],"multiplicity":0}],"total_cases":0})")),
               ec::ParseError);
  // duplicate traces
  EXPECT_THROW(ec::variant_log_from_json(ec::Json::parse(
                   R"({"variants":[{"trace":["A"],"multiplicity":1},
                                   {"trace":["A"],"multiplicity":1}],"total_cases":2})")),
               ec::ParseError);
  // reserved sentinel used as an activity label
  EXPECT_THROW(ec::variant_log_from_json(ec::Json::parse(
                   R"({"variants":[{"trace":["__BOS__"],"multiplicity":1}],"total_cases":1})")),
               ec::ContractError);
}

}  // namespace
