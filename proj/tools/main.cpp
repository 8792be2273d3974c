// entroclust: trace clustering for event logs by entropic relevance
// minimization, with elbow sweeps and nonparametric method ranking.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entroclust/core.hpp"

namespace {

namespace ec = entroclust;
namespace fs = std::filesystem;

struct InputOptions {
  std::string path;
  std::string format = "csv";
  std::string case_col = "case";
  std::string activity_col = "activity";
  std::string order_col = "ts";
  std::string order_kind = "timestamp";
  std::string delimiter = ",";
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.path, "Input event log")->required();
  cmd->add_option("--format", in.format, "Input format")
      ->check(CLI::IsMember({"csv", "xes", "variants-json"}));
  cmd->add_option("--case-col", in.case_col, "CSV column holding the case id");
  cmd->add_option("--activity-col", in.activity_col, "CSV column holding the activity label");
  cmd->add_option("--order-col", in.order_col, "CSV column holding the event order key");
  cmd->add_option("--order-kind", in.order_kind, "How to read the order column")
      ->check(CLI::IsMember({"timestamp", "index"}));
  cmd->add_option("--delimiter", in.delimiter, "CSV field delimiter")
      ->check(CLI::TypeValidator<std::string>());
}

ec::VariantLog load_log(const InputOptions& in) {
  const std::string text = ec::read_text_file(in.path);
  if (in.format == "variants-json") {
    return ec::variant_log_from_json(ec::parse_json(text, in.path));
  }
  std::istringstream stream(text);
  std::vector<ec::Event> events;
  if (in.format == "xes") {
    events = ec::parse_xes(stream);
  } else {
    if (in.delimiter.size() != 1) {
      throw ec::ArgumentError("--delimiter must be a single character");
    }
    ec::CsvConfig config;
    config.case_column = in.case_col;
    config.activity_column = in.activity_col;
    config.order_column = in.order_col;
    config.order_kind =
        in.order_kind == "index" ? ec::OrderKind::kIndex : ec::OrderKind::kTimestamp;
    config.delimiter = in.delimiter[0];
    events = ec::parse_csv(stream, config);
  }
  return ec::augment_bos_eos(ec::to_variant_log(events));
}

void echo_input(ec::ConfigEcho& config, const InputOptions& in) {
  config.emplace_back("input", in.path);
  config.emplace_back("format", in.format);
  if (in.format == "csv") {
    config.emplace_back("case_col", in.case_col);
    config.emplace_back("activity_col", in.activity_col);
    config.emplace_back("order_col", in.order_col);
    config.emplace_back("order_kind", in.order_kind);
    config.emplace_back("delimiter", in.delimiter);
  }
}

std::string bool_word(bool b) { return b ? "true" : "false"; }

ec::Method parse_method(const std::string& name) {
  if (name == "ec") return ec::Method::kEc;
  if (name == "ec-split") return ec::Method::kEcSplit;
  if (name == "random") return ec::Method::kRandom;
  if (name == "freq-kmeans") return ec::Method::kFreqKmeans;
  throw ec::ArgumentError("unknown method: " + name);
}

ec::InitStrategy parse_init(const std::string& name) {
  if (name == "random") return ec::InitStrategy::kRandom;
  if (name == "pp") return ec::InitStrategy::kPlusPlus;
  if (name == "ppnorm") return ec::InitStrategy::kPlusPlusNorm;
  throw ec::ArgumentError("unknown init strategy: " + name);
}

bool takes_init(ec::Method m) { return m == ec::Method::kEc || m == ec::Method::kEcSplit; }

std::pair<std::size_t, std::size_t> parse_k_range(const std::string& range) {
  const std::size_t dots = range.find("..");
  std::size_t lo = 0;
  std::size_t hi = 0;
  try {
    if (dots == std::string::npos) throw std::invalid_argument(range);
    std::size_t consumed = 0;
    lo = std::stoul(range.substr(0, dots), &consumed);
    if (consumed != dots) throw std::invalid_argument(range);
    const std::string rest = range.substr(dots + 2);
    hi = std::stoul(rest, &consumed);
    if (consumed != rest.size()) throw std::invalid_argument(range);
  } catch (const std::exception&) {
    throw ec::ArgumentError("--k-range must look like a..b with integers a <= b, got \"" +
                            range + "\"");
  }
  if (lo < 1 || lo > hi) {
    throw ec::ArgumentError("--k-range must satisfy 1 <= a <= b, got \"" + range + "\"");
  }
  return {lo, hi};
}

std::string fixed3(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3f", x);
  return buffer;
}

void write_artifact(const fs::path& out_dir, const std::string& name,
                    const std::string& content) {
  ec::write_text_file((out_dir / name).string(), content);
}

// --- cluster -----------------------------------------------------------

struct ClusterArgs {
  InputOptions in;
  std::string method = "ec";
  std::string init = "pp";
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::string out = ".";
  bool include_sentinels = true;
  int threads = 1;
  bool init_given = false;
};

int cmd_cluster(const ClusterArgs& args) {
  const ec::Method method = parse_method(args.method);
  if (args.init_given && !takes_init(method)) {
    throw ec::ArgumentError("--init applies only to methods ec and ec-split");
  }
  const ec::InitStrategy init = parse_init(args.init);
  ec::VariantLog log = load_log(args.in);

  ec::Clustering clustering =
      ec::run_method(log, method, init, args.k, args.seed, args.threads);
  ec::MetricRow metrics = ec::weighted_metrics(clustering, log, args.include_sentinels,
                                               fs::path(args.in.path).stem().string());

  ec::ConfigEcho config;
  config.emplace_back("command", "cluster");
  echo_input(config, args.in);
  config.emplace_back("method", args.method);
  if (takes_init(method)) config.emplace_back("init", args.init);
  config.emplace_back("k", std::to_string(args.k));
  config.emplace_back("seed", std::to_string(args.seed));
  config.emplace_back("include_sentinels", bool_word(args.include_sentinels));

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  write_artifact(out_dir, "clustering.json",
                 ec::json_file_text(ec::clustering_to_json(clustering, config)));
  write_artifact(out_dir, "assignments.csv", ec::assignments_to_csv(clustering, log, config));
  write_artifact(out_dir, "metrics.json",
                 ec::json_file_text(ec::metric_row_to_json(metrics, config)));
  for (std::size_t j = 0; j < clustering.clusters.size(); ++j) {
    write_artifact(out_dir, "cluster_" + std::to_string(j) + ".dot",
                   ec::config_comment(config, "// ") +
                       ec::to_dot(clustering.clusters[j].dfg));
  }

  for (std::size_t j = 0; j < clustering.clusters.size(); ++j) {
    const ec::Cluster& cl = clustering.clusters[j];
    double bits = 0.0;
    for (std::size_t v : cl.member_indices) {
      bits += static_cast<double>(log.variants[v].multiplicity) *
              ec::trace_er(log.variants[v].trace, cl.dfg);
    }
    std::cout << "cluster " << j << ": " << cl.case_count << " cases, "
              << cl.member_indices.size() << " variants, avg ER "
              << fixed3(bits / static_cast<double>(cl.case_count)) << " bits\n";
  }
  return 0;
}

// --- elbow -------------------------------------------------------------

struct ElbowArgs {
  InputOptions in;
  std::vector<std::string> methods = {"ec"};
  std::string init = "pp";
  std::string k_range = "1..5";
  std::uint64_t seed = 0;
  std::string out = ".";
  bool include_sentinels = true;
  int threads = 1;
  bool init_given = false;
};

int cmd_elbow(const ElbowArgs& args) {
  const auto [lo, hi] = parse_k_range(args.k_range);
  std::vector<ec::SweepMethod> methods;
  bool any_takes_init = false;
  for (const std::string& name : args.methods) {
    ec::SweepMethod m;
    m.method = parse_method(name);
    m.init = parse_init(args.init);
    any_takes_init = any_takes_init || takes_init(m.method);
    methods.push_back(m);
  }
  if (args.init_given && !any_takes_init) {
    throw ec::ArgumentError("--init applies only to methods ec and ec-split");
  }
  ec::VariantLog log = load_log(args.in);
  std::vector<std::size_t> k_values;
  for (std::size_t k = lo; k <= hi; ++k) k_values.push_back(k);

  std::vector<ec::ElbowCell> cells = ec::elbow_sweep(log, k_values, methods, args.seed,
                                                     args.include_sentinels, args.threads);

  ec::ConfigEcho config;
  config.emplace_back("command", "elbow");
  echo_input(config, args.in);
  std::string joined;
  for (std::size_t i = 0; i < args.methods.size(); ++i) {
    if (i > 0) joined += ',';
    joined += args.methods[i];
  }
  config.emplace_back("methods", joined);
  if (any_takes_init) config.emplace_back("init", args.init);
  config.emplace_back("k_range", args.k_range);
  config.emplace_back("seed", std::to_string(args.seed));
  config.emplace_back("include_sentinels", bool_word(args.include_sentinels));

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  write_artifact(out_dir, "elbow.csv", ec::elbow_to_csv(cells, config));

  std::size_t produced = 0;
  for (const ec::ElbowCell& cell : cells) {
    if (cell.row) ++produced;
  }
  std::cout << "elbow: " << produced << "/" << cells.size() << " cells written to "
            << (out_dir / "elbow.csv").string() << "\n";
  return 0;
}

// --- rank --------------------------------------------------------------

struct RankArgs {
  std::string input;
  std::string metric = "er";
  std::string direction = "lower";
  std::string out = ".";
};

int cmd_rank(const RankArgs& args) {
  const ec::MetricMatrix matrix = ec::metric_matrix_from_csv(ec::read_text_file(args.input));
  const bool lower = args.direction == "lower";
  const ec::RankReport report =
      ec::rank_report(args.metric, matrix.methods, matrix.logs, matrix.values, lower);

  ec::ConfigEcho config;
  config.emplace_back("command", "rank");
  config.emplace_back("input", args.input);
  config.emplace_back("metric", args.metric);
  config.emplace_back("direction", args.direction);

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  write_artifact(out_dir, "rank_report.json",
                 ec::json_file_text(ec::rank_report_to_json(report, config)));

  if (report.friedman_chi2) {
    std::cout << "rank: " << matrix.methods.size() << " methods x " << matrix.logs.size()
              << " logs, Friedman chi2 " << fixed3(*report.friedman_chi2) << ", p "
              << (*report.p_value < 0.001 ? std::string("< 0.001") : fixed3(*report.p_value))
              << ", CD " << fixed3(report.cd.value_or(0.0)) << "\n";
  } else {
    std::cout << "rank: " << matrix.methods.size() << " methods x " << matrix.logs.size()
              << " logs, Friedman test skipped (needs >= 2 methods and >= 2 logs)\n";
  }
  return 0;
}

// --- export-dfg --------------------------------------------------------

struct ExportArgs {
  InputOptions in;
  std::string clustering_path;
  std::vector<std::size_t> cluster_ids;
  std::string out = ".";
};

int cmd_export_dfg(const ExportArgs& args) {
  ec::VariantLog log = load_log(args.in);

  ec::ConfigEcho config;
  config.emplace_back("command", "export-dfg");
  echo_input(config, args.in);

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);

  if (args.clustering_path.empty()) {
    if (!args.cluster_ids.empty()) {
      throw ec::ArgumentError("--cluster requires --clustering");
    }
    ec::Dfg full = ec::build_dfg(log);
    write_artifact(out_dir, "dfg_full.dot",
                   ec::config_comment(config, "// ") + ec::to_dot(full));
    std::cout << "export-dfg: wrote " << (out_dir / "dfg_full.dot").string() << "\n";
    return 0;
  }

  config.emplace_back("clustering", args.clustering_path);
  const ec::Clustering clustering = ec::clustering_from_json(
      ec::parse_json(ec::read_text_file(args.clustering_path), args.clustering_path), log);
  std::vector<std::size_t> ids = args.cluster_ids;
  if (ids.empty()) {
    for (std::size_t j = 0; j < clustering.clusters.size(); ++j) ids.push_back(j);
  }
  for (std::size_t id : ids) {
    if (id >= clustering.clusters.size()) {
      throw ec::ArgumentError("unknown cluster id " + std::to_string(id) + " (clustering has " +
                              std::to_string(clustering.clusters.size()) + " clusters)");
    }
    write_artifact(out_dir, "dfg_cluster_" + std::to_string(id) + ".dot",
                   ec::config_comment(config, "// ") +
                       ec::to_dot(clustering.clusters[id].dfg));
  }
  std::cout << "export-dfg: wrote " << ids.size() << " file(s) to " << out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace clustering by entropic relevance minimization"};
  app.require_subcommand(1);

  ClusterArgs cluster_args;
  CLI::App* cluster = app.add_subcommand("cluster", "Partition an event log into k clusters");
  add_input_options(cluster, cluster_args.in);
  cluster->add_option("--method", cluster_args.method, "Clustering method")
      ->check(CLI::IsMember({"ec", "ec-split", "random", "freq-kmeans"}));
  CLI::Option* cluster_init =
      cluster->add_option("--init", cluster_args.init, "Seed strategy for ec / ec-split")
          ->check(CLI::IsMember({"random", "pp", "ppnorm"}));
  cluster->add_option("-k,--k", cluster_args.k, "Number of clusters")
      ->check(CLI::PositiveNumber);
  cluster->add_option("--seed", cluster_args.seed, "RNG seed");
  cluster->add_option("--out", cluster_args.out, "Output directory");
  cluster->add_option("--include-sentinels", cluster_args.include_sentinels,
                      "Count BOS/EOS in graph density/entropy");
  cluster->add_option("--threads", cluster_args.threads, "Worker threads (no output effect)");

  ElbowArgs elbow_args;
  CLI::App* elbow = app.add_subcommand("elbow", "Sweep k and tabulate ER/density/entropy");
  add_input_options(elbow, elbow_args.in);
  elbow->add_option("--method", elbow_args.methods, "Methods to sweep (repeatable)")
      ->check(CLI::IsMember({"ec", "ec-split", "random", "freq-kmeans"}));
  CLI::Option* elbow_init =
      elbow->add_option("--init", elbow_args.init, "Seed strategy for ec / ec-split")
          ->check(CLI::IsMember({"random", "pp", "ppnorm"}));
  elbow->add_option("--k-range", elbow_args.k_range, "Cluster counts to sweep, as a..b");
  elbow->add_option("--seed", elbow_args.seed, "RNG seed");
  elbow->add_option("--out", elbow_args.out, "Output directory");
  elbow->add_option("--include-sentinels", elbow_args.include_sentinels,
                    "Count BOS/EOS in graph density/entropy");
  elbow->add_option("--threads", elbow_args.threads, "Worker threads (no output effect)");

  RankArgs rank_args;
  CLI::App* rank = app.add_subcommand("rank", "Rank methods from a metric-matrix CSV");
  rank->add_option("--input", rank_args.input, "Metric matrix CSV (method,log1,log2,...)")
      ->required();
  rank->add_option("--metric", rank_args.metric, "Metric name for the report");
  rank->add_option("--direction", rank_args.direction, "Whether lower values are better")
      ->check(CLI::IsMember({"lower", "higher"}));
  rank->add_option("--out", rank_args.out, "Output directory");

  ExportArgs export_args;
  CLI::App* export_dfg = app.add_subcommand("export-dfg", "Render DFGs as DOT");
  add_input_options(export_dfg, export_args.in);
  export_dfg->add_option("--clustering", export_args.clustering_path,
                         "clustering.json from a cluster run");
  export_dfg->add_option("--cluster", export_args.cluster_ids,
                         "Cluster ids to export (default: all)");
  export_dfg->add_option("--out", export_args.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    cluster_args.init_given = cluster_init->count() > 0;
    elbow_args.init_given = elbow_init->count() > 0;
    if (cluster->parsed()) return cmd_cluster(cluster_args);
    if (elbow->parsed()) return cmd_elbow(elbow_args);
    if (rank->parsed()) return cmd_rank(rank_args);
    if (export_dfg->parsed()) return cmd_export_dfg(export_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
