#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "netexplain/netexplain.hpp"

namespace netexplain::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string manifest_path;
  std::string data_root;
  double gamma = kDefaultGamma;
  std::size_t k = kDefaultK;
  std::size_t ell = kDefaultEll;
  double epsilon = kDefaultEpsilon;
  std::size_t n_select = 100;
  std::size_t m = kDefaultReportExamples;
  std::string stats_path;
  std::string table_path;
  std::string lexicon_path;
  std::string out_path;
  std::string format = "text";
  std::string split = "train";
  std::string feature_path;
  std::string predicted_class;
  std::string url_prefix;
  unsigned jobs = 1;
  bool gamma_given = false;
};

// Thrown for missing required flags and similar invocation mistakes that
// CLI11 cannot express on its own (flags live on the root app).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) {
    throw UsageError(fmt::format("{} requires {}", command, flag));
  }
}

fs::path data_root_for(const RunConfig& cfg) {
  if (!cfg.data_root.empty()) return cfg.data_root;
  return fs::path(cfg.manifest_path).parent_path();
}

Manifest read_manifest(const RunConfig& cfg) {
  return load_manifest(read_text_file(cfg.manifest_path));
}

// Writes to --out when given, otherwise to the command's stdout.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    write_text_file(cfg.out_path, text);
  }
}

StatsArtifact read_stats(const RunConfig& cfg) {
  return stats_from_json(read_json_file(cfg.stats_path));
}

// The threshold comes from the stats file; an explicit --gamma must agree.
double resolve_gamma(const RunConfig& cfg, const StatsArtifact& stats) {
  if (cfg.gamma_given && cfg.gamma != stats.gamma) {
    throw IncompatibleArtifacts(
        fmt::format("--gamma {} differs from gamma {} recorded in '{}'",
                    cfg.gamma, stats.gamma, cfg.stats_path));
  }
  return stats.gamma;
}

AttributeLexicon read_lexicon(const RunConfig& cfg, std::size_t channels) {
  if (cfg.lexicon_path.empty()) return AttributeLexicon(channels);
  return lexicon_from_json(read_json_file(cfg.lexicon_path));
}

int cmd_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.manifest_path, "--manifest", "select");
  require(cfg.out_path, "--out", "select");
  if (cfg.split != "train" && cfg.split != "test") {
    throw UsageError("--split must be train or test");
  }
  const Split split = cfg.split == "train" ? Split::kTrain : Split::kTest;

  const Manifest subset = read_manifest(cfg).filter(split);
  const Manifest selected = select_top_n_per_class(subset, cfg.n_select);

  std::vector<std::string> order;
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  for (const auto& r : subset.records) {
    if (!tally.contains(r.class_label)) order.push_back(r.class_label);
    ++tally[r.class_label].second;
  }
  for (const auto& r : selected.records) ++tally[r.class_label].first;

  for (const auto& label : order) {
    const auto [kept, total] = tally[label];
    out << fmt::format("{}\t{}\n", label, kept);
    if (total < cfg.n_select) {
      err << fmt::format("warning: class '{}' has only {} records (< {})\n",
                         label, total, cfg.n_select);
    }
  }
  out << fmt::format("selected {} of {} records\n", selected.records.size(),
                     subset.records.size());
  write_text_file(cfg.out_path, dump_manifest(selected));
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  require(cfg.manifest_path, "--manifest", "stats");
  require(cfg.out_path, "--out", "stats");
  const Manifest train = read_manifest(cfg).filter(Split::kTrain);
  if (train.records.empty()) {
    throw EmptyDataset(
        fmt::format("'{}' has no train records", cfg.manifest_path));
  }
  const auto pooled = pool_records(train.records,
                                   npy_file_loader(data_root_for(cfg)), cfg.jobs);
  const StatsArtifact stats{compute_mean_stats(pooled, cfg.epsilon), cfg.gamma};
  write_text_file(cfg.out_path, dump_json(stats_to_json(stats)));
  out << fmt::format("stats over {} examples, {} channels -> {}\n",
                     stats.stats.sample_count, stats.stats.channels(),
                     cfg.out_path);
  return kExitOk;
}

int cmd_classfeat(const RunConfig& cfg, std::ostream& out) {
  require(cfg.manifest_path, "--manifest", "classfeat");
  require(cfg.stats_path, "--stats", "classfeat");
  require(cfg.out_path, "--out", "classfeat");
  const StatsArtifact stats = read_stats(cfg);
  const double gamma = resolve_gamma(cfg, stats);

  const Manifest train = read_manifest(cfg).filter(Split::kTrain);
  const auto pooled =
      pool_records(train.records, npy_file_loader(data_root_for(cfg)),
                   cfg.jobs, stats.stats.channels());

  ClassCountAccumulator counts;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    counts.add(train.records[i].class_label,
               binarize(normalize(pooled[i], stats.stats), gamma));
  }
  ClassFrequentTable table =
      build_class_frequent_table(counts.counts(), cfg.k, gamma);
  table.channels = stats.stats.channels();
  write_text_file(cfg.out_path, dump_json(table_to_json(table, &counts.counts())));

  for (const auto& [label, q] : table.entries) {
    out << fmt::format("{}\t{}\n", label, q.to_string());
  }
  return kExitOk;
}

int cmd_explain(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.stats_path, "--stats", "explain");
  require(cfg.table_path, "--table", "explain");
  if (cfg.format != "text" && cfg.format != "records") {
    throw UsageError("--format must be text or records");
  }
  const StatsArtifact stats = read_stats(cfg);
  const ClassFrequentTable table =
      table_from_json(read_json_file(cfg.table_path));
  check_compatible(stats, table);
  const double gamma = resolve_gamma(cfg, stats);
  const AttributeLexicon lexicon = read_lexicon(cfg, table.channels);
  check_compatible(table, lexicon);

  struct Item {
    std::string id;
    std::string predicted;
    fs::path path;
  };
  std::vector<Item> items;
  if (!cfg.feature_path.empty()) {
    require(cfg.predicted_class, "--class", "explain --feature");
    items.push_back({fs::path(cfg.feature_path).stem().string(),
                     cfg.predicted_class, cfg.feature_path});
  } else {
    require(cfg.manifest_path, "--manifest or --feature", "explain");
    const fs::path root = data_root_for(cfg);
    for (const auto& r : read_manifest(cfg).filter(Split::kTest).records) {
      items.push_back({r.example_id, r.prediction(), root / r.feature_path});
    }
  }

  std::string text;
  std::size_t failed = 0;
  for (const Item& item : items) {
    try {
      const Explanation x =
          explain_one(read_npy_file(item.path), item.predicted, stats.stats,
                      table, lexicon, gamma, cfg.ell);
      text += cfg.format == "text" ? render_explanation(x)
                                   : explanation_to_json(item.id, x).dump();
    } catch (const Error& e) {
      ++failed;
      err << fmt::format("error: example '{}': {}\n", item.id, e.what());
      if (cfg.format == "text") {
        text += fmt::format("error: example '{}': {}", item.id, e.what());
      } else {
        text += Json{{"id", item.id},
                     {"class", item.predicted},
                     {"error", e.what()}}
                    .dump();
      }
    }
    text += '\n';
  }
  emit(cfg, out, text);
  return failed == 0 ? kExitOk : kExitInput;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  require(cfg.manifest_path, "--manifest", "report");
  require(cfg.stats_path, "--stats", "report");
  require(cfg.table_path, "--table", "report");
  const StatsArtifact stats = read_stats(cfg);
  const ClassFrequentTable table =
      table_from_json(read_json_file(cfg.table_path));
  check_compatible(stats, table);

  const Manifest train = read_manifest(cfg).filter(Split::kTrain);
  const auto pooled =
      pool_records(train.records, npy_file_loader(data_root_for(cfg)),
                   cfg.jobs, stats.stats.channels());
  std::vector<NormalizedExample> examples;
  examples.reserve(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    examples.push_back(
        {train.records[i].example_id, normalize(pooled[i], stats.stats)});
  }
  const auto rankings =
      rank_all_channels(examples, stats.stats.channels(), cfg.m);

  std::ostringstream doc;
  emit_annotation_report(rankings, table, doc, {cfg.url_prefix});
  emit(cfg, out, doc.str());
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.manifest_path, "--manifest", "eval");
  require(cfg.stats_path, "--stats", "eval");
  require(cfg.table_path, "--table", "eval");
  const StatsArtifact stats = read_stats(cfg);
  const ClassFrequentTable table =
      table_from_json(read_json_file(cfg.table_path));
  check_compatible(stats, table);
  const double gamma = resolve_gamma(cfg, stats);
  const AttributeLexicon lexicon = read_lexicon(cfg, table.channels);
  check_compatible(table, lexicon);

  const EvalSummary summary =
      evaluate(read_manifest(cfg), stats.stats, table, lexicon, gamma,
               npy_file_loader(data_root_for(cfg)), cfg.jobs);
  for (const auto& [id, label] : summary.unknown) {
    err << fmt::format("warning: example '{}': unknown class '{}'\n", id,
                       label);
  }
  emit(cfg, out, dump_json(eval_to_json(summary)));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Explain classifier inferences from binarized feature statistics",
               "netexplain"};
  app.require_subcommand(1);
  app.footer(
      "Pipeline: select -> stats -> classfeat -> explain | report | eval\n"
      "Exit codes: 0 success, 2 input/validation error, 64 usage error.");

  app.add_option("--manifest", cfg.manifest_path, "Dataset manifest (JSON lines)");
  app.add_option("--data-root", cfg.data_root,
                 "Directory feature paths are relative to (default: the "
                 "manifest's directory)");
  auto* gamma_opt =
      app.add_option("--gamma", cfg.gamma, "Threshold on mean-normalized activations")
          ->capture_default_str()
          ->check(CLI::PositiveNumber);
  app.add_option("--k", cfg.k, "Channels per class frequent feature")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--ell", cfg.ell, "Maximum reasons per explanation")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--epsilon", cfg.epsilon, "Guard added to channel means")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--n", cfg.n_select, "Examples kept per class by select")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--m", cfg.m, "Examples listed per channel by report")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--stats", cfg.stats_path, "Normalization stats file");
  app.add_option("--table", cfg.table_path, "Class frequent table file");
  app.add_option("--lexicon", cfg.lexicon_path, "Attribute lexicon file");
  app.add_option("--out", cfg.out_path, "Output file (default: stdout where "
                                        "applicable)");
  app.add_option("--format", cfg.format, "Explanation output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "records"}));
  app.add_option("--split", cfg.split, "Manifest split used by select")
      ->capture_default_str()
      ->check(CLI::IsMember({"train", "test"}));
  app.add_option("--feature", cfg.feature_path,
                 "Single feature file to explain (with --class)");
  app.add_option("--class", cfg.predicted_class,
                 "Predicted class for --feature");
  app.add_option("--url-prefix", cfg.url_prefix,
                 "Prefix turning example ids into links in the report");
  app.add_option("--jobs", cfg.jobs,
                 "Threads for feature loading (0 = all cores)")
      ->capture_default_str();

  std::map<std::string, CLI::App*> commands;
  for (const auto& [name, help] :
       std::vector<std::pair<std::string, std::string>>{
           {"select", "Keep the top-n examples per class by softmax prob"},
           {"stats", "Compute per-channel means of pooled training features"},
           {"classfeat", "Build the class frequent feature table"},
           {"explain", "Explain predictions for test features"},
           {"report", "Write the per-channel annotation report"},
           {"eval", "Summarize explainable-feature statistics on a test split"}}) {
    commands[name] = app.add_subcommand(name, help)->fallthrough();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  cfg.gamma_given = gamma_opt->count() > 0;

  try {
    if (commands["select"]->parsed()) return cmd_select(cfg, out, err);
    if (commands["stats"]->parsed()) return cmd_stats(cfg, out);
    if (commands["classfeat"]->parsed()) return cmd_classfeat(cfg, out);
    if (commands["explain"]->parsed()) return cmd_explain(cfg, out, err);
    if (commands["report"]->parsed()) return cmd_report(cfg, out);
    if (commands["eval"]->parsed()) return cmd_eval(cfg, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << describe_exception(e) << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace netexplain::cli
