#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netexplain/class_model.hpp"
#include "netexplain/dataset.hpp"
#include "netexplain/feature_stats.hpp"
#include "netexplain/lexicon.hpp"
#include "netexplain/manifest.hpp"

namespace netexplain {

inline constexpr std::size_t kDefaultReportExamples = 20;

struct RankedExample {
  std::string example_id;
  double activation = 0.0;
  friend bool operator==(const RankedExample&, const RankedExample&) = default;
};

struct ChannelRanking {
  std::size_t channel = 0;
  std::vector<RankedExample> examples;  // descending activation, ties by id
  friend bool operator==(const ChannelRanking&,
                         const ChannelRanking&) = default;
};

struct NormalizedExample {
  std::string example_id;
  NormalizedVector zhat;
};

/// m examples with the largest zhat[channel]. Throws IndexError when
/// channel >= channels, ShapeError if an example has the wrong length.
ChannelRanking rank_channel_examples(std::span<const NormalizedExample> examples,
                                     std::size_t channels, std::size_t channel,
                                     std::size_t m);

/// Same over the train records of a manifest, loading features on demand.
ChannelRanking rank_channel_examples(const Manifest& manifest,
                                     const NormStats& stats,
                                     std::size_t channel, std::size_t m,
                                     const FeatureLoader& load);

/// One ranking per channel, in channel order.
std::vector<ChannelRanking> rank_all_channels(
    std::span<const NormalizedExample> examples, std::size_t channels,
    std::size_t m);

struct ReportOptions {
  // Prepended to example ids to form links; empty means plain ids.
  std::string url_prefix;
};

/// Markdown document, one section per channel in channel order, listing the
/// top examples and the classes whose frequent feature contains the channel.
/// Throws IoError if the sink goes bad.
void emit_annotation_report(std::span<const ChannelRanking> rankings,
                            const ClassFrequentTable& table, std::ostream& out,
                            const ReportOptions& options = {});

struct ClassEval {
  std::size_t examples = 0;
  double mean_popcount_e = 0.0;
  double mean_popcount_a = 0.0;
  double coverage = 0.0;  // fraction with at least one explainable channel
  friend bool operator==(const ClassEval&, const ClassEval&) = default;
};

struct EvalSummary {
  std::map<std::string, ClassEval> per_class;  // keyed by predicted class
  // Channels used by some q(c) that carry at least one phrase.
  double annotated_fraction = 0.0;
  std::size_t evaluated = 0;
  // (example_id, predicted class) pairs the table did not know.
  std::vector<std::pair<std::string, std::string>> unknown;
};

struct PooledExample {
  std::string example_id;
  std::string predicted_class;
  PooledVector pooled;
};

EvalSummary evaluate(std::span<const PooledExample> examples,
                     const NormStats& stats, const ClassFrequentTable& table,
                     const AttributeLexicon& lexicon, double gamma);

/// Evaluates the test records of a manifest; the prediction is the record's
/// "pred" field, or its class label when absent.
EvalSummary evaluate(const Manifest& manifest, const NormStats& stats,
                     const ClassFrequentTable& table,
                     const AttributeLexicon& lexicon, double gamma,
                     const FeatureLoader& load, unsigned jobs = 1);

}  // namespace netexplain
