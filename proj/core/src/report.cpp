#include "netexplain/report.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "netexplain/errors.hpp"
#include "netexplain/explain.hpp"

namespace netexplain {
namespace {

std::string escape_cell(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '|' || c == '\\' || c == '[' || c == ']') out += '\\';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out;
}

}  // namespace

ChannelRanking rank_channel_examples(std::span<const NormalizedExample> examples,
                                     std::size_t channels, std::size_t channel,
                                     std::size_t m) {
  if (channel >= channels) {
    throw IndexError(fmt::format("channel {} out of range [0, {})", channel,
                                 channels));
  }
  if (m == 0) throw ValueError("m must be at least 1");

  ChannelRanking out;
  out.channel = channel;
  out.examples.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.zhat.size() != channels) {
      throw ShapeError(fmt::format("example '{}' has {} channels, expected {}",
                                   ex.example_id, ex.zhat.size(), channels));
    }
    out.examples.push_back({ex.example_id, ex.zhat.values[channel]});
  }
  const std::size_t keep = std::min(m, out.examples.size());
  std::partial_sort(out.examples.begin(), out.examples.begin() + keep,
                    out.examples.end(),
                    [](const RankedExample& a, const RankedExample& b) {
                      if (a.activation != b.activation) {
                        return a.activation > b.activation;
                      }
                      return a.example_id < b.example_id;
                    });
  out.examples.resize(keep);
  return out;
}

ChannelRanking rank_channel_examples(const Manifest& manifest,
                                     const NormStats& stats,
                                     std::size_t channel, std::size_t m,
                                     const FeatureLoader& load) {
  if (channel >= stats.channels()) {
    throw IndexError(fmt::format("channel {} out of range [0, {})", channel,
                                 stats.channels()));
  }
  const Manifest train = manifest.filter(Split::kTrain);
  const auto pooled = pool_records(train.records, load, 1, stats.channels());
  std::vector<NormalizedExample> examples;
  examples.reserve(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    examples.push_back({train.records[i].example_id, normalize(pooled[i], stats)});
  }
  return rank_channel_examples(examples, stats.channels(), channel, m);
}

std::vector<ChannelRanking> rank_all_channels(
    std::span<const NormalizedExample> examples, std::size_t channels,
    std::size_t m) {
  std::vector<ChannelRanking> out;
  out.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    out.push_back(rank_channel_examples(examples, channels, c, m));
  }
  return out;
}

void emit_annotation_report(std::span<const ChannelRanking> rankings,
                            const ClassFrequentTable& table, std::ostream& out,
                            const ReportOptions& options) {
  std::vector<const ChannelRanking*> ordered;
  ordered.reserve(rankings.size());
  for (const auto& r : rankings) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ChannelRanking* a, const ChannelRanking* b) {
                     return a->channel < b->channel;
                   });

  out << "# Channel annotation report\n\n"
      << fmt::format("Class frequent table: k = {}, gamma = {}, {} channels, "
                     "{} classes.\n",
                     table.k, table.gamma, table.channels, table.entries.size());

  for (const ChannelRanking* r : ordered) {
    std::vector<std::string> classes;
    for (const auto& [label, q] : table.entries) {
      if (r->channel < q.size() && q.test(r->channel)) {
        classes.push_back(escape_cell(label));
      }
    }

    out << fmt::format("\n## Channel {}\n\n", r->channel);
    out << "Frequent for: "
        << (classes.empty() ? std::string("(none)")
                            : fmt::format("{}", fmt::join(classes, ", ")))
        << "\n\n";
    if (r->examples.empty()) {
      out << "No examples.\n";
      continue;
    }
    out << "| rank | example | activation |\n"
        << "|---:|:---|---:|\n";
    for (std::size_t i = 0; i < r->examples.size(); ++i) {
      const auto& ex = r->examples[i];
      const std::string id = escape_cell(ex.example_id);
      const std::string cell =
          options.url_prefix.empty()
              ? id
              : fmt::format("[{}]({}{})", id, options.url_prefix,
                            ex.example_id);
      out << fmt::format("| {} | {} | {:.6f} |\n", i + 1, cell, ex.activation);
    }
  }
  out.flush();
  if (!out) throw IoError("failed writing annotation report");
}

EvalSummary evaluate(std::span<const PooledExample> examples,
                     const NormStats& stats, const ClassFrequentTable& table,
                     const AttributeLexicon& lexicon, double gamma) {
  struct Totals {
    std::size_t n = 0, sum_e = 0, sum_a = 0, covered = 0;
  };
  std::map<std::string, Totals> totals;

  EvalSummary s;
  for (const auto& ex : examples) {
    auto it = table.entries.find(ex.predicted_class);
    if (it == table.entries.end()) {
      s.unknown.emplace_back(ex.example_id, ex.predicted_class);
      continue;
    }
    const BinaryFeature a = binarize(normalize(ex.pooled, stats), gamma);
    const BinaryFeature e = explainable_feature(a, it->second);
    Totals& t = totals[ex.predicted_class];
    ++t.n;
    t.sum_a += a.popcount();
    t.sum_e += e.popcount();
    if (e.popcount() > 0) ++t.covered;
    ++s.evaluated;
  }
  for (const auto& [label, t] : totals) {
    const double n = static_cast<double>(t.n);
    s.per_class[label] = {t.n, static_cast<double>(t.sum_e) / n,
                          static_cast<double>(t.sum_a) / n,
                          static_cast<double>(t.covered) / n};
  }

  std::set<std::size_t> used;
  for (const auto& [label, q] : table.entries) {
    for (std::size_t j : q.indices()) used.insert(j);
  }
  if (!used.empty()) {
    const auto annotated = std::count_if(
        used.begin(), used.end(),
        [&lexicon](std::size_t j) { return lexicon.is_annotated(j); });
    s.annotated_fraction =
        static_cast<double>(annotated) / static_cast<double>(used.size());
  }
  return s;
}

EvalSummary evaluate(const Manifest& manifest, const NormStats& stats,
                     const ClassFrequentTable& table,
                     const AttributeLexicon& lexicon, double gamma,
                     const FeatureLoader& load, unsigned jobs) {
  const Manifest test = manifest.filter(Split::kTest);
  auto pooled = pool_records(test.records, load, jobs, stats.channels());
  std::vector<PooledExample> examples;
  examples.reserve(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    examples.push_back({test.records[i].example_id,
                        test.records[i].prediction(), std::move(pooled[i])});
  }
  return evaluate(examples, stats, table, lexicon, gamma);
}

}  // namespace netexplain
