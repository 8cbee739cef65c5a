#include "netexplain/class_model.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "netexplain/errors.hpp"

namespace netexplain {

void ClassCountAccumulator::add(const std::string& class_label,
                                const BinaryFeature& feature) {
  if (counts_.empty()) {
    channels_ = feature.size();
  } else if (feature.size() != channels_) {
    throw ShapeError(fmt::format("feature for class '{}' has {} channels, "
                                 "expected {}",
                                 class_label, feature.size(), channels_));
  }
  auto [it, inserted] = counts_.try_emplace(class_label);
  ClassCounts& c = it->second;
  if (inserted) {
    c.class_label = class_label;
    c.counts.assign(channels_, 0);
  }
  for (std::size_t j : feature.indices()) ++c.counts[j];
  ++c.sample_count;
}

void ClassCountAccumulator::merge(const ClassCountAccumulator& other) {
  if (other.counts_.empty()) return;
  if (counts_.empty()) {
    channels_ = other.channels_;
  } else if (other.channels_ != channels_) {
    throw ShapeError(fmt::format("cannot merge counts over {} and {} channels",
                                 channels_, other.channels_));
  }
  for (const auto& [label, theirs] : other.counts_) {
    auto [it, inserted] = counts_.try_emplace(label, theirs);
    if (inserted) continue;
    ClassCounts& mine = it->second;
    for (std::size_t j = 0; j < channels_; ++j) mine.counts[j] += theirs.counts[j];
    mine.sample_count += theirs.sample_count;
  }
}

ClassCountMap accumulate_class_counts(std::span<const LabeledFeature> stream) {
  ClassCountAccumulator acc;
  for (const auto& item : stream) acc.add(item.class_label, item.feature);
  return std::move(acc).take();
}

BinaryFeature top_k_select(const ClassCounts& counts, std::size_t k) {
  if (k == 0) throw ValueError("k must be at least 1");
  const auto& c = counts.counts;

  std::vector<std::size_t> candidates;
  candidates.reserve(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] > 0) candidates.push_back(j);
  }
  const std::size_t keep = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end(), [&c](std::size_t a, std::size_t b) {
                      return c[a] != c[b] ? c[a] > c[b] : a < b;
                    });

  BinaryFeature q(c.size());
  for (std::size_t i = 0; i < keep; ++i) q.set(candidates[i]);
  return q;
}

ClassFrequentTable build_class_frequent_table(const ClassCountMap& counts,
                                              std::size_t k, double gamma) {
  if (k == 0) throw ValueError("k must be at least 1");
  ClassFrequentTable table;
  table.k = k;
  table.gamma = gamma;
  bool first = true;
  for (const auto& [label, cc] : counts) {
    if (first) {
      table.channels = cc.counts.size();
      first = false;
    } else if (cc.counts.size() != table.channels) {
      throw ShapeError(fmt::format("class '{}' has {} channels, expected {}",
                                   label, cc.counts.size(), table.channels));
    }
    table.entries.emplace(label, top_k_select(cc, k));
  }
  return table;
}

const BinaryFeature& lookup(const ClassFrequentTable& table,
                            const std::string& predicted_class) {
  auto it = table.entries.find(predicted_class);
  if (it == table.entries.end()) {
    throw UnknownClass(fmt::format(
        "class '{}' is not in the class frequent table", predicted_class));
  }
  return it->second;
}

}  // namespace netexplain
