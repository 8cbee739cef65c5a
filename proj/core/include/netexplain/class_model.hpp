#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netexplain/binary_feature.hpp"
#include "netexplain/feature_stats.hpp"

namespace netexplain {

inline constexpr std::size_t kDefaultK = 3;

struct ClassCounts {
  std::string class_label;
  std::vector<std::uint64_t> counts;  // activations per channel
  std::uint64_t sample_count = 0;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

using ClassCountMap = std::map<std::string, ClassCounts>;

/// Per-class activation counter. Merging partial accumulators is plain
/// integer addition, so any split of the input merges to the same result.
class ClassCountAccumulator {
 public:
  /// Throws ShapeError if the feature length differs from earlier ones.
  void add(const std::string& class_label, const BinaryFeature& feature);
  void merge(const ClassCountAccumulator& other);

  const ClassCountMap& counts() const noexcept { return counts_; }
  ClassCountMap take() && { return std::move(counts_); }

 private:
  ClassCountMap counts_;
  std::size_t channels_ = 0;
};

struct LabeledFeature {
  std::string class_label;
  BinaryFeature feature;
};

ClassCountMap accumulate_class_counts(std::span<const LabeledFeature> stream);

/// Sets the k channels with the largest counts; ties go to the lower channel
/// index. Channels with count zero are never chosen, so fewer than k bits can
/// be set. Throws ValueError if k == 0.
BinaryFeature top_k_select(const ClassCounts& counts, std::size_t k);

struct ClassFrequentTable {
  std::size_t k = kDefaultK;
  std::size_t channels = 0;
  double gamma = kDefaultGamma;  // threshold the counts were binarized at
  std::map<std::string, BinaryFeature> entries;

  friend bool operator==(const ClassFrequentTable&,
                         const ClassFrequentTable&) = default;
};

/// Throws ShapeError if the count vectors disagree on channel count.
ClassFrequentTable build_class_frequent_table(const ClassCountMap& counts,
                                              std::size_t k,
                                              double gamma = kDefaultGamma);

/// Throws UnknownClass when the label was never seen at build time.
const BinaryFeature& lookup(const ClassFrequentTable& table,
                            const std::string& predicted_class);

}  // namespace netexplain
