#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "netexplain/binary_feature.hpp"
#include "netexplain/class_model.hpp"
#include "netexplain/feature_stats.hpp"
#include "netexplain/lexicon.hpp"
#include "netexplain/tensor.hpp"

namespace netexplain {

inline constexpr std::size_t kDefaultEll = 3;

struct Reason {
  std::size_t channel = 0;
  double activation = 0.0;  // mean-normalized value of the channel
  std::vector<std::string> phrases;

  friend bool operator==(const Reason&, const Reason&) = default;
};

struct Explanation {
  std::string predicted_class;
  std::vector<Reason> reasons;  // descending activation, ties by channel
  double gamma = kDefaultGamma;
  std::size_t ell = kDefaultEll;

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

/// Bitwise AND of the activated feature and the class frequent feature.
BinaryFeature explainable_feature(const BinaryFeature& activated,
                                  const BinaryFeature& class_frequent);

/// Top-ell set channels of `explainable` ranked by zhat, descending, ties by
/// ascending channel. Throws ShapeError on length mismatch, ValueError if
/// ell == 0.
std::vector<Reason> rank_reasons(const BinaryFeature& explainable,
                                 const NormalizedVector& zhat, std::size_t ell,
                                 const AttributeLexicon& lexicon);

/// "This is {class} because, 1) it has a, b or c; 2) it has d."
std::string render_explanation(const Explanation& x);

/// Full test-time path: pool, normalize, binarize at gamma, look up the
/// predicted class, AND, rank. Propagates UnknownClass and ShapeError.
Explanation explain_one(const Tensor& features,
                        const std::string& predicted_class,
                        const NormStats& stats,
                        const ClassFrequentTable& table,
                        const AttributeLexicon& lexicon, double gamma,
                        std::size_t ell);

}  // namespace netexplain
