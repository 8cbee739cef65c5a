#include "netexplain/explain.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "netexplain/errors.hpp"

namespace netexplain {
namespace {

// "a", "a or b", "a, b or c"
std::string join_alternatives(const std::vector<std::string>& phrases) {
  std::string out;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    if (i > 0) out += (i + 1 == phrases.size()) ? " or " : ", ";
    out += phrases[i];
  }
  return out;
}

}  // namespace

BinaryFeature explainable_feature(const BinaryFeature& activated,
                                  const BinaryFeature& class_frequent) {
  return activated & class_frequent;
}

std::vector<Reason> rank_reasons(const BinaryFeature& explainable,
                                 const NormalizedVector& zhat, std::size_t ell,
                                 const AttributeLexicon& lexicon) {
  if (ell == 0) throw ValueError("ell must be at least 1");
  if (explainable.size() != zhat.size()) {
    throw ShapeError(fmt::format("explainable feature has {} channels, "
                                 "normalized vector {}",
                                 explainable.size(), zhat.size()));
  }

  std::vector<std::size_t> active = explainable.indices();
  const auto& v = zhat.values;
  const std::size_t keep = std::min(ell, active.size());
  std::partial_sort(active.begin(), active.begin() + keep, active.end(),
                    [&v](std::size_t a, std::size_t b) {
                      return v[a] != v[b] ? v[a] > v[b] : a < b;
                    });

  std::vector<Reason> reasons;
  reasons.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t ch = active[i];
    reasons.push_back({ch, v[ch], lexicon.phrases(ch)});
  }
  return reasons;
}

std::string render_explanation(const Explanation& x) {
  if (x.reasons.empty()) {
    return fmt::format("This is {}. (no explainable features above threshold)",
                       x.predicted_class);
  }
  std::string out = fmt::format("This is {} because, ", x.predicted_class);
  for (std::size_t i = 0; i < x.reasons.size(); ++i) {
    const Reason& r = x.reasons[i];
    if (i > 0) out += "; ";
    const std::string attrs =
        r.phrases.empty()
            ? fmt::format("feature #{} (unannotated)", r.channel)
            : join_alternatives(r.phrases);
    out += fmt::format("{}) it has {}", i + 1, attrs);
  }
  out += '.';
  return out;
}

Explanation explain_one(const Tensor& features,
                        const std::string& predicted_class,
                        const NormStats& stats,
                        const ClassFrequentTable& table,
                        const AttributeLexicon& lexicon, double gamma,
                        std::size_t ell) {
  const BinaryFeature& q = lookup(table, predicted_class);
  const PooledVector z = global_max_pool(features);
  const NormalizedVector zhat = normalize(z, stats);
  const BinaryFeature a = binarize(zhat, gamma);
  const BinaryFeature e = explainable_feature(a, q);

  Explanation x;
  x.predicted_class = predicted_class;
  x.reasons = rank_reasons(e, zhat, ell, lexicon);
  x.gamma = gamma;
  x.ell = ell;
  return x;
}

}  // namespace netexplain
