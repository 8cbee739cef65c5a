#include "netexplain/feature_stats.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "netexplain/errors.hpp"

namespace netexplain {

PooledVector global_max_pool(const Tensor& t) {
  if (t.rank() != 3) {
    throw ShapeError(
        fmt::format("expected an [H, W, C] tensor, got rank {}", t.rank()));
  }
  const std::size_t channels = t.shape()[2];
  const std::size_t positions = t.shape()[0] * t.shape()[1];
  const auto data = t.data();

  PooledVector out{std::vector<double>(data.begin(), data.begin() + channels)};
  for (std::size_t p = 0; p < positions; ++p) {
    const double* row = data.data() + p * channels;
    for (std::size_t c = 0; c < channels; ++c) {
      if (row[c] < 0.0) {
        throw DomainError(fmt::format(
            "negative activation {} at position {}, channel {}", row[c], p, c));
      }
      out.values[c] = std::max(out.values[c], row[c]);
    }
  }
  return out;
}

void MeanAccumulator::add(const PooledVector& v) {
  if (count_ == 0) {
    sums_.assign(v.size(), 0.0);
  } else if (v.size() != sums_.size()) {
    throw ShapeError(fmt::format("pooled vector has {} channels, expected {}",
                                 v.size(), sums_.size()));
  }
  for (std::size_t j = 0; j < v.size(); ++j) sums_[j] += v.values[j];
  ++count_;
}

void MeanAccumulator::add(std::span<const PooledVector> chunk) {
  for (const auto& v : chunk) add(v);
}

NormStats MeanAccumulator::finish(double epsilon) const {
  if (count_ == 0) throw EmptyDataset("no pooled vectors to average");
  if (!(epsilon > 0.0)) throw ValueError("epsilon must be positive");
  NormStats s;
  s.sample_count = count_;
  s.epsilon = epsilon;
  s.means.resize(sums_.size());
  const double n = static_cast<double>(count_);
  for (std::size_t j = 0; j < sums_.size(); ++j) s.means[j] = sums_[j] / n;
  return s;
}

NormStats compute_mean_stats(std::span<const PooledVector> pooled,
                             double epsilon) {
  MeanAccumulator acc;
  acc.add(pooled);
  return acc.finish(epsilon);
}

NormalizedVector normalize(const PooledVector& z, const NormStats& stats) {
  if (z.size() != stats.channels()) {
    throw ShapeError(fmt::format("pooled vector has {} channels, stats {}",
                                 z.size(), stats.channels()));
  }
  NormalizedVector out{std::vector<double>(z.size())};
  for (std::size_t j = 0; j < z.size(); ++j) {
    out.values[j] = z.values[j] / (stats.means[j] + stats.epsilon);
  }
  return out;
}

BinaryFeature binarize(const NormalizedVector& zhat, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValueError(fmt::format("gamma must be positive, got {}", gamma));
  }
  BinaryFeature a(zhat.size());
  for (std::size_t j = 0; j < zhat.size(); ++j) {
    if (zhat.values[j] > gamma) a.set(j);
  }
  return a;
}

}  // namespace netexplain
