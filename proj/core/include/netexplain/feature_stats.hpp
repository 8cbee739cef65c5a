#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netexplain/binary_feature.hpp"
#include "netexplain/tensor.hpp"

namespace netexplain {

inline constexpr double kDefaultGamma = 1.0;
inline constexpr double kDefaultEpsilon = 1e-12;

/// Per-channel maximum of one feature volume. Non-negative, finite.
struct PooledVector {
  std::vector<double> values;
  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const PooledVector&, const PooledVector&) = default;
};

/// Pooled vector divided channelwise by the training means.
struct NormalizedVector {
  std::vector<double> values;
  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const NormalizedVector&,
                         const NormalizedVector&) = default;
};

struct NormStats {
  std::vector<double> means;
  std::size_t sample_count = 0;
  double epsilon = kDefaultEpsilon;

  std::size_t channels() const noexcept { return means.size(); }
  friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// Global max pooling over the spatial axes of an [H, W, C] tensor.
/// Throws ShapeError if rank != 3, DomainError on a negative element.
PooledVector global_max_pool(const Tensor& t);

/// Sequential 64-bit fold of pooled vectors into channel means.
///
/// Adding vectors in one call or in many chunks gives bitwise-identical
/// results as long as the order is the same.
class MeanAccumulator {
 public:
  void add(const PooledVector& v);
  void add(std::span<const PooledVector> chunk);

  std::size_t count() const noexcept { return count_; }
  std::size_t channels() const noexcept { return sums_.size(); }

  /// Throws EmptyDataset if nothing was added, ValueError if epsilon <= 0.
  NormStats finish(double epsilon = kDefaultEpsilon) const;

 private:
  std::vector<double> sums_;
  std::size_t count_ = 0;
};

NormStats compute_mean_stats(std::span<const PooledVector> pooled,
                             double epsilon = kDefaultEpsilon);

/// values[j] = z[j] / (means[j] + epsilon). ShapeError on length mismatch.
NormalizedVector normalize(const PooledVector& z, const NormStats& stats);

/// bit j set iff zhat[j] > gamma (strict). ValueError unless gamma > 0.
BinaryFeature binarize(const NormalizedVector& zhat, double gamma);

}  // namespace netexplain
