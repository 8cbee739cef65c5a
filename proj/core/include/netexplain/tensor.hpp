#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace netexplain {

enum class DType { kFloat32, kFloat64 };

/// Dense row-major tensor of finite reals.
///
/// Values are held as doubles regardless of the on-disk element type; a
/// float32 file widens exactly, so nothing is lost on the way in.
class Tensor {
 public:
  Tensor() = default;

  /// Throws ShapeError if the shape is empty, has a zero dimension, or its
  /// product differs from data.size(); ValueError on NaN/Inf.
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::span<const double> data() const noexcept { return data_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::size_t shape_product(std::span<const std::size_t> shape);

}  // namespace netexplain
