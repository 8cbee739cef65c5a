#include "netexplain/tensor.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "netexplain/errors.hpp"

namespace netexplain {

std::size_t shape_product(std::span<const std::size_t> shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (std::size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive");
  }
  if (shape_product(shape_) != data_.size()) {
    throw ShapeError(fmt::format("shape product {} does not match {} values",
                                 shape_product(shape_), data_.size()));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw ValueError(fmt::format("non-finite value at flat index {}", i));
    }
  }
}

}  // namespace netexplain
