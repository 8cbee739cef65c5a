#include "netexplain/binary_feature.hpp"

#include <bit>

#include <fmt/format.h>

#include "netexplain/errors.hpp"

namespace netexplain {

BinaryFeature::BinaryFeature(std::size_t channels)
    : size_(channels), words_((channels + kWordBits - 1) / kWordBits, 0) {}

BinaryFeature BinaryFeature::from_string(std::string_view bits) {
  BinaryFeature f(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      f.set(i);
    } else if (bits[i] != '0') {
      throw ValueError(fmt::format("invalid bit character '{}'", bits[i]));
    }
  }
  return f;
}

BinaryFeature BinaryFeature::from_indices(std::size_t channels,
                                          const std::vector<std::size_t>& on) {
  BinaryFeature f(channels);
  for (std::size_t i : on) f.set(i);
  return f;
}

bool BinaryFeature::test(std::size_t i) const {
  if (i >= size_) throw IndexError(fmt::format("bit {} of {}", i, size_));
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
}

void BinaryFeature::set(std::size_t i, bool value) {
  if (i >= size_) throw IndexError(fmt::format("bit {} of {}", i, size_));
  const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (value) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

std::size_t BinaryFeature::popcount() const noexcept {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> BinaryFeature::indices() const {
  std::vector<std::size_t> out;
  out.reserve(popcount());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * kWordBits +
                    static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::string BinaryFeature::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i : indices()) s[i] = '1';
  return s;
}

bool BinaryFeature::is_subset_of(const BinaryFeature& other) const {
  if (size_ != other.size_) {
    throw ShapeError(fmt::format("bit vectors of length {} and {}", size_,
                                 other.size_));
  }
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & ~other.words_[w]) != 0) return false;
  }
  return true;
}

BinaryFeature BinaryFeature::operator&(const BinaryFeature& other) const {
  if (size_ != other.size_) {
    throw ShapeError(fmt::format("bit vectors of length {} and {}", size_,
                                 other.size_));
  }
  BinaryFeature out(size_);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    out.words_[w] = words_[w] & other.words_[w];
  }
  return out;
}

}  // namespace netexplain
