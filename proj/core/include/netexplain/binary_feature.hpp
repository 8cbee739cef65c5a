#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace netexplain {

/// Fixed-length bit vector over feature channels.
///
/// One type carries all three roles of the method: the activated feature of
/// a single input, a class frequent feature, and their overlap.
class BinaryFeature {
 public:
  BinaryFeature() = default;
  explicit BinaryFeature(std::size_t channels);

  /// Parses a 0/1 string, channel 0 leftmost. Throws ValueError on any other
  /// character.
  static BinaryFeature from_string(std::string_view bits);
  static BinaryFeature from_indices(std::size_t channels,
                                    const std::vector<std::size_t>& on);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const;
  void set(std::size_t i, bool value = true);

  std::size_t popcount() const noexcept;
  std::vector<std::size_t> indices() const;
  std::string to_string() const;

  /// True if every set bit of *this is also set in other.
  /// Throws ShapeError on length mismatch.
  bool is_subset_of(const BinaryFeature& other) const;

  /// Elementwise AND. Throws ShapeError on length mismatch.
  BinaryFeature operator&(const BinaryFeature& other) const;

  friend bool operator==(const BinaryFeature&, const BinaryFeature&) = default;

 private:
  static constexpr std::size_t kWordBits = 64;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace netexplain
