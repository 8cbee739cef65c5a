#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace netexplain {

/// Human-written visual attributes per channel. A channel's phrases are
/// alternatives: any one of them may be what the channel responds to.
class AttributeLexicon {
 public:
  AttributeLexicon() = default;
  explicit AttributeLexicon(std::size_t channels) : channels_(channels) {}

  /// Throws IndexError for channel >= channels(), ValueError for an empty
  /// phrase.
  void annotate(std::size_t channel, std::vector<std::string> phrases);

  std::size_t channels() const noexcept { return channels_; }

  /// Empty for unannotated channels.
  const std::vector<std::string>& phrases(std::size_t channel) const;
  bool is_annotated(std::size_t channel) const;

  const std::map<std::size_t, std::vector<std::string>>& entries()
      const noexcept {
    return attributes_;
  }

  friend bool operator==(const AttributeLexicon&,
                         const AttributeLexicon&) = default;

 private:
  std::size_t channels_ = 0;
  std::map<std::size_t, std::vector<std::string>> attributes_;
};

}  // namespace netexplain
