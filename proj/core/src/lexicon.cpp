#include "netexplain/lexicon.hpp"

#include <fmt/format.h>

#include "netexplain/errors.hpp"

namespace netexplain {

void AttributeLexicon::annotate(std::size_t channel,
                                std::vector<std::string> phrases) {
  if (channel >= channels_) {
    throw IndexError(fmt::format("lexicon channel {} out of range [0, {})",
                                 channel, channels_));
  }
  for (const auto& p : phrases) {
    if (p.empty()) {
      throw ValueError(fmt::format("empty phrase for channel {}", channel));
    }
  }
  if (phrases.empty()) {
    attributes_.erase(channel);
  } else {
    attributes_[channel] = std::move(phrases);
  }
}

const std::vector<std::string>& AttributeLexicon::phrases(
    std::size_t channel) const {
  static const std::vector<std::string> kNone;
  auto it = attributes_.find(channel);
  return it == attributes_.end() ? kNone : it->second;
}

bool AttributeLexicon::is_annotated(std::size_t channel) const {
  return attributes_.contains(channel);
}

}  // namespace netexplain
