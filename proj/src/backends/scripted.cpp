#include "vidsearch/backends/scripted.hpp"

namespace vidsearch {

RewardResponse scripted_rewards(const std::vector<int>& scores,
                                const std::vector<std::string>& explanations) {
  RewardResponse out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::string text = i < explanations.size() ? explanations[i] : "";
    out.segments.emplace_back(SegmentReward{std::move(text), scores[i]});
  }
  return out;
}

}  // namespace vidsearch
