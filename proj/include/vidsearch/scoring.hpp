#pragma once

// Query score pooling, reward entropy and uncertainty-aware fusion.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vidsearch/anchor_types.hpp"
#include "vidsearch/core/tree.hpp"

namespace vidsearch {

inline constexpr double kDefaultTauC = 0.1;
// Rewards are fused on [0,1] but their softmax uses the rubric's 0..100
// scale as logits; see README "Fusion".
inline constexpr double kDefaultRewardLogitScale = 100.0;

// tau * log(mean(exp(phi / tau))), computed with the max subtracted.
// Returns 0 for an empty set. Throws RejectedInput for tau <= 0.
double query_score(std::span<const double> similarities, double tau_c);
// Pools the anchors owned by `segment` (see anchors_in).
double query_score(const SegmentInterval& segment, const AnchorSet& anchors, double tau_c,
                   Timestamp video_end);

// softmax(scale * x), max-subtracted.
std::vector<double> softmax(std::span<const double> values, double scale = 1.0);

// -sum p log p / log N over softmax(scale * values). 0 for N = 1, exactly 1
// when all values are equal. Throws RejectedInput on empty or non-finite input.
double normalized_entropy(std::span<const double> values, double scale = 1.0);

struct FusionInput {
  NodeId node = 0;
  double intrinsic = 0.0;
  double query = 0.0;
};

struct ScoreBundle {
  NodeId node = 0;
  double intrinsic = 0.0;
  double query = 0.0;
  double fused = 0.0;
};

struct FusionContext {
  double tau_c = kDefaultTauC;
  std::size_t candidate_count = 0;
  double entropy = 0.0;
  std::vector<double> probabilities;
};

struct FusionResult {
  std::vector<ScoreBundle> bundles;
  FusionContext context;
};

// h = (1 - H) r + H u with H taken once over every candidate's r.
// `bypass` keeps H in the context but sets h = r (intrinsic-only ablation).
FusionResult fuse(std::span<const FusionInput> candidates, double tau_c,
                  double logit_scale = kDefaultRewardLogitScale, bool bypass = false);

struct NormalizedReward {
  double value = 0.0;
  std::optional<std::string> warning;
};

// raw / 100, clamped to [0,1] with a warning when raw is outside 0..100.
NormalizedReward normalize_intrinsic(int raw_score);

}  // namespace vidsearch
