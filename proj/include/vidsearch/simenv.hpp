#pragma once

// Seeded synthetic episodes with planted evidence frames.

#include <cstdint>
#include <memory>
#include <optional>

#include "vidsearch/backends/sim_backends.hpp"
#include "vidsearch/core/instruction.hpp"

namespace vidsearch {

struct EpisodeParams {
  double duration = 3600.0;
  std::size_t evidence_count = 2;
  // 0 spreads evidence over the whole video; 1 packs it as close as the
  // lattice allows.
  double tightness = 0.0;
  double reward_noise_sigma = 0.15;
  double similarity_noise_sigma = 0.1;
  std::optional<int> answer_threshold;  // defaults to evidence_count
  double reveal_radius = 30.0;
  int distractors = 2;  // off-evidence relevance peaks per query
  int option_count = 5;

  void validate() const;
};

struct SyntheticEpisode {
  std::uint64_t seed = 0;
  std::shared_ptr<const SimWorld> world;
  Instruction instruction;
};

// Evidence lies on the retrieval window lattice, so a noiseless anchor
// lands exactly on it.
SyntheticEpisode generate_episode(std::uint64_t seed, const EpisodeParams& params);

}  // namespace vidsearch
