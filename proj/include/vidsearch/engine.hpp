#pragma once

// The exploration-exploitation round loop.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/anchors.hpp"
#include "vidsearch/backends/interfaces.hpp"
#include "vidsearch/backends/retry.hpp"
#include "vidsearch/core/trace.hpp"
#include "vidsearch/expansion.hpp"
#include "vidsearch/scoring.hpp"

namespace vidsearch {

struct EpisodeConfig {
  ExpansionBudget budget{6, 3};
  double tau_c = kDefaultTauC;
  double reward_logit_scale = kDefaultRewardLogitScale;
  std::size_t memory_capacity = 16;
  std::size_t retrieval_top_k = kDefaultTopK;
  int max_rounds = 8;
  int max_total_frames = 48;
  std::uint64_t seed = 0;
  bool fusion = true;        // false: h = r (intrinsic-only ablation)
  bool query_update = true;  // false: queries and anchors frozen after initialization
  bool anchors = true;       // false: no clip retrieval or anchor selection (u = 0)
  RetryPolicy retry;
  bool record_wall_time = false;

  // Throws RejectedInput for non-positive limits or an invalid budget.
  void validate() const;
  // Compact JSON of the tunable fields, recorded in the trace header.
  std::string to_json() const;
};

struct Action {
  enum class Kind { explore, answer };
  Kind kind = Kind::explore;
  NodeId node = 0;
  std::string label;
  std::string rationale;
};

struct Decision {
  std::optional<NodeId> segment;
  std::optional<std::string> label;
};

// A {Segment: n} record wins over option letters elsewhere in the text.
// Otherwise the first option named as a bare label, "Answer: X",
// "answer is X", "Option X" or "(X)".
Decision parse_decision(std::string_view text, const Instruction& instruction);
std::optional<std::string> first_named_option(std::string_view text, const Instruction& instruction);

struct EvaluatedChild {
  std::string trace;
  double reward = 0.0;
  int raw_score = 0;
  bool defaulted = false;
};

struct Evaluation {
  std::vector<EvaluatedChild> children;
  int retries = 0;
  std::vector<std::string> warnings;
};

// One result per requested segment. Segments missing from the response are
// requested again up to retry.max_retries times, then default to r = 0.
// Malformed responses that exhaust retries default every segment; transport
// failures that exhaust retries throw RetriesExhausted.
Evaluation evaluate_children(const RewardRequest& request, SegmentRewardModel& model,
                             const RetryPolicy& retry);

struct Selection {
  Action action;
  int retries = 0;
  bool fallback = false;
  std::vector<std::string> responses;
  std::vector<std::string> warnings;
};

// Invalid segment ids and unparseable responses are re-prompted once, then
// fall back to exploring the best fused candidate (earliest start, then
// smaller id on ties).
Selection select_action(const PolicyRequest& request, PolicyModel& policy, const RetryPolicy& retry);

struct EpisodeResult {
  std::string answer;
  int rounds_used = 0;
  int frames_observed = 0;
  Termination termination = Termination::policy_answered;
  EpisodeTrace trace;
};

// Unrecoverable backend failure; carries the trace up to the failure.
class EpisodeError : public std::runtime_error {
 public:
  EpisodeError(const std::string& what, EpisodeTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const EpisodeTrace& partial_trace() const noexcept { return partial_; }

 private:
  EpisodeTrace partial_;
};

EpisodeResult run_episode(const VideoMeta& video, const Instruction& instruction,
                          const Backends& backends, const EpisodeConfig& config);

}  // namespace vidsearch
