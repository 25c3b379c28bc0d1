#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vidsearch/anchor_types.hpp"
#include "vidsearch/core/instruction.hpp"
#include "vidsearch/core/timeline.hpp"
#include "vidsearch/core/tree.hpp"

namespace vidsearch {

// A sampled frame handed to a model. `image_path` is empty when the
// backend does not need pixels (simulation).
struct ObservedFrame {
  Timestamp time;
  std::string image_path;
};

struct QueryUpdateRequest {
  const Instruction* instruction = nullptr;
  std::vector<ObservedFrame> frames;
  std::vector<std::string> history;  // query texts already known
  int round = 0;
};

// Turns an instruction (and later, observed frames) into retrieval queries.
// Implementations throw TransportError or MalformedResponse on failure;
// retry policy is applied by the caller.
class QueryExtractor {
 public:
  virtual ~QueryExtractor() = default;
  virtual std::vector<std::string> generate(const Instruction& instruction) = 0;
  virtual std::vector<std::string> update(const QueryUpdateRequest& request) = 0;
};

// Cross-modal retrieval. Returned similarities must already lie in [0,1].
class ClipRetriever {
 public:
  virtual ~ClipRetriever() = default;
  virtual std::vector<RetrievedClip> retrieve(const SemanticQuery& query, std::size_t top_k) = 0;
};

enum class RoundKind { first, following };

struct RewardRequest {
  RoundKind kind = RoundKind::first;
  int round = 1;
  Timestamp duration;
  const Instruction* instruction = nullptr;
  std::vector<SegmentInterval> segments;  // children, in timeline order
  std::vector<NodeId> segment_ids;        // labels shown to the model, parallel to segments
  std::vector<ObservedFrame> frames;      // the cut frames between them
  std::vector<RewardRecord> history;      // every earlier evaluation
  std::string parent_label;
  std::size_t candidate_count = 0;  // segments evaluated in the previous round
};

struct SegmentReward {
  std::string explanation;
  int score = 0;  // raw 0..100 rubric value, possibly out of range
};

// One slot per requested segment; nullopt marks a segment the model omitted.
struct RewardResponse {
  std::vector<std::optional<SegmentReward>> segments;
};

class SegmentRewardModel {
 public:
  virtual ~SegmentRewardModel() = default;
  virtual RewardResponse evaluate(const RewardRequest& request) = 0;
};

struct CandidateView {
  NodeId id = 0;
  SegmentInterval interval;
  double fused_score = 0.0;
  std::string explanation;
};

struct PolicyRequest {
  int round = 1;
  Timestamp duration;
  const Instruction* instruction = nullptr;
  std::vector<ObservedFrame> memory_frames;
  std::vector<CandidateView> candidates;
  bool answer_now = false;  // set when the engine has hit a round/frame limit
};

// Returns the raw decision text; parsing lives in the engine.
class PolicyModel {
 public:
  virtual ~PolicyModel() = default;
  virtual std::string decide(const PolicyRequest& request) = 0;
};

struct Backends {
  std::shared_ptr<QueryExtractor> extractor;
  std::shared_ptr<ClipRetriever> retriever;
  std::shared_ptr<SegmentRewardModel> reward;
  std::shared_ptr<PolicyModel> policy;
};

}  // namespace vidsearch
