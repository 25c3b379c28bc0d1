#pragma once

// Deterministic simulated backends over a planted-evidence ground truth.
// Every call is a pure function of its inputs and the profile seed.

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/backends/interfaces.hpp"

namespace vidsearch {

struct SimProfile {
  std::uint64_t seed = 0;
  double reward_noise_sigma = 0.15;
  double similarity_noise_sigma = 0.1;

  // Throws RejectedInput unless both sigmas lie in [0, 0.5).
  void validate() const;
};

struct RelevancePeak {
  Timestamp center;
  double base = 0.0;
};

struct SimQuery {
  std::string text;
  std::vector<RelevancePeak> peaks;
  std::size_t evidence = 0;  // index of the evidence frame this query targets
  bool initial = true;       // emitted by query generation
  // For late queries: the evidence whose neighbourhood reveals them.
  std::optional<std::size_t> trigger;
};

struct SimWorld {
  VideoMeta video;
  std::vector<Timestamp> evidence;  // sorted, on the grid
  std::vector<SimQuery> queries;
  std::string correct_option;
  int answer_threshold = 1;  // m: evidence frames needed in memory to answer
  SimProfile noise;
  double reveal_radius = 30.0;
  double window_step = 4.0;      // retrieval window centres every window_step seconds
  double window_width = 8.0;     // clip span
  double relevance_width = 6.0;  // relevance falls off as exp(-(d / width)^2)
  double background = 0.05;

  const SimQuery* find_query(std::string_view normalized_text) const;
  // Ground-truth relevance of a window centred at `center` for a query.
  double relevance(const SimQuery& query, Timestamp center) const;
  // Indices of evidence frames the interval owns (start <= t < end). Sibling
  // segments partition the evidence, and a frame on a cut still raises the
  // reward of the segment it opens.
  std::vector<std::size_t> evidence_in(const SegmentInterval& interval) const;
};

std::uint64_t hash_text(std::string_view text);
// N(0,1) draw determined entirely by (seed, keys).
double keyed_gaussian(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);
// Milliseconds as an integer key.
std::uint64_t time_key(Timestamp t);

class SimQueryExtractor : public QueryExtractor {
 public:
  explicit SimQueryExtractor(std::shared_ptr<const SimWorld> world);
  std::vector<std::string> generate(const Instruction& instruction) override;
  // Late queries whose trigger evidence lies within reveal_radius of a frame.
  std::vector<std::string> update(const QueryUpdateRequest& request) override;

 private:
  std::shared_ptr<const SimWorld> world_;
};

class SimRetriever : public ClipRetriever {
 public:
  explicit SimRetriever(std::shared_ptr<const SimWorld> world);
  std::vector<RetrievedClip> retrieve(const SemanticQuery& query, std::size_t top_k) override;

 private:
  std::shared_ptr<const SimWorld> world_;
};

class SimRewardModel : public SegmentRewardModel {
 public:
  explicit SimRewardModel(std::shared_ptr<const SimWorld> world);
  RewardResponse evaluate(const RewardRequest& request) override;
  SegmentReward score(const SegmentInterval& segment) const;

 private:
  std::shared_ptr<const SimWorld> world_;
};

class SimPolicy : public PolicyModel {
 public:
  explicit SimPolicy(std::shared_ptr<const SimWorld> world);
  // Correct option once memory holds answer_threshold evidence frames,
  // otherwise "{Segment: id}" for the best fused candidate.
  std::string decide(const PolicyRequest& request) override;

 private:
  std::shared_ptr<const SimWorld> world_;
};

Backends make_sim_backends(std::shared_ptr<const SimWorld> world);

}  // namespace vidsearch
