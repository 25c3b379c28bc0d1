#pragma once

// Independent oracles and shared fixtures for the unit and acceptance tests.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vidsearch/backends/scripted.hpp"
#include "vidsearch/core/trace.hpp"
#include "vidsearch/engine.hpp"

namespace vidsearch::testing {

std::string data_path(const std::string& relative);
std::string slurp(const std::string& path);

// Exhaustive search over every completion of `preselected`; returns the
// minimal radius and the lexicographically earliest optimal frame set.
struct BruteCoverage {
  std::vector<Timestamp> frames;
  double radius = 0.0;
};
BruteCoverage brute_force_coverage(const SegmentInterval& segment,
                                   std::span<const Timestamp> preselected, int total_b,
                                   const VideoMeta& meta);

// Connected components of the pairwise closed-overlap graph via union-find.
std::vector<std::vector<std::size_t>> brute_force_components(std::span<const RetrievedClip> clips);
// Sorts each cluster and then the list of clusters.
std::vector<std::vector<std::size_t>> canonical(std::vector<std::vector<std::size_t>> clusters);

// Direct long-double evaluations without max subtraction.
long double reference_query_score(std::span<const double> similarities, long double tau);
long double reference_entropy(std::span<const double> values, long double scale);

// Checks capacity and the eviction rule (lowest reward, then oldest round,
// then earliest time) by replaying the memory records of every round.
bool memory_law_holds(const EpisodeTrace& trace, std::string& why);

// Scripted two-round episode whose trace is committed as a golden file.
struct TwoRoundFixture {
  VideoMeta video;
  Instruction instruction;
  EpisodeConfig config;
  std::shared_ptr<ScriptedExtractor> extractor;
  std::shared_ptr<ScriptedRetriever> retriever;
  std::shared_ptr<ScriptedRewardModel> reward;
  std::shared_ptr<ScriptedPolicy> policy;

  Backends backends() const { return {extractor, retriever, reward, policy}; }
};
TwoRoundFixture make_two_round_fixture();
inline constexpr const char* kTwoRoundGolden = "golden/two_round_trace.jsonl";

// Prompt fixtures rendered against tests/golden/prompts/<name>.txt.
struct PromptCase {
  std::string name;
  std::string rendered;
};
std::vector<PromptCase> prompt_cases();
inline constexpr const char* kPromptGoldenDir = "golden/prompts";

// Wire-contract scenarios against a local stub server: prompt goldens,
// request shape, malformed replies, missing segments, HTTP errors and
// timeouts.
struct ContractCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};
std::vector<ContractCheck> wire_contract_checks();

}  // namespace vidsearch::testing
