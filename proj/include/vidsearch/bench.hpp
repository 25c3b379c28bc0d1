#pragma once

// Paired-seed ablation benchmark over synthetic episodes.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vidsearch/core/trace.hpp"
#include "vidsearch/engine.hpp"
#include "vidsearch/simenv.hpp"

namespace vidsearch {

// Ranges the per-episode parameters are drawn from.
struct SimRanges {
  double min_duration = 1800.0;
  double max_duration = 7200.0;
  std::size_t min_evidence = 1;
  std::size_t max_evidence = 4;
  double reward_noise_sigma = 0.15;
  double similarity_noise_sigma = 0.1;

  void validate() const;
};

// Episode parameters for one bench seed; shared by every arm.
EpisodeParams episode_params(std::uint64_t episode_seed, const SimRanges& ranges);
std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t index);

struct ArmSpec {
  std::string name;
  EpisodeConfig config;
};

// full, uniform (B_s = 0, no anchors), intrinsic (h = r), no-qu (queries frozen).
std::vector<ArmSpec> standard_arms(const EpisodeConfig& base = {});
ArmSpec standard_arm(const std::string& name, const EpisodeConfig& base = {});

inline constexpr std::size_t kHistogramBins = 20;
inline constexpr double kHighEntropy = 0.8;
using Histogram = std::array<std::size_t, kHistogramBins>;

std::size_t histogram_bin(double entropy);

struct EntropyHistograms {
  Histogram intrinsic{};
  Histogram fused{};
  std::size_t rounds = 0;
  std::size_t intrinsic_high = 0;  // rounds with entropy > kHighEntropy
  std::size_t fused_high = 0;
};

// Normalized softmax entropy of r and of h for every round with a
// non-empty candidate set.
EntropyHistograms entropy_histograms(const std::vector<EpisodeTrace>& traces, double logit_scale);

struct ArmReport {
  std::string name;
  std::string config_json;
  std::size_t episodes = 0;
  std::size_t successes = 0;
  std::size_t degraded = 0;  // episodes that raised an error
  double success_rate = 0.0;
  double mean_frames = 0.0;
  double mean_rounds = 0.0;
  std::map<int, std::size_t> rounds_distribution;
  std::map<std::string, std::size_t> terminations;
  // Mean selected-segment length by round index (1-based).
  std::vector<double> mean_selected_length;
  EntropyHistograms entropy;
};

struct PairedDelta {
  std::string arm;
  std::string baseline;
  double success_rate = 0.0;  // arm - baseline
  double mean_frames = 0.0;
  double mean_rounds = 0.0;
  std::size_t arm_only_successes = 0;
  std::size_t baseline_only_successes = 0;
};

struct BenchReport {
  std::uint64_t base_seed = 0;
  std::size_t episodes = 0;
  SimRanges ranges;
  std::vector<ArmReport> arms;
  std::vector<PairedDelta> deltas;  // every arm against the first one

  std::string to_json() const;  // pretty JSON, doubles rounded to 1e-10
  std::string table() const;
};

struct BenchOptions {
  std::vector<ArmSpec> arms;
  std::size_t episodes = 200;
  std::uint64_t base_seed = 20240611;
  SimRanges ranges;
  unsigned workers = 1;
  bool keep_traces = false;
};

struct EpisodeOutcome {
  std::uint64_t seed = 0;
  bool success = false;
  bool degraded = false;
  std::string error;
  EpisodeTrace trace;
};

struct BenchResult {
  BenchReport report;
  // outcomes[arm][episode]; traces are empty unless keep_traces is set.
  std::vector<std::vector<EpisodeOutcome>> outcomes;
};

// Runs one synthetic episode under a configuration.
EpisodeOutcome run_sim_episode(std::uint64_t seed, const EpisodeParams& params,
                               const EpisodeConfig& config);

BenchResult run_bench(const BenchOptions& options);

struct SweepRow {
  int anchor_frames = 0;
  double success_rate = 0.0;
  double mean_frames = 0.0;
  double mean_rounds = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;

  std::string to_json() const;
  std::string curve() const;
};

// B_s values above the total budget are clamped with a warning.
SweepReport run_sweep(const std::vector<int>& anchor_frames, const EpisodeConfig& base,
                      const BenchOptions& options);

}  // namespace vidsearch
