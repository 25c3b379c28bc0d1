#pragma once

// Episode trace: a schema header line, one record per round, one result
// record. Serialized as JSON lines.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vidsearch/core/memory.hpp"
#include "vidsearch/core/timeline.hpp"
#include "vidsearch/core/tree.hpp"

namespace vidsearch {

inline constexpr const char* kTraceSchema = "vidsearch.trace";
inline constexpr int kTraceVersion = 1;

enum class Termination {
  policy_answered,
  forced_by_round_limit,
  forced_by_frame_budget,
  candidates_exhausted,
};

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct AnchorRecord {
  Timestamp time;
  double similarity = 0.0;
  std::vector<std::string> queries;
};

struct FrameRecord {
  Timestamp time;
  bool from_anchor = false;
};

struct ChildRecord {
  NodeId id = 0;
  SegmentInterval interval;
  bool atomic = false;
  int raw_score = 0;
  double intrinsic = 0.0;
  bool defaulted = false;  // the reward model never scored this segment
  std::string explanation;
};

struct CandidateRecord {
  NodeId id = 0;
  SegmentInterval interval;
  double intrinsic = 0.0;
  double query = 0.0;
  double fused = 0.0;
};

struct ActionRecord {
  enum class Kind { explore, answer };
  Kind kind = Kind::explore;
  NodeId node = 0;    // explore
  std::string label;  // answer
  bool forced = false;    // answer_now directive was set
  bool fallback = false;  // chosen by the engine, not parsed from the policy
};

struct RoundRecord {
  int round = 1;
  NodeId selected = 0;
  SegmentInterval selected_interval;
  std::vector<FrameRecord> frames;
  double achieved_radius = 0.0;
  std::vector<ChildRecord> children;
  std::vector<CandidateRecord> candidates;  // all of S after the update
  double entropy = 0.0;
  std::vector<MemoryEntry> memory_added;
  std::vector<MemoryEntry> memory_evicted;
  std::vector<MemoryEntry> memory_after;
  std::size_t memory_capacity = 0;
  std::vector<std::string> queries_added;
  std::vector<AnchorRecord> anchors;  // snapshot after the refresh
  std::vector<std::string> policy_responses;
  ActionRecord action;
  int retries = 0;
  std::vector<std::string> warnings;
  std::optional<double> wall_ms;
};

struct TraceHeader {
  std::string video_id;
  double duration = 0.0;
  std::string question;
  std::vector<std::string> options;  // "A. text"
  std::string config_json;           // compact JSON object
  std::vector<std::string> initial_queries;
  std::vector<AnchorRecord> initial_anchors;
  bool degraded = false;
  int retries = 0;
  std::vector<std::string> warnings;
};

struct TraceResult {
  std::string answer;
  int rounds_used = 0;
  int frames_observed = 0;
  Termination termination = Termination::policy_answered;
};

struct EpisodeTrace {
  TraceHeader header;
  std::vector<RoundRecord> rounds;
  std::optional<TraceResult> result;
};

// Doubles are rounded to 1e-10 so traces are stable across summation noise.
std::string to_jsonl(const EpisodeTrace& trace);
void write_trace(const std::string& path, const EpisodeTrace& trace);

struct ParsedTrace {
  EpisodeTrace trace;
  bool truncated = false;  // no result record, or a line failed to parse
  std::string truncation_reason;
};

// Throws RejectedInput for an empty stream or a missing/mismatched schema
// header; later damage is reported through `truncated`.
ParsedTrace parse_trace(std::istream& in);
ParsedTrace read_trace(const std::string& path);

double round_trace_value(double x);

}  // namespace vidsearch
