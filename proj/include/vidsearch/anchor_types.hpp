#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/core/timeline.hpp"

namespace vidsearch {

enum class QueryOrigin { instruction, observation };

struct SemanticQuery {
  std::string text;
  std::string normalized_text;  // lowercased, trimmed, inner whitespace collapsed
  int round_discovered = 0;     // 0 = derived from the instruction
  QueryOrigin origin = QueryOrigin::instruction;
};

std::string normalize_query_text(std::string_view text);

// Queries unique by normalized_text, in discovery order.
class QuerySet {
 public:
  // False (and no insertion) when the normalized text is empty or present.
  bool add(SemanticQuery query);
  bool contains(std::string_view normalized_text) const;

  const std::vector<SemanticQuery>& queries() const noexcept { return queries_; }
  std::size_t size() const noexcept { return queries_.size(); }
  bool empty() const noexcept { return queries_.empty(); }

 private:
  std::vector<SemanticQuery> queries_;
};

struct RetrievedClip {
  std::vector<std::string> source_queries;  // normalized query texts, sorted
  Timestamp peak_time;
  SegmentInterval span;
  double similarity = 0.0;  // in [0,1]
};

struct Anchor {
  Timestamp frame_time;
  double similarity = 0.0;
  int cluster_id = 0;
  std::vector<std::string> source_queries;
};

// Snapshot of anchors (sorted by frame_time, one per cluster) and the
// deduplicated clip pool they were selected from.
struct AnchorSet {
  std::vector<Anchor> anchors;
  std::vector<RetrievedClip> clips;

  bool empty() const noexcept { return anchors.empty(); }
};

}  // namespace vidsearch
