#pragma once

// Dynamic query management: query discovery, clip retrieval, overlap
// clustering, anchor selection and per-round refresh.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vidsearch/anchor_types.hpp"
#include "vidsearch/backends/interfaces.hpp"
#include "vidsearch/backends/retry.hpp"

namespace vidsearch {

inline constexpr std::size_t kMaxInitialQueries = 5;
inline constexpr std::size_t kMaxQueryDelta = 5;
inline constexpr double kDefaultClipWidth = 8.0;
inline constexpr std::size_t kDefaultTopK = 10;

struct QueryDiscovery {
  QuerySet queries;
  int retries = 0;
  bool degraded = false;  // no usable query; the episode runs anchor-free
  std::vector<std::string> warnings;
};

// Asks the extractor for 1-5 queries and deduplicates them. Transport
// failures that survive the retry budget propagate as BackendError; a
// payload that stays malformed yields an empty, degraded result.
QueryDiscovery discover_initial_queries(const Instruction& instruction, QueryExtractor& extractor,
                                        const RetryPolicy& retry);

// Up to top_k clips per query, concatenated in query order. Throws
// ContractViolation for similarities outside [0,1] or peaks outside spans.
std::vector<RetrievedClip> retrieve_clips(const QuerySet& queries, ClipRetriever& retriever,
                                          std::size_t top_k, const RetryPolicy& retry);
std::vector<RetrievedClip> retrieve_clips(std::span<const SemanticQuery> queries,
                                          ClipRetriever& retriever, std::size_t top_k,
                                          const RetryPolicy& retry);

// Builds a clip whose span is a `width`-second window centred on the peak,
// clamped to the video and snapped to the grid.
RetrievedClip make_clip(const std::string& source_query, Timestamp peak, double similarity,
                        const VideoMeta& meta, double width = kDefaultClipWidth);

// Merges clips with identical spans: max similarity (and its peak, earliest
// on ties), union of source queries. Output sorted by (start, end).
std::vector<RetrievedClip> dedup_clips(std::span<const RetrievedClip> clips);

// Connected components of the closed-interval overlap graph, by sort and
// sweep. Each cluster lists indices into `clips`; clusters are ordered by
// their earliest start and indices within a cluster ascend.
std::vector<std::vector<std::size_t>> cluster_by_overlap(std::span<const RetrievedClip> clips);

// One anchor per cluster at the peak of its most similar clip (earliest peak
// on ties), sorted by time.
AnchorSet select_anchors(std::span<const RetrievedClip> clips,
                         const std::vector<std::vector<std::size_t>>& clusters);

// dedup -> cluster -> select over a clip pool.
AnchorSet build_anchor_set(std::span<const RetrievedClip> clips);

struct QueryDelta {
  std::vector<SemanticQuery> added;
  int retries = 0;
  std::vector<std::string> warnings;
};

// New observation-derived queries (at most 5) not already in `history`.
// Extractor failures produce an empty delta and a warning.
QueryDelta update_queries(std::span<const ObservedFrame> observed, const QuerySet& history,
                          const Instruction& instruction, QueryExtractor& extractor, int round,
                          const RetryPolicy& retry);

struct AnchorRefresh {
  AnchorSet anchors;
  std::vector<std::string> warnings;
};

// Retrieves clips for the delta only, merges them into the old pool and
// re-clusters. Retrieval failures keep the old snapshot.
AnchorRefresh refresh_anchor_set(const AnchorSet& old, std::span<const SemanticQuery> delta,
                                 ClipRetriever& retriever, std::size_t top_k,
                                 const RetryPolicy& retry);

// Anchors owned by `interval` under the half-open rule; an anchor exactly at
// `video_end` belongs to the segment that ends there.
std::vector<Anchor> anchors_in(const SegmentInterval& interval, const AnchorSet& anchors,
                               Timestamp video_end);

}  // namespace vidsearch
