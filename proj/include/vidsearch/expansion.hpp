#pragma once

// Anchor-prioritized frame selection with exact 1-D minimax coverage.

#include <span>
#include <vector>

#include "vidsearch/anchor_types.hpp"
#include "vidsearch/core/timeline.hpp"

namespace vidsearch {

struct ExpansionBudget {
  int total_frames = 6;   // B
  int anchor_frames = 3;  // B_s

  // Throws RejectedInput unless 1 <= total_frames and 0 <= anchor_frames <= total_frames.
  void validate() const;
};

struct ExpansionResult {
  std::vector<Timestamp> frames;  // strictly increasing, strictly inside the segment
  std::vector<SegmentInterval> children;
  double achieved_radius = 0.0;
  std::vector<Timestamp> anchor_frames_used;
};

// Up to budget_bs anchors strictly inside the segment, ranked by similarity
// (ties: earlier time). Returned in time order.
std::vector<Timestamp> select_segment_anchors(const SegmentInterval& segment,
                                              const AnchorSet& anchors, int budget_bs);

// Largest distance from a point of `domain` to its nearest frame. Infinity
// when `frames` is empty and the domain is not.
double coverage_radius(std::span<const Timestamp> domain, std::span<const Timestamp> frames);

struct CoverageResult {
  std::vector<Timestamp> frames;
  double radius = 0.0;
};

// Extends `preselected` to exactly total_b frames (or every interior grid
// point when fewer exist) minimizing the coverage radius over the segment's
// grid points. Among optimal sets the lexicographically earliest is returned.
// Throws RejectedInput for preselected frames off the grid, outside the open
// segment, duplicated, or more numerous than total_b.
CoverageResult coverage_complete(const SegmentInterval& segment,
                                 std::span<const Timestamp> preselected, int total_b,
                                 const VideoMeta& meta);

// Throws UnexpandableSegment when the segment has no interior grid point.
ExpansionResult expand(const SegmentInterval& segment, const AnchorSet& anchors,
                       const ExpansionBudget& budget, const VideoMeta& meta);

}  // namespace vidsearch
