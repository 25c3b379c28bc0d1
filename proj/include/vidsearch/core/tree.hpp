#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vidsearch/core/timeline.hpp"

namespace vidsearch {

using NodeId = std::uint32_t;

struct SegmentNode {
  NodeId id = 0;
  SegmentInterval interval;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::optional<double> intrinsic_reward;  // r(s), normalized to [0,1]
  std::optional<double> query_score;       // u(s)
  std::optional<double> fused_score;       // h(s)
  std::optional<std::string> trace;        // reasoning trace from the reward model
  int round_created = 0;
  bool atomic = false;  // no interior grid point; never expanded again

  bool is_leaf() const noexcept { return children.empty(); }
};

// Search tree over the video timeline. Node ids are dense indices.
class SegmentTree {
 public:
  explicit SegmentTree(SegmentInterval root_interval);

  const SegmentNode& node(NodeId id) const;
  SegmentNode& node(NodeId id);
  NodeId root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // Attaches children that must tile the parent exactly. Returns their ids.
  std::vector<NodeId> attach_children(NodeId parent, const std::vector<SegmentInterval>& parts,
                                      int round);

  std::vector<NodeId> leaves() const;

 private:
  std::vector<SegmentNode> nodes_;
};

// True iff `parts`, taken in order, tile `whole` with no gaps or overlaps.
bool tiles_exactly(const SegmentInterval& whole, const std::vector<SegmentInterval>& parts);

struct RewardRecord {
  int round = 0;
  NodeId node = 0;
  SegmentInterval interval;
  std::string trace;
  int raw_score = 0;
  double intrinsic_reward = 0.0;
};

// Append-only log of every evaluated segment, in evaluation order.
class RewardHistory {
 public:
  void append(RewardRecord record);
  const std::vector<RewardRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

 private:
  std::vector<RewardRecord> records_;
};

}  // namespace vidsearch
