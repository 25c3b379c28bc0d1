#include "vidsearch/core/tree.hpp"

#include "vidsearch/errors.hpp"

namespace vidsearch {

SegmentTree::SegmentTree(SegmentInterval root_interval) {
  nodes_.push_back(SegmentNode{.id = 0, .interval = root_interval});
}

const SegmentNode& SegmentTree::node(NodeId id) const {
  if (id >= nodes_.size()) throw RejectedInput("unknown node id " + std::to_string(id));
  return nodes_[id];
}

SegmentNode& SegmentTree::node(NodeId id) {
  if (id >= nodes_.size()) throw RejectedInput("unknown node id " + std::to_string(id));
  return nodes_[id];
}

std::vector<NodeId> SegmentTree::attach_children(NodeId parent,
                                                 const std::vector<SegmentInterval>& parts,
                                                 int round) {
  if (!node(parent).children.empty()) {
    throw RejectedInput("node " + std::to_string(parent) + " already expanded");
  }
  if (!tiles_exactly(node(parent).interval, parts)) {
    throw RejectedInput("children do not partition node " + std::to_string(parent));
  }
  std::vector<NodeId> ids;
  ids.reserve(parts.size());
  for (const auto& part : parts) {
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(
        SegmentNode{.id = id, .interval = part, .parent = parent, .round_created = round});
    ids.push_back(id);
  }
  nodes_[parent].children = ids;
  return ids;
}

std::vector<NodeId> SegmentTree::leaves() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) out.push_back(n.id);
  }
  return out;
}

bool tiles_exactly(const SegmentInterval& whole, const std::vector<SegmentInterval>& parts) {
  if (parts.empty()) return false;
  if (parts.front().start() != whole.start() || parts.back().end() != whole.end()) return false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i - 1].end() != parts[i].start()) return false;
  }
  return true;
}

void RewardHistory::append(RewardRecord record) {
  if (!records_.empty() && record.round < records_.back().round) {
    throw RejectedInput("reward history rounds must be non-decreasing");
  }
  records_.push_back(std::move(record));
}

}  // namespace vidsearch
