#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vidsearch/core/timeline.hpp"

namespace vidsearch {

struct MemoryEntry {
  Timestamp frame_time;
  double associated_reward = 0.0;  // in [0,1]
  int round_observed = 0;

  bool operator==(const MemoryEntry&) const = default;
};

class MemoryBuffer;
struct MemoryUpdate;
MemoryUpdate update_memory(const MemoryBuffer& buffer, std::span<const MemoryEntry> new_entries);

// Capacity-bounded set of observed frames, unique by frame_time and kept
// sorted by frame_time.
class MemoryBuffer {
 public:
  explicit MemoryBuffer(std::size_t capacity);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<MemoryEntry>& entries() const noexcept { return entries_; }

 private:
  friend MemoryUpdate update_memory(const MemoryBuffer&, std::span<const MemoryEntry>);
  std::size_t capacity_;
  std::vector<MemoryEntry> entries_;
};

struct MemoryUpdate {
  MemoryBuffer buffer;
  std::vector<MemoryEntry> evicted;  // in eviction order
};

// Eviction order: lowest reward first, then oldest round_observed, then
// earliest frame_time.
bool evicts_before(const MemoryEntry& a, const MemoryEntry& b) noexcept;

// Merges new entries (a same-time entry is replaced only by a higher reward)
// and evicts until the buffer fits its capacity.
MemoryUpdate update_memory(const MemoryBuffer& buffer, std::span<const MemoryEntry> new_entries);

}  // namespace vidsearch
