#include "vidsearch/core/memory.hpp"

#include <algorithm>
#include <tuple>

#include "vidsearch/errors.hpp"

namespace vidsearch {

MemoryBuffer::MemoryBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw RejectedInput("memory capacity must be positive");
}

bool evicts_before(const MemoryEntry& a, const MemoryEntry& b) noexcept {
  return std::tuple(a.associated_reward, a.round_observed, a.frame_time) <
         std::tuple(b.associated_reward, b.round_observed, b.frame_time);
}

MemoryUpdate update_memory(const MemoryBuffer& buffer, std::span<const MemoryEntry> new_entries) {
  MemoryUpdate out{buffer, {}};
  auto& entries = out.buffer.entries_;
  for (const auto& incoming : new_entries) {
    if (!(incoming.associated_reward >= 0.0 && incoming.associated_reward <= 1.0)) {
      throw RejectedInput("memory reward must lie in [0,1]");
    }
    auto it = std::find_if(entries.begin(), entries.end(), [&](const MemoryEntry& e) {
      return e.frame_time == incoming.frame_time;
    });
    if (it == entries.end()) {
      entries.push_back(incoming);
    } else if (incoming.associated_reward > it->associated_reward) {
      *it = incoming;
    }
  }
  while (entries.size() > out.buffer.capacity_) {
    auto victim = std::min_element(entries.begin(), entries.end(), evicts_before);
    out.evicted.push_back(*victim);
    entries.erase(victim);
  }
  std::sort(entries.begin(), entries.end(),
            [](const MemoryEntry& a, const MemoryEntry& b) { return a.frame_time < b.frame_time; });
  return out;
}

}  // namespace vidsearch
