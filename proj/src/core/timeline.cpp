#include "vidsearch/core/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "vidsearch/errors.hpp"

namespace vidsearch {

Timestamp::Timestamp(double seconds) : seconds_(seconds) {
  if (!std::isfinite(seconds) || seconds < 0.0) {
    throw RejectedInput("timestamp must be finite and non-negative, got " + std::to_string(seconds));
  }
}

SegmentInterval::SegmentInterval(Timestamp start, Timestamp end) : start_(start), end_(end) {
  if (!(start < end)) {
    throw RejectedInput("segment start " + format_seconds(start) + " must precede end " +
                        format_seconds(end));
  }
}

bool SegmentInterval::owns(Timestamp t, bool closes_video) const noexcept {
  if (start_ <= t && t < end_) return true;
  return closes_video && t == end_;
}

void VideoMeta::validate() const {
  if (frame_grid.empty()) throw RejectedInput("video " + video_id + " has an empty frame grid");
  for (std::size_t i = 0; i < frame_grid.size(); ++i) {
    if (frame_grid[i] > duration) {
      throw RejectedInput("grid point " + format_seconds(frame_grid[i]) + " beyond duration");
    }
    if (i > 0 && !(frame_grid[i - 1] < frame_grid[i])) {
      throw RejectedInput("frame grid must be strictly increasing");
    }
  }
}

std::span<const Timestamp> VideoMeta::points_in(const SegmentInterval& interval) const {
  auto lo = std::lower_bound(frame_grid.begin(), frame_grid.end(), interval.start());
  auto hi = std::upper_bound(lo, frame_grid.end(), interval.end());
  return {lo, hi};
}

std::span<const Timestamp> VideoMeta::interior_points(const SegmentInterval& interval) const {
  auto lo = std::upper_bound(frame_grid.begin(), frame_grid.end(), interval.start());
  auto hi = std::lower_bound(lo, frame_grid.end(), interval.end());
  return {lo, hi};
}

bool VideoMeta::on_grid(Timestamp t) const {
  return std::binary_search(frame_grid.begin(), frame_grid.end(), t);
}

VideoMeta VideoMeta::uniform(std::string video_id, double duration, double step) {
  if (!(step > 0.0)) throw RejectedInput("grid step must be positive");
  VideoMeta meta{std::move(video_id), Timestamp(duration), {}};
  const auto count = static_cast<std::size_t>(std::floor(duration / step + 1e-9)) + 1;
  meta.frame_grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    meta.frame_grid.emplace_back(static_cast<double>(i) * step);
  }
  return meta;
}

std::vector<SegmentInterval> split_segment(const SegmentInterval& interval,
                                           std::span<const Timestamp> cut_times) {
  std::vector<SegmentInterval> parts;
  parts.reserve(cut_times.size() + 1);
  Timestamp cursor = interval.start();
  for (const Timestamp cut : cut_times) {
    if (!interval.strictly_inside(cut)) {
      throw RejectedInput("cut " + format_seconds(cut) + " is not strictly inside the segment");
    }
    if (!(cursor < cut)) {
      throw RejectedInput("cut times must be strictly increasing (duplicate or unordered cut at " +
                          format_seconds(cut) + ")");
    }
    parts.emplace_back(cursor, cut);
    cursor = cut;
  }
  parts.emplace_back(cursor, interval.end());
  return parts;
}

Timestamp snap_to_grid(Timestamp t, const VideoMeta& meta) {
  if (t > meta.duration) {
    throw RejectedInput("timestamp " + format_seconds(t) + " outside [0, " +
                        format_seconds(meta.duration) + "]");
  }
  const auto& grid = meta.frame_grid;
  if (grid.empty()) throw RejectedInput("empty frame grid");
  auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.begin()) return *it;
  if (it == grid.end()) return grid.back();
  const Timestamp after = *it;
  const Timestamp before = *(it - 1);
  const double d_after = after.seconds() - t.seconds();
  const double d_before = t.seconds() - before.seconds();
  return d_before <= d_after ? before : after;
}

std::string format_seconds(double seconds) {
  const double rounded = std::round(seconds);
  char buf[64];
  if (std::fabs(seconds - rounded) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", rounded);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.2f", seconds);
  std::string out = buf;
  while (!out.empty() && out.back() == '0') out.pop_back();
  return out;
}

std::string format_seconds(Timestamp t) { return format_seconds(t.seconds()); }

}  // namespace vidsearch
