#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vidsearch {

// A position on the video timeline, in seconds. Always finite and >= 0.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  explicit Timestamp(double seconds);

  double seconds() const noexcept { return seconds_; }

  auto operator<=>(const Timestamp&) const = default;

 private:
  double seconds_ = 0.0;
};

// Closed-form [start, end] with start < end. Membership tests use the
// half-open convention: a shared boundary belongs to the later interval.
class SegmentInterval {
 public:
  SegmentInterval(Timestamp start, Timestamp end);

  Timestamp start() const noexcept { return start_; }
  Timestamp end() const noexcept { return end_; }
  double length() const noexcept { return end_.seconds() - start_.seconds(); }

  // start <= t < end, or t == end when `closes_video` is set (the last
  // segment of the video owns the final instant).
  bool owns(Timestamp t, bool closes_video = false) const noexcept;
  bool strictly_inside(Timestamp t) const noexcept { return start_ < t && t < end_; }

  bool operator==(const SegmentInterval&) const = default;

 private:
  Timestamp start_;
  Timestamp end_;
};

struct VideoMeta {
  std::string video_id;
  Timestamp duration;
  std::vector<Timestamp> frame_grid;  // strictly increasing, within [0, duration]

  // Throws RejectedInput when the grid invariants do not hold.
  void validate() const;

  SegmentInterval whole() const { return SegmentInterval(Timestamp{}, duration); }

  // Grid points p with interval.start <= p <= interval.end.
  std::span<const Timestamp> points_in(const SegmentInterval& interval) const;
  // Grid points strictly inside the interval.
  std::span<const Timestamp> interior_points(const SegmentInterval& interval) const;
  bool on_grid(Timestamp t) const;

  // One grid point every `step` seconds from 0 up to and including duration.
  static VideoMeta uniform(std::string video_id, double duration, double step = 1.0);
};

// Cuts `interval` at each time in `cut_times` (strictly increasing, strictly
// inside the interval). Returns |cut_times| + 1 consecutive intervals.
std::vector<SegmentInterval> split_segment(const SegmentInterval& interval,
                                           std::span<const Timestamp> cut_times);

// Nearest grid point to t; ties go to the earlier point.
Timestamp snap_to_grid(Timestamp t, const VideoMeta& meta);

// "30" for whole seconds, otherwise up to two decimals ("12.5").
std::string format_seconds(Timestamp t);
std::string format_seconds(double seconds);

}  // namespace vidsearch
