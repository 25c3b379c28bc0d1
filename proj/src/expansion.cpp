#include "vidsearch/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "vidsearch/errors.hpp"

namespace vidsearch {

void ExpansionBudget::validate() const {
  if (total_frames < 1) throw RejectedInput("total frame budget must be at least 1");
  if (anchor_frames < 0 || anchor_frames > total_frames) {
    throw RejectedInput("anchor frame budget must lie in [0, total_frames]");
  }
}

std::vector<Timestamp> select_segment_anchors(const SegmentInterval& segment,
                                              const AnchorSet& anchors, int budget_bs) {
  if (budget_bs < 0) throw RejectedInput("anchor budget must be non-negative");
  std::vector<const Anchor*> inside;
  for (const auto& a : anchors.anchors) {
    if (segment.strictly_inside(a.frame_time)) inside.push_back(&a);
  }
  std::stable_sort(inside.begin(), inside.end(), [](const Anchor* a, const Anchor* b) {
    if (a->similarity != b->similarity) return a->similarity > b->similarity;
    return a->frame_time < b->frame_time;
  });
  std::vector<Timestamp> out;
  for (const Anchor* a : inside) {
    if (out.size() == static_cast<std::size_t>(budget_bs)) break;
    if (std::find(out.begin(), out.end(), a->frame_time) == out.end()) out.push_back(a->frame_time);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kImpossible = std::numeric_limits<int>::max();

// Every radius comparison goes through this one expression so that a radius
// taken from a pairwise distance compares exactly.
double dist(Timestamp a, Timestamp b) {
  return a > b ? a.seconds() - b.seconds() : b.seconds() - a.seconds();
}

bool covered_by(std::span<const Timestamp> fixed, Timestamp p, double rho) {
  auto it = std::lower_bound(fixed.begin(), fixed.end(), p);
  if (it != fixed.end() && dist(*it, p) <= rho) return true;
  return it != fixed.begin() && dist(*(it - 1), p) <= rho;
}

// Index one past the last candidate c with c - p <= rho (or c <= p).
std::size_t reach_end(std::span<const Timestamp> cand, Timestamp p, double rho) {
  auto it = std::partition_point(cand.begin(), cand.end(),
                                 [&](Timestamp c) { return c <= p || dist(c, p) <= rho; });
  return static_cast<std::size_t>(it - cand.begin());
}

struct Problem {
  std::span<const Timestamp> domain;
  std::vector<Timestamp> free;  // interior grid points not preselected
};

// Greedy count of free frames (drawn from `cand`) needed to cover the domain
// points the fixed frames leave uncovered; kImpossible when some point cannot
// be reached or the count exceeds `limit`.
int frames_needed(std::span<const Timestamp> domain, std::span<const Timestamp> fixed,
                  std::span<const Timestamp> cand, double rho, int limit) {
  int count = 0;
  std::optional<Timestamp> last;
  for (const Timestamp p : domain) {
    if (last && dist(*last, p) <= rho) continue;
    if (covered_by(fixed, p, rho)) continue;
    const std::size_t end = reach_end(cand, p, rho);
    if (end == 0) return kImpossible;
    const Timestamp c = cand[end - 1];
    if (dist(c, p) > rho) return kImpossible;
    if (++count > limit) return kImpossible;
    last = c;
  }
  return count;
}

std::optional<Timestamp> first_uncovered(std::span<const Timestamp> domain,
                                         std::span<const Timestamp> fixed, double rho) {
  for (const Timestamp p : domain) {
    if (!covered_by(fixed, p, rho)) return p;
  }
  return std::nullopt;
}

// Smallest domain-to-candidate distance strictly greater than `lo`.
double next_distance(std::span<const Timestamp> domain, std::span<const Timestamp> cand,
                     double lo) {
  double best = kInf;
  for (const Timestamp p : domain) {
    auto right = std::partition_point(cand.begin(), cand.end(), [&](Timestamp c) {
      return c < p || !(dist(c, p) > lo);
    });
    if (right != cand.end()) best = std::min(best, dist(*right, p));
    auto left = std::partition_point(cand.begin(), cand.end(), [&](Timestamp c) {
      return c < p && dist(c, p) > lo;
    });
    if (left != cand.begin()) best = std::min(best, dist(*(left - 1), p));
  }
  return best;
}

double optimal_radius(std::span<const Timestamp> domain, std::span<const Timestamp> fixed,
                      std::span<const Timestamp> all_frames, std::span<const Timestamp> free,
                      int slots, double length) {
  auto feasible = [&](double rho) { return frames_needed(domain, fixed, free, rho, slots) <= slots; };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0;
  double hi = length;
  for (int i = 0; i < 200; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (!(mid > lo && mid < hi)) break;
    (feasible(mid) ? hi : lo) = mid;
  }
  // The optimum is a distance between a domain point and a frame position.
  for (;;) {
    const double rho = next_distance(domain, all_frames, lo);
    if (rho == kInf) return hi;
    if (feasible(rho)) return rho;
    lo = rho;
  }
}

std::vector<Timestamp> merged(std::span<const Timestamp> a, std::span<const Timestamp> b) {
  std::vector<Timestamp> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

double coverage_radius(std::span<const Timestamp> domain, std::span<const Timestamp> frames) {
  double worst = 0.0;
  for (const Timestamp p : domain) {
    double nearest = kInf;
    for (const Timestamp f : frames) nearest = std::min(nearest, dist(f, p));
    worst = std::max(worst, nearest);
  }
  return worst;
}

CoverageResult coverage_complete(const SegmentInterval& segment,
                                 std::span<const Timestamp> preselected, int total_b,
                                 const VideoMeta& meta) {
  if (total_b < 1) throw RejectedInput("total_b must be at least 1");
  std::vector<Timestamp> fixed(preselected.begin(), preselected.end());
  std::sort(fixed.begin(), fixed.end());
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (!segment.strictly_inside(fixed[i])) {
      throw RejectedInput("preselected frame " + format_seconds(fixed[i]) +
                          " is not strictly inside the segment");
    }
    if (!meta.on_grid(fixed[i])) {
      throw RejectedInput("preselected frame " + format_seconds(fixed[i]) + " is off the grid");
    }
    if (i > 0 && fixed[i] == fixed[i - 1]) throw RejectedInput("duplicate preselected frame");
  }
  if (fixed.size() > static_cast<std::size_t>(total_b)) {
    throw RejectedInput("more preselected frames than total_b");
  }

  const auto domain = meta.points_in(segment);
  const auto interior = meta.interior_points(segment);
  if (interior.size() <= static_cast<std::size_t>(total_b)) {
    std::vector<Timestamp> all(interior.begin(), interior.end());
    return {all, coverage_radius(domain, all)};
  }
  const int slots = total_b - static_cast<int>(fixed.size());
  if (slots == 0) return {fixed, coverage_radius(domain, fixed)};

  std::vector<Timestamp> free;
  std::set_difference(interior.begin(), interior.end(), fixed.begin(), fixed.end(),
                      std::back_inserter(free));
  const double rho = optimal_radius(domain, fixed, interior, free, slots, segment.length());

  // Fill the free slots left to right with the smallest frame that still
  // admits an optimal completion.
  std::vector<Timestamp> chosen;
  std::size_t next = 0;
  for (int slot = 0; slot < slots; ++slot) {
    const int remaining = slots - slot;
    const auto placed = merged(fixed, chosen);
    const std::span<const Timestamp> rest(free.begin() + static_cast<std::ptrdiff_t>(next),
                                          free.end());
    std::size_t pick = next;
    if (frames_needed(domain, placed, rest, rho, remaining - 1) > remaining - 1) {
      // Slot is load-bearing: it must cover the leftmost uncovered point.
      // Frames needed afterwards is non-increasing in the candidate's time.
      const Timestamp p = *first_uncovered(domain, placed, rho);
      std::size_t lo = next;
      while (lo < free.size() && dist(free[lo], p) > rho && free[lo] < p) ++lo;
      std::size_t hi = next + reach_end(rest, p, rho);  // exclusive
      const std::size_t last_allowed = free.size() - static_cast<std::size_t>(remaining);
      hi = std::min(hi, last_allowed + 1);
      auto ok = [&](std::size_t idx) {
        const Timestamp c = free[idx];
        const std::vector<Timestamp> with_c = merged(placed, std::span<const Timestamp>(&c, 1));
        const std::span<const Timestamp> after(free.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                                               free.end());
        return frames_needed(domain, with_c, after, rho, remaining - 1) <= remaining - 1;
      };
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (ok(mid)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      pick = lo;
    }
    chosen.push_back(free[pick]);
    next = pick + 1;
  }
  auto frames = merged(fixed, chosen);
  const double radius = coverage_radius(domain, frames);
  return {std::move(frames), radius};
}

ExpansionResult expand(const SegmentInterval& segment, const AnchorSet& anchors,
                       const ExpansionBudget& budget, const VideoMeta& meta) {
  budget.validate();
  if (meta.interior_points(segment).empty()) {
    throw UnexpandableSegment("segment [" + format_seconds(segment.start()) + ", " +
                              format_seconds(segment.end()) + "] has no interior grid point");
  }
  std::vector<Timestamp> anchor_frames;
  for (const Timestamp t : select_segment_anchors(segment, anchors, budget.anchor_frames)) {
    const Timestamp snapped = snap_to_grid(t, meta);
    if (segment.strictly_inside(snapped) &&
        std::find(anchor_frames.begin(), anchor_frames.end(), snapped) == anchor_frames.end()) {
      anchor_frames.push_back(snapped);
    }
  }
  std::sort(anchor_frames.begin(), anchor_frames.end());
  auto coverage = coverage_complete(segment, anchor_frames, budget.total_frames, meta);
  ExpansionResult out;
  out.children = split_segment(segment, coverage.frames);
  out.frames = std::move(coverage.frames);
  out.achieved_radius = coverage.radius;
  out.anchor_frames_used = std::move(anchor_frames);
  return out;
}

}  // namespace vidsearch
