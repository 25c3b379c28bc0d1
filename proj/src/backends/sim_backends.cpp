#include "vidsearch/backends/sim_backends.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vidsearch/anchors.hpp"
#include "vidsearch/errors.hpp"

namespace vidsearch {

void SimProfile::validate() const {
  for (double s : {reward_noise_sigma, similarity_noise_sigma}) {
    if (!(s >= 0.0 && s < 0.5)) throw RejectedInput("noise sigmas must lie in [0, 0.5)");
  }
}

const SimQuery* SimWorld::find_query(std::string_view normalized_text) const {
  for (const auto& q : queries) {
    if (normalize_query_text(q.text) == normalized_text) return &q;
  }
  return nullptr;
}

double SimWorld::relevance(const SimQuery& query, Timestamp center) const {
  double best = background;
  for (const auto& p : query.peaks) {
    const double d = (center.seconds() - p.center.seconds()) / relevance_width;
    best = std::max(best, p.base * std::exp(-d * d));
  }
  return best;
}

std::vector<std::size_t> SimWorld::evidence_in(const SegmentInterval& interval) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (interval.owns(evidence[i], interval.end() == video.duration)) out.push_back(i);
  }
  return out;
}

std::uint64_t hash_text(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1) from the top 53 bits.
double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

// Box-Muller over two hashed uniforms; independent of any library
// distribution so draws are stable across toolchains.
double keyed_gaussian(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (const auto k : keys) h = splitmix64(h ^ k);
  const double u1 = unit_open(splitmix64(h ^ 0x1ULL));
  const double u2 = unit_open(splitmix64(h ^ 0x2ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t time_key(Timestamp t) {
  return static_cast<std::uint64_t>(std::llround(t.seconds() * 1000.0));
}

SimQueryExtractor::SimQueryExtractor(std::shared_ptr<const SimWorld> world)
    : world_(std::move(world)) {}

std::vector<std::string> SimQueryExtractor::generate(const Instruction&) {
  std::vector<std::string> out;
  for (const auto& q : world_->queries) {
    if (q.initial) out.push_back(q.text);
  }
  return out;
}

std::vector<std::string> SimQueryExtractor::update(const QueryUpdateRequest& request) {
  std::vector<std::string> out;
  for (const auto& q : world_->queries) {
    if (q.initial || !q.trigger) continue;
    const Timestamp trigger = world_->evidence.at(*q.trigger);
    const bool near = std::any_of(request.frames.begin(), request.frames.end(), [&](const auto& f) {
      return std::abs(f.time.seconds() - trigger.seconds()) <= world_->reveal_radius;
    });
    if (near) out.push_back(q.text);
  }
  return out;
}

SimRetriever::SimRetriever(std::shared_ptr<const SimWorld> world) : world_(std::move(world)) {}

std::vector<RetrievedClip> SimRetriever::retrieve(const SemanticQuery& query, std::size_t top_k) {
  const SimWorld& w = *world_;
  const SimQuery* truth = w.find_query(query.normalized_text);
  const std::uint64_t qkey = hash_text(query.normalized_text);
  struct Window {
    Timestamp center;
    double similarity;
  };
  std::vector<Window> windows;
  const double end = w.video.duration.seconds();
  for (double c = w.window_step; c < end; c += w.window_step) {
    const Timestamp center(c);
    double sim = w.background;
    if (truth != nullptr) {
      sim = w.relevance(*truth, center) +
            w.noise.similarity_noise_sigma * keyed_gaussian(w.noise.seed, {qkey, time_key(center)});
    }
    windows.push_back({center, std::clamp(sim, 0.0, 1.0)});
  }
  std::stable_sort(windows.begin(), windows.end(), [](const Window& a, const Window& b) {
    return a.similarity > b.similarity;
  });
  if (windows.size() > top_k) windows.resize(top_k);
  std::vector<RetrievedClip> out;
  for (const auto& win : windows) {
    out.push_back(make_clip(query.normalized_text, win.center, win.similarity, w.video, w.window_width));
  }
  return out;
}

SimRewardModel::SimRewardModel(std::shared_ptr<const SimWorld> world) : world_(std::move(world)) {}

SegmentReward SimRewardModel::score(const SegmentInterval& segment) const {
  const SimWorld& w = *world_;
  const auto inside = w.evidence_in(segment);
  const double fraction =
      w.evidence.empty() ? 0.0 : static_cast<double>(inside.size()) / static_cast<double>(w.evidence.size());
  const double noise = w.noise.reward_noise_sigma *
                       keyed_gaussian(w.noise.seed, {0x5e9d, time_key(segment.start()),
                                                     time_key(segment.end())});
  const int score = static_cast<int>(std::lround(100.0 * std::clamp(fraction + noise, 0.0, 1.0)));
  std::string trace;
  if (inside.empty()) {
    trace = "No planted evidence lies in this segment.";
  } else {
    trace = "Planted evidence in this segment:";
    for (std::size_t i = 0; i < inside.size(); ++i) {
      trace += (i == 0 ? " e" : ", e") + std::to_string(inside[i] + 1);
    }
    trace += ".";
  }
  return {trace, score};
}

RewardResponse SimRewardModel::evaluate(const RewardRequest& request) {
  RewardResponse out;
  for (const auto& segment : request.segments) out.segments.emplace_back(score(segment));
  return out;
}

SimPolicy::SimPolicy(std::shared_ptr<const SimWorld> world) : world_(std::move(world)) {}

std::string SimPolicy::decide(const PolicyRequest& request) {
  const SimWorld& w = *world_;
  const auto seen = std::count_if(request.memory_frames.begin(), request.memory_frames.end(),
                                  [&](const ObservedFrame& f) {
                                    return std::binary_search(w.evidence.begin(), w.evidence.end(),
                                                              f.time);
                                  });
  if (seen >= w.answer_threshold || request.candidates.empty()) return w.correct_option;
  const CandidateView* best = &request.candidates.front();
  for (const auto& c : request.candidates) {
    if (c.fused_score > best->fused_score ||
        (c.fused_score == best->fused_score &&
         (c.interval.start() < best->interval.start() ||
          (c.interval.start() == best->interval.start() && c.id < best->id)))) {
      best = &c;
    }
  }
  return "{Segment: " + std::to_string(best->id) + "}";
}

Backends make_sim_backends(std::shared_ptr<const SimWorld> world) {
  return {std::make_shared<SimQueryExtractor>(world), std::make_shared<SimRetriever>(world),
          std::make_shared<SimRewardModel>(world), std::make_shared<SimPolicy>(world)};
}

}  // namespace vidsearch
