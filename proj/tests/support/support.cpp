#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "vidsearch/anchors.hpp"
#include "vidsearch/backends/prompts.hpp"

#ifndef VIDSEARCH_TEST_DATA
#define VIDSEARCH_TEST_DATA "tests"
#endif

namespace vidsearch::testing {

std::string data_path(const std::string& relative) {
  return std::string(VIDSEARCH_TEST_DATA) + "/" + relative;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

namespace {

double radius_of(const std::vector<double>& domain, const std::vector<double>& frames) {
  double worst = 0.0;
  for (const double p : domain) {
    double best = std::numeric_limits<double>::infinity();
    for (const double f : frames) best = std::min(best, std::fabs(p - f));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

BruteCoverage brute_force_coverage(const SegmentInterval& segment,
                                   std::span<const Timestamp> preselected, int total_b,
                                   const VideoMeta& meta) {
  std::vector<double> domain;
  std::vector<double> free;
  std::vector<double> fixed;
  for (const auto& p : preselected) fixed.push_back(p.seconds());
  for (const auto& g : meta.frame_grid) {
    const double t = g.seconds();
    if (t < segment.start().seconds() || t > segment.end().seconds()) continue;
    domain.push_back(t);
    const bool interior = t > segment.start().seconds() && t < segment.end().seconds();
    if (interior && std::find(fixed.begin(), fixed.end(), t) == fixed.end()) free.push_back(t);
  }
  const std::size_t extra =
      std::min<std::size_t>(free.size(), static_cast<std::size_t>(total_b) - fixed.size());

  BruteCoverage best{{}, std::numeric_limits<double>::infinity()};
  std::vector<double> best_extra;
  // Combinations in lexicographic order, so the first optimum is the earliest.
  std::vector<std::size_t> idx(extra);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    std::vector<double> chosen;
    for (const auto i : idx) chosen.push_back(free[i]);
    std::vector<double> frames = fixed;
    frames.insert(frames.end(), chosen.begin(), chosen.end());
    const double r = radius_of(domain, frames);
    if (r < best.radius) {
      best.radius = r;
      best_extra = chosen;
    }
    std::size_t k = extra;
    while (k > 0 && idx[k - 1] == free.size() - extra + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < extra; ++j) idx[j] = idx[j - 1] + 1;
  }
  std::vector<double> all = fixed;
  all.insert(all.end(), best_extra.begin(), best_extra.end());
  std::sort(all.begin(), all.end());
  for (const double t : all) best.frames.emplace_back(t);
  return best;
}

std::vector<std::vector<std::size_t>> brute_force_components(std::span<const RetrievedClip> clips) {
  std::vector<std::size_t> parent(clips.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t i = 0; i < clips.size(); ++i) {
    for (std::size_t j = i + 1; j < clips.size(); ++j) {
      const bool overlap = clips[i].span.start() <= clips[j].span.end() &&
                           clips[j].span.start() <= clips[i].span.end();
      if (overlap) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> groups(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& g : groups) {
    if (!g.empty()) out.push_back(std::move(g));
  }
  return canonical(std::move(out));
}

std::vector<std::vector<std::size_t>> canonical(std::vector<std::vector<std::size_t>> clusters) {
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end());
  return clusters;
}

long double reference_query_score(std::span<const double> similarities, long double tau) {
  if (similarities.empty()) return 0.0L;
  long double sum = 0.0L;
  for (const double s : similarities) sum += std::exp(static_cast<long double>(s) / tau);
  return tau * std::log(sum / static_cast<long double>(similarities.size()));
}

long double reference_entropy(std::span<const double> values, long double scale) {
  if (values.size() < 2) return 0.0L;
  long double z = 0.0L;
  for (const double v : values) z += std::exp(scale * static_cast<long double>(v));
  long double h = 0.0L;
  for (const double v : values) {
    const long double p = std::exp(scale * static_cast<long double>(v)) / z;
    if (p > 0.0L) h -= p * std::log(p);
  }
  return h / std::log(static_cast<long double>(values.size()));
}

bool memory_law_holds(const EpisodeTrace& trace, std::string& why) {
  std::vector<MemoryEntry> pool;
  const auto before = [](const MemoryEntry& a, const MemoryEntry& b) {
    if (a.associated_reward != b.associated_reward) return a.associated_reward < b.associated_reward;
    if (a.round_observed != b.round_observed) return a.round_observed < b.round_observed;
    return a.frame_time < b.frame_time;
  };
  for (const auto& r : trace.rounds) {
    const auto where = "round " + std::to_string(r.round) + ": ";
    for (const auto& in : r.memory_added) {
      auto it = std::find_if(pool.begin(), pool.end(),
                             [&](const MemoryEntry& e) { return e.frame_time == in.frame_time; });
      if (it == pool.end()) {
        pool.push_back(in);
      } else if (in.associated_reward > it->associated_reward) {
        *it = in;
      }
    }
    for (const auto& gone : r.memory_evicted) {
      if (pool.empty()) {
        why = where + "eviction from an empty pool";
        return false;
      }
      const auto victim = std::min_element(pool.begin(), pool.end(), before);
      if (!(*victim == gone)) {
        why = where + "evicted t=" + format_seconds(gone.frame_time) + " but the minimum was t=" +
              format_seconds(victim->frame_time);
        return false;
      }
      pool.erase(victim);
    }
    if (pool.size() > r.memory_capacity && !r.memory_evicted.empty()) {
      why = where + "evicted too few entries";
      return false;
    }
    std::sort(pool.begin(), pool.end(),
              [](const MemoryEntry& a, const MemoryEntry& b) { return a.frame_time < b.frame_time; });
    if (r.memory_after.size() > r.memory_capacity) {
      why = where + "buffer holds " + std::to_string(r.memory_after.size()) + " > capacity " +
            std::to_string(r.memory_capacity);
      return false;
    }
    if (pool != r.memory_after) {
      why = where + "replayed buffer differs from the recorded one";
      return false;
    }
  }
  return true;
}

TwoRoundFixture make_two_round_fixture() {
  TwoRoundFixture f{VideoMeta::uniform("fixture-100", 100.0),
                    {"What colour is the umbrella next to the parked car?",
                     lettered_options({"red", "blue", "green", "black"})},
                    {},
                    std::make_shared<ScriptedExtractor>(),
                    std::make_shared<ScriptedRetriever>(),
                    std::make_shared<ScriptedRewardModel>(),
                    std::make_shared<ScriptedPolicy>()};
  f.config.budget = {2, 1};
  f.config.memory_capacity = 3;
  f.config.tau_c = 0.1;
  f.config.retry.max_retries = 0;

  f.extractor->generate_script.push_value({"red car parked"});
  f.extractor->update_script.push_value({"blue umbrella"});
  f.extractor->update_script.push_value({});
  f.retriever->clips["red car parked"] = {
      make_clip("red car parked", Timestamp(40), 0.8, f.video)};
  f.retriever->clips["blue umbrella"] = {
      make_clip("blue umbrella", Timestamp(52), 0.9, f.video)};
  f.reward->script.push_value(scripted_rewards(
      {50, 51, 50}, {"Street scene, no car visible.", "A red car is parked at the kerb.",
                     "Empty street."}));
  f.reward->script.push_value(scripted_rewards(
      {51, 50, 51}, {"The red car is still parked.", "Pedestrians pass by.",
                     "Someone holds a blue umbrella."}));
  f.policy->script.push_value("{Segment: 2}");
  f.policy->script.push_value("B");
  return f;
}

std::vector<PromptCase> prompt_cases() {
  const Instruction instruction{"What does the person pick up after entering the kitchen?",
                                lettered_options({"a cup", "a knife", "a phone", "a towel", "nothing"})};
  const std::vector<SegmentInterval> children{SegmentInterval(Timestamp(0), Timestamp(40)),
                                              SegmentInterval(Timestamp(40), Timestamp(60)),
                                              SegmentInterval(Timestamp(60), Timestamp(120))};
  RewardRequest first{.kind = RoundKind::first,
                      .round = 1,
                      .duration = Timestamp(120),
                      .instruction = &instruction,
                      .segments = children,
                      .segment_ids = {1, 2, 3},
                      .frames = {{Timestamp(40), ""}, {Timestamp(60), ""}},
                      .history = {},
                      .parent_label = "0",
                      .candidate_count = 0};
  RewardRequest following = first;
  following.kind = RoundKind::following;
  following.round = 2;
  following.segments = {SegmentInterval(Timestamp(40), Timestamp(48)),
                        SegmentInterval(Timestamp(48), Timestamp(52.5)),
                        SegmentInterval(Timestamp(52.5), Timestamp(60))};
  following.segment_ids = {4, 5, 6};
  following.frames = {{Timestamp(48), ""}, {Timestamp(52.5), ""}};
  following.history = {{1, 1, children[0], "Person walks toward the door.", 20, 0.2},
                       {1, 2, children[1], "Person opens the kitchen cupboard.", 75, 0.75},
                       {1, 3, children[2], "Person leaves the kitchen.", 30, 0.3}};
  following.parent_label = "2";
  following.candidate_count = 3;

  PolicyRequest selection{.round = 2,
                          .duration = Timestamp(120),
                          .instruction = &instruction,
                          .memory_frames = {{Timestamp(40), ""}, {Timestamp(48), ""}, {Timestamp(60), ""}},
                          .candidates = {{1, children[0], 0.2, "Person walks toward the door."},
                                         {5, following.segments[1], 0.6125, "A hand reaches for a cup."},
                                         {3, children[2], 0.3, "Person leaves the kitchen."}}};
  PolicyRequest answer_now = selection;
  answer_now.answer_now = true;

  const QueryUpdateRequest update{&instruction,
                                  {{Timestamp(40), ""}, {Timestamp(60), ""}},
                                  {"person entering kitchen", "cup on the counter"},
                                  1};
  return {{"reward_first", render_reward_prompt(first)},
          {"reward_following", render_reward_prompt(following)},
          {"selection", render_selection_prompt(selection)},
          {"selection_answer_now", render_selection_prompt(answer_now)},
          {"query_generation", render_query_generation_prompt(instruction)},
          {"query_update", render_query_update_prompt(update)}};
}

}  // namespace vidsearch::testing
