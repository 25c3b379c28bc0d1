#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "vidsearch/anchors.hpp"
#include "vidsearch/bench.hpp"
#include "vidsearch/errors.hpp"
#include "vidsearch/simenv.hpp"

using namespace vidsearch;

TEST_SUITE("sim") {
  TEST_CASE("episodes are deterministic under seed") {
    EpisodeParams p;
    const auto a = generate_episode(7, p);
    const auto b = generate_episode(7, p);
    CHECK(a.world->evidence == b.world->evidence);
    CHECK(a.world->correct_option == b.world->correct_option);
    REQUIRE(a.world->queries.size() == b.world->queries.size());
    for (std::size_t i = 0; i < a.world->queries.size(); ++i) CHECK(a.world->queries[i].text == b.world->queries[i].text);
    CHECK(generate_episode(8, p).world->evidence != a.world->evidence);
  }

  TEST_CASE("evidence frames are distinct grid points") {
    EpisodeParams p;
    p.evidence_count = 3;
    p.duration = 3600;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto e = generate_episode(seed, p);
      REQUIRE(e.world->evidence.size() == 3);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(e.world->video.on_grid(e.world->evidence[i]));
        if (i > 0) CHECK(e.world->evidence[i - 1] < e.world->evidence[i]);
      }
      CHECK(e.world->answer_threshold == 3);
    }
  }

  TEST_CASE("untightened evidence spreads evenly over thirds") {
    EpisodeParams p;
    p.evidence_count = 1;
    p.duration = 3600;
    p.tightness = 0.0;
    std::array<double, 3> counts{};
    const int n = 1000;
    for (int seed = 0; seed < n; ++seed) {
      const double t = generate_episode(static_cast<std::uint64_t>(seed), p).world->evidence[0].seconds();
      counts[std::min(2, static_cast<int>(t / (p.duration / 3.0)))] += 1;
    }
    double chi2 = 0.0;
    for (const double c : counts) chi2 += (c - n / 3.0) * (c - n / 3.0) / (n / 3.0);
    CHECK(chi2 < 13.8);  // p = 0.001 at two degrees of freedom
  }

  TEST_CASE("tight evidence clusters") {
    EpisodeParams p;
    p.evidence_count = 4;
    p.duration = 7200;
    p.tightness = 0.99;
    const auto e = generate_episode(3, p);
    CHECK(e.world->evidence.back().seconds() - e.world->evidence.front().seconds() <= 0.01 * 7200 + 8);
  }

  TEST_CASE("infeasible parameters are rejected") {
    EpisodeParams p;
    p.duration = 30;
    CHECK_THROWS_AS(generate_episode(1, p), RejectedInput);
    p.duration = 60;
    p.evidence_count = 100;
    CHECK_THROWS_AS(generate_episode(1, p), RejectedInput);
    p.evidence_count = 0;
    CHECK_THROWS_AS(generate_episode(1, p), RejectedInput);
  }

  TEST_CASE("noiseless retrieval peaks on evidence") {
    EpisodeParams p;
    p.evidence_count = 2;
    p.reward_noise_sigma = 0.0;
    p.similarity_noise_sigma = 0.0;
    const auto e = generate_episode(11, p);
    SimRetriever r(e.world);
    const auto& q = e.world->queries[0];
    const auto clips = r.retrieve({q.text, normalize_query_text(q.text)}, 3);
    REQUIRE_FALSE(clips.empty());
    CHECK(clips[0].peak_time == e.world->evidence[q.evidence]);
    CHECK(clips[0].similarity == doctest::Approx(0.9));
    CHECK(r.retrieve({"unknown", "unknown"}, 2)[0].similarity == e.world->background);
  }

  TEST_CASE("sim reward counts evidence the segment owns") {
    EpisodeParams p;
    p.evidence_count = 1;
    p.reward_noise_sigma = 0.0;
    const auto e = generate_episode(5, p);
    SimRewardModel m(e.world);
    const Timestamp t = e.world->evidence[0];
    CHECK(m.score(SegmentInterval(Timestamp(t.seconds() - 4), Timestamp(t.seconds() + 4))).score == 100);
    CHECK(m.score(SegmentInterval(t, Timestamp(t.seconds() + 4))).score == 100);
    CHECK(m.score(SegmentInterval(Timestamp(t.seconds() - 4), t)).score == 0);
    CHECK(m.score(SegmentInterval(Timestamp(t.seconds() + 4), Timestamp(t.seconds() + 8))).score == 0);
  }

  TEST_CASE("late queries surface near their trigger") {
    EpisodeParams p;
    p.evidence_count = 3;
    const auto e = generate_episode(2, p);
    SimQueryExtractor ex(e.world);
    CHECK(ex.generate({}).size() == 2);
    QueryUpdateRequest far{nullptr, {{Timestamp(0), ""}}, {}, 1};
    const auto trigger = e.world->evidence[0];
    QueryUpdateRequest near{nullptr, {{trigger, ""}}, {}, 1};
    const bool far_away = trigger.seconds() > e.world->reveal_radius;
    if (far_away) CHECK(ex.update(far).empty());
    CHECK(ex.update(near).size() == 1);
  }

  TEST_CASE("keyed noise is stable and roughly standard normal") {
    CHECK(keyed_gaussian(1, {2, 3}) == keyed_gaussian(1, {2, 3}));
    CHECK(keyed_gaussian(1, {2, 3}) != keyed_gaussian(1, {3, 2}));
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double g = keyed_gaussian(9, {static_cast<std::uint64_t>(i)});
      sum += g;
      sq += g * g;
    }
    CHECK(std::fabs(sum / n) < 0.05);
    CHECK(std::fabs(sq / n - 1.0) < 0.05);
  }

  TEST_CASE("noiseless episodes with anchors on evidence are always solved") {
    EpisodeConfig config;
    int qualifying = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      EpisodeParams p = episode_params(seed, {});
      p.reward_noise_sigma = 0.0;
      p.similarity_noise_sigma = 0.0;
      const auto o = run_sim_episode(seed, p, config);
      const auto& anchors = o.trace.header.initial_anchors;
      const auto evidence = generate_episode(seed, p).world->evidence;
      const bool anchored = std::all_of(evidence.begin(), evidence.end(), [&](Timestamp e) {
        return std::any_of(anchors.begin(), anchors.end(), [&](const auto& a) { return a.time == e; });
      });
      if (!anchored) continue;
      ++qualifying;
      CAPTURE(seed);
      CHECK(o.success);
    }
    CHECK(qualifying >= 20);
  }

}
