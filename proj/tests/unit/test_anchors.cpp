#include <doctest.h>

#include <random>

#include "support.hpp"
#include "vidsearch/anchors.hpp"
#include "vidsearch/backends/scripted.hpp"
#include "vidsearch/errors.hpp"

using namespace vidsearch;

namespace {

RetrievedClip clip(double a, double b, double peak, double sim, std::string q = "q") {
  return {{std::move(q)}, Timestamp(peak), SegmentInterval(Timestamp(a), Timestamp(b)), sim};
}

const Instruction kInstruction{"What is on the table?", lettered_options({"cup", "pen"})};

}  // namespace

TEST_SUITE("anchors") {
  TEST_CASE("query text normalization") {
    CHECK(normalize_query_text("  Red   CAR\tparked ") == "red car parked");
    QuerySet s;
    CHECK(s.add({"Red car", ""}));
    CHECK_FALSE(s.add({"red  car", ""}));
    CHECK_FALSE(s.add({"   ", ""}));
    CHECK(s.size() == 1);
  }

  TEST_CASE("discovery deduplicates and caps at five") {
    ScriptedExtractor ex;
    ex.generate_script.push_value({"a", "A", "b", "c", "d", "e", "f"});
    const auto d = discover_initial_queries(kInstruction, ex, {});
    CHECK(d.queries.size() == 5);
    CHECK_FALSE(d.degraded);
    CHECK(d.warnings.size() == 1);
  }

  TEST_CASE("discovery degrades on persistent malformed output") {
    ScriptedExtractor ex;
    for (int i = 0; i < 3; ++i) ex.generate_script.push_error(MalformedResponse("not json"));
    const auto d = discover_initial_queries(kInstruction, ex, {});
    CHECK(d.degraded);
    CHECK(d.queries.empty());
    CHECK(d.retries == 2);
  }

  TEST_CASE("discovery rethrows persistent transport failures") {
    ScriptedExtractor ex;
    for (int i = 0; i < 3; ++i) ex.generate_script.push_error(TransportError("down", 503));
    CHECK_THROWS_AS(discover_initial_queries(kInstruction, ex, {}), BackendError);
  }

  TEST_CASE("retrieval validates the retriever contract") {
    ScriptedRetriever r;
    r.clips["q"] = {clip(0, 8, 4, 1.2)};
    QuerySet qs;
    qs.add({"q", ""});
    CHECK_THROWS_AS(retrieve_clips(qs, r, 5, {}), ContractViolation);
    r.clips["q"] = {clip(0, 8, 9, 0.5)};
    CHECK_THROWS_AS(retrieve_clips(qs, r, 5, {}), ContractViolation);
    r.clips["q"] = {clip(0, 8, 4, 0.5), clip(10, 18, 14, 0.4), clip(20, 28, 24, 0.3)};
    CHECK(retrieve_clips(qs, r, 2, {}).size() == 2);
  }

  TEST_CASE("make_clip centres and clamps") {
    const auto v = VideoMeta::uniform("v", 100.0);
    const auto c = make_clip("q", Timestamp(40.3), 0.5, v);
    CHECK(c.peak_time == Timestamp(40));
    CHECK(c.span == SegmentInterval(Timestamp(36), Timestamp(44)));
    const auto edge = make_clip("q", Timestamp(1), 0.5, v);
    CHECK(edge.span == SegmentInterval(Timestamp(0), Timestamp(5)));
  }

  TEST_CASE("dedup keeps the best peak and unions sources") {
    const std::vector<RetrievedClip> pool{clip(0, 8, 3, 0.5, "b"), clip(0, 8, 5, 0.7, "a"),
                                          clip(0, 8, 4, 0.7, "c"), clip(10, 18, 12, 0.1, "a")};
    const auto out = dedup_clips(pool);
    REQUIRE(out.size() == 2);
    CHECK(out[0].similarity == 0.7);
    CHECK(out[0].peak_time == Timestamp(4));
    CHECK(out[0].source_queries == std::vector<std::string>{"a", "b", "c"});
  }

  TEST_CASE("touching clips share a cluster") {
    const std::vector<RetrievedClip> pool{clip(0, 8, 4, 0.5), clip(8, 16, 12, 0.6), clip(17, 20, 18, 0.9)};
    const auto clusters = cluster_by_overlap(pool);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0] == std::vector<std::size_t>{0, 1});
    const auto anchors = select_anchors(pool, clusters);
    REQUIRE(anchors.anchors.size() == 2);
    CHECK(anchors.anchors[0].frame_time == Timestamp(12));
    CHECK(anchors.anchors[1].cluster_id == 1);
  }

  TEST_CASE("anchor ties go to the earlier peak") {
    const std::vector<RetrievedClip> pool{clip(4, 12, 9, 0.8), clip(0, 8, 3, 0.8)};
    const auto a = build_anchor_set(pool);
    REQUIRE(a.anchors.size() == 1);
    CHECK(a.anchors[0].frame_time == Timestamp(3));
  }

  TEST_CASE("sweep clustering matches connected components") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<RetrievedClip> pool;
      const int n = 1 + static_cast<int>(rng() % 12);
      for (int i = 0; i < n; ++i) {
        const double a = static_cast<double>(rng() % 40);
        const double b = a + 1 + static_cast<double>(rng() % 8);
        pool.push_back(clip(a, b, a, 0.5));
      }
      CHECK(testing::canonical(cluster_by_overlap(pool)) == testing::brute_force_components(pool));
    }
  }

  TEST_CASE("query update filters history and survives failures") {
    ScriptedExtractor ex;
    QuerySet history;
    history.add({"red car", ""});
    const std::vector<ObservedFrame> frames{{Timestamp(3), ""}};
    ex.update_script.push_value({"Red Car", "blue umbrella"});
    const auto d = update_queries(frames, history, kInstruction, ex, 2, {});
    REQUIRE(d.added.size() == 1);
    CHECK(d.added[0].normalized_text == "blue umbrella");
    CHECK(d.added[0].round_discovered == 2);
    CHECK(ex.update_script.requests().back().history == std::vector<std::string>{"red car"});

    for (int i = 0; i < 3; ++i) ex.update_script.push_error(TransportError("down", 0));
    const auto failed = update_queries(frames, history, kInstruction, ex, 3, {});
    CHECK(failed.added.empty());
    CHECK(failed.warnings.size() == 1);
    CHECK_THROWS_AS(update_queries({}, history, kInstruction, ex, 3, {}), RejectedInput);
  }

  TEST_CASE("refresh merges new clips and keeps the old set on failure") {
    ScriptedRetriever r;
    const auto old = build_anchor_set(std::vector<RetrievedClip>{clip(0, 8, 4, 0.5)});
    r.clips["new"] = {clip(20, 28, 24, 0.9, "new")};
    const std::vector<SemanticQuery> delta{{"new", "new", 1, QueryOrigin::observation}};
    const auto fresh = refresh_anchor_set(old, delta, r, 5, {});
    CHECK(fresh.anchors.anchors.size() == 2);
    r.clips["new"] = {clip(20, 28, 24, 2.0, "new")};
    const auto kept = refresh_anchor_set(old, delta, r, 5, {});
    CHECK(kept.anchors.anchors.size() == 1);
    CHECK(kept.warnings.size() == 1);
    CHECK(refresh_anchor_set(old, {}, r, 5, {}).anchors.anchors.size() == 1);
  }

  TEST_CASE("anchor ownership is half-open except at the video end") {
    const auto set = build_anchor_set(std::vector<RetrievedClip>{
        clip(36, 44, 40, 0.5), clip(92, 100, 100, 0.7)});
    const Timestamp end(100);
    CHECK(anchors_in(SegmentInterval(Timestamp(0), Timestamp(40)), set, end).empty());
    CHECK(anchors_in(SegmentInterval(Timestamp(40), Timestamp(60)), set, end).size() == 1);
    CHECK(anchors_in(SegmentInterval(Timestamp(60), Timestamp(100)), set, end).size() == 1);
  }
}
