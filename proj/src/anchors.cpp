#include "vidsearch/anchors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "vidsearch/errors.hpp"

namespace vidsearch {

std::string normalize_query_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

bool QuerySet::add(SemanticQuery query) {
  if (query.normalized_text.empty()) query.normalized_text = normalize_query_text(query.text);
  if (query.normalized_text.empty() || contains(query.normalized_text)) return false;
  queries_.push_back(std::move(query));
  return true;
}

bool QuerySet::contains(std::string_view normalized_text) const {
  return std::any_of(queries_.begin(), queries_.end(), [&](const SemanticQuery& q) {
    return q.normalized_text == normalized_text;
  });
}

QueryDiscovery discover_initial_queries(const Instruction& instruction, QueryExtractor& extractor,
                                        const RetryPolicy& retry) {
  if (instruction.question.empty()) throw RejectedInput("instruction question is empty");
  QueryDiscovery out;
  std::vector<std::string> texts;
  try {
    texts = call_with_retry(retry, [&] { return extractor.generate(instruction); }, out.retries);
  } catch (const RetriesExhausted& e) {
    if (e.kind() == FailureKind::transport) throw;
    out.retries = e.retries();
    out.degraded = true;
    out.warnings.push_back(std::string("query discovery: ") + e.what());
    return out;
  }
  for (const auto& text : texts) {
    if (out.queries.size() == kMaxInitialQueries) {
      out.warnings.push_back("query discovery: dropped queries beyond the first 5");
      break;
    }
    out.queries.add(SemanticQuery{text, normalize_query_text(text), 0, QueryOrigin::instruction});
  }
  if (out.queries.empty()) {
    out.degraded = true;
    out.warnings.push_back("query discovery: no usable query; continuing without anchors");
  }
  return out;
}

std::vector<RetrievedClip> retrieve_clips(std::span<const SemanticQuery> queries,
                                          ClipRetriever& retriever, std::size_t top_k,
                                          const RetryPolicy& retry) {
  if (top_k == 0) throw RejectedInput("top_k must be at least 1");
  std::vector<RetrievedClip> all;
  for (const auto& query : queries) {
    int retries = 0;
    auto clips = call_with_retry(retry, [&] { return retriever.retrieve(query, top_k); }, retries);
    if (clips.size() > top_k) clips.erase(clips.begin() + static_cast<std::ptrdiff_t>(top_k), clips.end());
    for (auto& clip : clips) {
      if (!(clip.similarity >= 0.0 && clip.similarity <= 1.0)) {
        throw ContractViolation("retriever returned similarity " + std::to_string(clip.similarity) +
                                " for query '" + query.text + "'");
      }
      if (clip.peak_time < clip.span.start() || clip.peak_time > clip.span.end()) {
        throw ContractViolation("retriever returned a peak outside its clip span");
      }
      if (clip.source_queries.empty()) clip.source_queries.push_back(query.normalized_text);
      all.push_back(std::move(clip));
    }
  }
  return all;
}

std::vector<RetrievedClip> retrieve_clips(const QuerySet& queries, ClipRetriever& retriever,
                                          std::size_t top_k, const RetryPolicy& retry) {
  return retrieve_clips(std::span<const SemanticQuery>(queries.queries()), retriever, top_k, retry);
}

RetrievedClip make_clip(const std::string& source_query, Timestamp peak, double similarity,
                        const VideoMeta& meta, double width) {
  const Timestamp snapped = snap_to_grid(peak, meta);
  const double half = width / 2.0;
  const double lo = std::max(0.0, snapped.seconds() - half);
  const double hi = std::min(meta.duration.seconds(), snapped.seconds() + half);
  Timestamp start = snap_to_grid(Timestamp(lo), meta);
  Timestamp end = snap_to_grid(Timestamp(hi), meta);
  if (start > snapped) start = snapped;
  if (end < snapped) end = snapped;
  if (!(start < end)) {
    // Degenerate window on a coarse grid: widen to the neighbouring grid points.
    const auto& grid = meta.frame_grid;
    auto it = std::lower_bound(grid.begin(), grid.end(), snapped);
    if (it != grid.begin()) start = *(it - 1);
    if (it + 1 != grid.end()) end = *(it + 1);
  }
  return RetrievedClip{{source_query}, snapped, SegmentInterval(start, end), similarity};
}

namespace {

void merge_sources(std::vector<std::string>& into, const std::vector<std::string>& from) {
  std::set<std::string> merged(into.begin(), into.end());
  merged.insert(from.begin(), from.end());
  into.assign(merged.begin(), merged.end());
}

}  // namespace

std::vector<RetrievedClip> dedup_clips(std::span<const RetrievedClip> clips) {
  std::map<std::pair<double, double>, RetrievedClip> by_span;
  for (const auto& clip : clips) {
    const auto key = std::pair(clip.span.start().seconds(), clip.span.end().seconds());
    auto [it, inserted] = by_span.try_emplace(key, clip);
    auto& sources = it->second.source_queries;
    if (inserted) {
      std::sort(sources.begin(), sources.end());
      sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
      continue;
    }
    RetrievedClip& kept = it->second;
    if (clip.similarity > kept.similarity ||
        (clip.similarity == kept.similarity && clip.peak_time < kept.peak_time)) {
      kept.similarity = clip.similarity;
      kept.peak_time = clip.peak_time;
    }
    merge_sources(kept.source_queries, clip.source_queries);
  }
  std::vector<RetrievedClip> out;
  out.reserve(by_span.size());
  for (auto& [key, clip] : by_span) out.push_back(std::move(clip));
  return out;
}

std::vector<std::vector<std::size_t>> cluster_by_overlap(std::span<const RetrievedClip> clips) {
  std::vector<std::size_t> order(clips.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = clips[a].span;
    const auto& cb = clips[b].span;
    if (ca.start() != cb.start()) return ca.start() < cb.start();
    if (ca.end() != cb.end()) return ca.end() < cb.end();
    return a < b;
  });
  std::vector<std::vector<std::size_t>> clusters;
  Timestamp reach;
  for (const std::size_t idx : order) {
    const auto& span = clips[idx].span;
    if (clusters.empty() || span.start() > reach) {
      clusters.push_back({idx});
      reach = span.end();
    } else {
      clusters.back().push_back(idx);
      reach = std::max(reach, span.end());
    }
  }
  for (auto& cluster : clusters) std::sort(cluster.begin(), cluster.end());
  return clusters;
}

AnchorSet select_anchors(std::span<const RetrievedClip> clips,
                         const std::vector<std::vector<std::size_t>>& clusters) {
  AnchorSet out;
  out.clips.assign(clips.begin(), clips.end());
  for (const auto& cluster : clusters) {
    if (cluster.empty()) continue;
    std::size_t best = cluster.front();
    std::vector<std::string> sources;
    for (const std::size_t idx : cluster) {
      const auto& c = clips[idx];
      if (c.similarity > clips[best].similarity ||
          (c.similarity == clips[best].similarity && c.peak_time < clips[best].peak_time)) {
        best = idx;
      }
      merge_sources(sources, c.source_queries);
    }
    out.anchors.push_back(Anchor{clips[best].peak_time, clips[best].similarity, 0, sources});
  }
  std::sort(out.anchors.begin(), out.anchors.end(),
            [](const Anchor& a, const Anchor& b) { return a.frame_time < b.frame_time; });
  for (std::size_t i = 0; i < out.anchors.size(); ++i) {
    out.anchors[i].cluster_id = static_cast<int>(i);
  }
  return out;
}

AnchorSet build_anchor_set(std::span<const RetrievedClip> clips) {
  const auto pool = dedup_clips(clips);
  return select_anchors(pool, cluster_by_overlap(pool));
}

QueryDelta update_queries(std::span<const ObservedFrame> observed, const QuerySet& history,
                          const Instruction& instruction, QueryExtractor& extractor, int round,
                          const RetryPolicy& retry) {
  if (observed.empty()) throw RejectedInput("query update needs at least one observed frame");
  QueryDelta out;
  QueryUpdateRequest request{&instruction, {observed.begin(), observed.end()}, {}, round};
  for (const auto& q : history.queries()) request.history.push_back(q.text);

  std::vector<std::string> texts;
  try {
    texts = call_with_retry(retry, [&] { return extractor.update(request); }, out.retries);
  } catch (const BackendError& e) {
    out.retries = e.retries();
    out.warnings.push_back(std::string("query update: ") + e.what());
    return out;
  }
  QuerySet seen = history;
  for (const auto& text : texts) {
    if (out.added.size() == kMaxQueryDelta) {
      out.warnings.push_back("query update: dropped queries beyond the first 5");
      break;
    }
    SemanticQuery q{text, normalize_query_text(text), round, QueryOrigin::observation};
    if (seen.add(q)) out.added.push_back(std::move(q));
  }
  return out;
}

AnchorRefresh refresh_anchor_set(const AnchorSet& old, std::span<const SemanticQuery> delta,
                                 ClipRetriever& retriever, std::size_t top_k,
                                 const RetryPolicy& retry) {
  if (delta.empty()) return {old, {}};
  std::vector<RetrievedClip> fresh;
  try {
    fresh = retrieve_clips(delta, retriever, top_k, retry);
  } catch (const std::runtime_error& e) {
    return {old, {std::string("anchor refresh kept previous anchors: ") + e.what()}};
  }
  std::vector<RetrievedClip> pool = old.clips;
  pool.insert(pool.end(), fresh.begin(), fresh.end());
  return {build_anchor_set(pool), {}};
}

std::vector<Anchor> anchors_in(const SegmentInterval& interval, const AnchorSet& anchors,
                               Timestamp video_end) {
  const bool closes_video = interval.end() == video_end;
  std::vector<Anchor> out;
  for (const auto& a : anchors.anchors) {
    if (interval.owns(a.frame_time, closes_video)) out.push_back(a);
  }
  return out;
}

}  // namespace vidsearch
