#include "vidsearch/backends/http_backends.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vidsearch/anchors.hpp"
#include "vidsearch/backends/prompts.hpp"
#include "vidsearch/backends/response_parse.hpp"
#include "vidsearch/errors.hpp"

namespace vidsearch {

using json = nlohmann::json;

namespace {

std::vector<std::string> image_paths(const FrameStore* store, std::span<const ObservedFrame> frames) {
  std::vector<ObservedFrame> sorted(frames.begin(), frames.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ObservedFrame& a, const ObservedFrame& b) { return a.time < b.time; });
  std::vector<std::string> out;
  for (const auto& f : sorted) {
    if (!f.image_path.empty()) {
      out.push_back(f.image_path);
    } else if (store != nullptr) {
      out.push_back(store->path_for(f.time));
    }
  }
  return out;
}

}  // namespace

HttpQueryExtractor::HttpQueryExtractor(ChatClient chat, std::shared_ptr<const FrameStore> frames)
    : chat_(std::move(chat)), frames_(std::move(frames)) {}

std::vector<std::string> HttpQueryExtractor::generate(const Instruction& instruction) {
  return parse_query_response(chat_.complete(render_query_generation_prompt(instruction), {}));
}

std::vector<std::string> HttpQueryExtractor::update(const QueryUpdateRequest& request) {
  const auto images = image_paths(frames_.get(), request.frames);
  return parse_query_response(chat_.complete(render_query_update_prompt(request), images));
}

HttpRewardModel::HttpRewardModel(ChatClient chat, std::shared_ptr<const FrameStore> frames)
    : chat_(std::move(chat)), frames_(std::move(frames)) {}

RewardResponse HttpRewardModel::evaluate(const RewardRequest& request) {
  const auto images = image_paths(frames_.get(), request.frames);
  const std::string text = chat_.complete(render_reward_prompt(request), images);
  return parse_reward_response(text, request.segment_ids);
}

HttpPolicyModel::HttpPolicyModel(ChatClient chat, std::shared_ptr<const FrameStore> frames)
    : chat_(std::move(chat)), frames_(std::move(frames)) {}

std::string HttpPolicyModel::decide(const PolicyRequest& request) {
  const auto images = image_paths(frames_.get(), request.memory_frames);
  return chat_.complete(render_selection_prompt(request), images);
}

double cosine_to_similarity(double cosine) { return std::clamp((cosine + 1.0) / 2.0, 0.0, 1.0); }

EmbeddingRetriever::EmbeddingRetriever(EmbeddingClient embedder, EmbeddingManifest manifest,
                                       VideoMeta meta, double clip_width)
    : embedder_(std::move(embedder)),
      manifest_(std::move(manifest)),
      meta_(std::move(meta)),
      clip_width_(clip_width) {}

std::vector<RetrievedClip> EmbeddingRetriever::retrieve(const SemanticQuery& query,
                                                        std::size_t top_k) {
  const auto q = embedder_.embed(query.text);
  const double q_norm = std::sqrt(std::inner_product(q.begin(), q.end(), q.begin(), 0.0));
  struct Hit {
    Timestamp time;
    double similarity;
  };
  std::vector<Hit> hits;
  for (const auto& f : manifest_.frames) {
    if (f.vector.size() != q.size()) {
      throw MalformedResponse("query embedding has dimension " + std::to_string(q.size()) +
                              ", manifest frames have " + std::to_string(f.vector.size()));
    }
    const double f_norm =
        std::sqrt(std::inner_product(f.vector.begin(), f.vector.end(), f.vector.begin(), 0.0));
    const double dot = std::inner_product(q.begin(), q.end(), f.vector.begin(), 0.0);
    const double cosine = (q_norm > 0.0 && f_norm > 0.0) ? dot / (q_norm * f_norm) : 0.0;
    hits.push_back({f.time, cosine_to_similarity(cosine)});
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const Hit& a, const Hit& b) { return a.similarity > b.similarity; });
  if (hits.size() > top_k) hits.resize(top_k);
  std::vector<RetrievedClip> out;
  for (const auto& h : hits) {
    out.push_back(make_clip(query.normalized_text, h.time, h.similarity, meta_, clip_width_));
  }
  return out;
}

RemoteRetriever::RemoteRetriever(JsonHttpClient http, VideoMeta meta, double clip_width)
    : http_(std::move(http)), meta_(std::move(meta)), clip_width_(clip_width) {}

std::vector<RetrievedClip> RemoteRetriever::retrieve(const SemanticQuery& query,
                                                     std::size_t top_k) {
  const json reply =
      http_.post("", {{"video_id", meta_.video_id}, {"query", query.text}, {"top_k", top_k}});
  std::vector<RetrievedClip> out;
  try {
    for (const auto& c : reply.at("clips")) {
      const double peak = c.at("peak_time").get<double>();
      const double similarity = c.at("similarity").get<double>();
      if (!(peak >= 0.0 && peak <= meta_.duration.seconds())) {
        throw ContractViolation("remote retriever returned peak " + std::to_string(peak) +
                                " outside the video");
      }
      out.push_back(make_clip(query.normalized_text, Timestamp(peak), similarity, meta_, clip_width_));
    }
  } catch (const json::exception&) {
    throw MalformedResponse("retriever response lacks clips[].peak_time/similarity");
  }
  return out;
}

}  // namespace vidsearch
