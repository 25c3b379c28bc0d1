#pragma once

// Live model backends over the chat/embeddings wire format. Each method makes
// exactly one request; retries belong to the caller.

#include <memory>
#include <optional>
#include <string>

#include "vidsearch/backends/http_client.hpp"
#include "vidsearch/backends/interfaces.hpp"
#include "vidsearch/backends/manifests.hpp"

namespace vidsearch {

class HttpQueryExtractor : public QueryExtractor {
 public:
  HttpQueryExtractor(ChatClient chat, std::shared_ptr<const FrameStore> frames);
  std::vector<std::string> generate(const Instruction& instruction) override;
  std::vector<std::string> update(const QueryUpdateRequest& request) override;

 private:
  ChatClient chat_;
  std::shared_ptr<const FrameStore> frames_;
};

class HttpRewardModel : public SegmentRewardModel {
 public:
  HttpRewardModel(ChatClient chat, std::shared_ptr<const FrameStore> frames);
  RewardResponse evaluate(const RewardRequest& request) override;

 private:
  ChatClient chat_;
  std::shared_ptr<const FrameStore> frames_;
};

class HttpPolicyModel : public PolicyModel {
 public:
  HttpPolicyModel(ChatClient chat, std::shared_ptr<const FrameStore> frames);
  std::string decide(const PolicyRequest& request) override;

 private:
  ChatClient chat_;
  std::shared_ptr<const FrameStore> frames_;
};

// cosine in [-1,1] -> clamp((cos + 1) / 2, 0, 1)
double cosine_to_similarity(double cosine);

// Embeds the query remotely and scans the local frame embeddings; each of
// the top_k most similar frames becomes a clip centred on it.
class EmbeddingRetriever : public ClipRetriever {
 public:
  EmbeddingRetriever(EmbeddingClient embedder, EmbeddingManifest manifest, VideoMeta meta,
                     double clip_width);
  std::vector<RetrievedClip> retrieve(const SemanticQuery& query, std::size_t top_k) override;

 private:
  EmbeddingClient embedder_;
  EmbeddingManifest manifest_;
  VideoMeta meta_;
  double clip_width_;
};

// POST endpoint {"video_id", "query", "top_k"} ->
//   {"clips": [{"peak_time": s, "similarity": x}, ...]}
class RemoteRetriever : public ClipRetriever {
 public:
  RemoteRetriever(JsonHttpClient http, VideoMeta meta, double clip_width);
  std::vector<RetrievedClip> retrieve(const SemanticQuery& query, std::size_t top_k) override;

 private:
  JsonHttpClient http_;
  VideoMeta meta_;
  double clip_width_;
};

}  // namespace vidsearch
