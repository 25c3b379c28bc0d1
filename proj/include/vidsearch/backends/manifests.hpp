#pragma once

// Input files for live runs: frame store, embedding manifest, question.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vidsearch/core/instruction.hpp"
#include "vidsearch/core/timeline.hpp"

namespace vidsearch {

// Pre-extracted frame images of one video.
//
//   {"video_id": "v1", "duration": 120, "grid_step": 1.0,
//    "frames": [{"t": 0, "path": "frames/0000.jpg"}, ...]}
//
// "frame_grid": [...] may replace "grid_step". Relative paths resolve
// against the manifest's directory.
class FrameStore {
 public:
  static FrameStore load(const std::string& manifest_path);
  FrameStore(VideoMeta meta, std::map<Timestamp, std::string> paths);

  const VideoMeta& meta() const noexcept { return meta_; }
  // Throws RejectedInput when no image is registered for t.
  const std::string& path_for(Timestamp t) const;
  // Throws RejectedInput naming the first grid point without an image.
  void require_complete() const;

 private:
  VideoMeta meta_;
  std::map<Timestamp, std::string> paths_;
};

struct FrameEmbedding {
  Timestamp time;
  std::vector<double> vector;
};

// Either local frame embeddings or a remote retriever endpoint.
//
//   {"video_id": "v1", "model": "clip", "frames": [{"t": 0, "embedding": [..]}, ...]}
//   {"video_id": "v1", "remote_endpoint": "http://host:port/retrieve"}
struct EmbeddingManifest {
  std::string video_id;
  std::string model;
  std::vector<FrameEmbedding> frames;
  std::optional<std::string> remote_endpoint;

  static EmbeddingManifest load(const std::string& path);
};

// {"question": "...", "options": ["...", "..."]}; options may also be an
// object keyed by label.
Instruction load_question(const std::string& path);

// Reads a whole file; throws RejectedInput naming the path when unreadable.
std::string read_file(const std::string& path);

}  // namespace vidsearch
