#include "vidsearch/backends/manifests.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vidsearch/errors.hpp"

namespace vidsearch {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RejectedInput("cannot read file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

json load_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw RejectedInput(path + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace

FrameStore::FrameStore(VideoMeta meta, std::map<Timestamp, std::string> paths)
    : meta_(std::move(meta)), paths_(std::move(paths)) {
  meta_.validate();
}

FrameStore FrameStore::load(const std::string& manifest_path) {
  const json j = load_json(manifest_path);
  try {
    const fs::path base = fs::path(manifest_path).parent_path();
    const std::string id = j.at("video_id").get<std::string>();
    const double duration = j.at("duration").get<double>();
    VideoMeta meta;
    if (j.contains("frame_grid")) {
      meta = VideoMeta{id, Timestamp(duration), {}};
      for (double t : j.at("frame_grid").get<std::vector<double>>()) meta.frame_grid.emplace_back(t);
    } else {
      meta = VideoMeta::uniform(id, duration, j.value("grid_step", 1.0));
    }
    std::map<Timestamp, std::string> paths;
    for (const auto& f : j.at("frames")) {
      fs::path p = f.at("path").get<std::string>();
      if (p.is_relative()) p = base / p;
      paths.emplace(Timestamp(f.at("t").get<double>()), p.string());
    }
    return FrameStore(std::move(meta), std::move(paths));
  } catch (const json::exception& e) {
    throw RejectedInput(manifest_path + ": " + e.what());
  }
}

const std::string& FrameStore::path_for(Timestamp t) const {
  auto it = paths_.find(t);
  if (it == paths_.end()) {
    throw RejectedInput("frame store for " + meta_.video_id + " has no image at " +
                        format_seconds(t) + "s");
  }
  return it->second;
}

void FrameStore::require_complete() const {
  for (const auto t : meta_.frame_grid) path_for(t);
}

EmbeddingManifest EmbeddingManifest::load(const std::string& path) {
  const json j = load_json(path);
  try {
    EmbeddingManifest m;
    m.video_id = j.at("video_id").get<std::string>();
    m.model = j.value("model", "");
    if (j.contains("remote_endpoint")) m.remote_endpoint = j.at("remote_endpoint").get<std::string>();
    if (j.contains("frames")) {
      for (const auto& f : j.at("frames")) {
        m.frames.push_back({Timestamp(f.at("t").get<double>()),
                            f.at("embedding").get<std::vector<double>>()});
      }
    }
    if (m.frames.empty() && !m.remote_endpoint) {
      throw RejectedInput(path + ": needs frame embeddings or a remote_endpoint");
    }
    return m;
  } catch (const json::exception& e) {
    throw RejectedInput(path + ": " + e.what());
  }
}

Instruction load_question(const std::string& path) {
  const json j = load_json(path);
  try {
    Instruction ins;
    ins.question = j.at("question").get<std::string>();
    const auto& options = j.at("options");
    if (options.is_array()) {
      ins.options = lettered_options(options.get<std::vector<std::string>>());
    } else {
      for (const auto& [label, text] : options.items()) {
        ins.options.push_back({label, text.get<std::string>()});
      }
    }
    if (ins.question.empty() || ins.options.empty()) {
      throw RejectedInput(path + ": question and options must be non-empty");
    }
    return ins;
  } catch (const json::exception& e) {
    throw RejectedInput(path + ": " + e.what());
  }
}

}  // namespace vidsearch
