#pragma once

// Flat YAML run configuration. Every key is listed in config_keys();
// precedence is command line > config file > defaults.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vidsearch/backends/http_client.hpp"
#include "vidsearch/bench.hpp"
#include "vidsearch/engine.hpp"
#include "vidsearch/simenv.hpp"

namespace vidsearch {

struct RunConfig {
  EpisodeConfig episode;
  BackendProfile backend;
  // Synthetic input.
  EpisodeParams sim;
  // Live input. Exactly one of the two sources may be used by a run.
  std::string frame_manifest;
  std::string embedding_manifest;
  std::string question_file;
  std::string retriever_endpoint;  // embeddings endpoint; defaults to backend.endpoint
  std::string embedding_model;
  double clip_width = 8.0;
  // Bench and sweep.
  std::size_t episodes = 200;
  std::uint64_t base_seed = 20240611;
  unsigned workers = 1;
  SimRanges ranges;
  std::vector<std::string> arms{"full", "uniform", "intrinsic", "no-qu"};
  std::vector<int> sweep_values{0, 1, 2, 3, 4, 5, 6};
  // Outputs.
  std::string out = "out";

  bool live_input() const { return !frame_manifest.empty(); }
  // Throws RejectedInput for a half-specified live source or invalid values.
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string description;
};

const std::vector<ConfigKey>& config_keys();

// Sets one key from its text form. Throws RejectedInput for an unknown key
// or an unparseable value.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);

// Top-level scalar (or scalar list) mapping. Keys that look like secrets are
// rejected; tokens come from the environment only.
std::map<std::string, std::string> parse_config_text(const std::string& yaml);
std::map<std::string, std::string> load_config_file(const std::string& path);

// defaults, then file values, then command-line overrides.
RunConfig resolve_config(const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& cli_values);

}  // namespace vidsearch
