#include "vidsearch/config.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "vidsearch/backends/manifests.hpp"
#include "vidsearch/errors.hpp"

namespace vidsearch {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw RejectedInput("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw RejectedInput("config key '" + key + "': cannot parse '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw RejectedInput("config key '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

// Shortest text that round-trips.
std::string show(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "," : "") << items[i];
  return out.str();
}

struct KeyDef {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define VS_DOUBLE(name, field, desc)                                                         \
  KeyDef{{name, desc},                                                                       \
         [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_double(k, v); }, \
         [](const RunConfig& c) { return show(c.field); }}
#define VS_INT(name, field, type, desc)                                                      \
  KeyDef{{name, desc},                                                                       \
         [](RunConfig& c, const std::string& k, const std::string& v) {                      \
           c.field = parse_number<type>(k, v);                                               \
         },                                                                                  \
         [](const RunConfig& c) { return std::to_string(c.field); }}
#define VS_BOOL(name, field, desc)                                                           \
  KeyDef{{name, desc},                                                                       \
         [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_bool(k, v); }, \
         [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); }}
#define VS_STRING(name, field, desc)                                                         \
  KeyDef{{name, desc},                                                                       \
         [](RunConfig& c, const std::string&, const std::string& v) { c.field = v; },        \
         [](const RunConfig& c) { return c.field; }}

const std::vector<KeyDef>& registry() {
  static const std::vector<KeyDef> keys = {
      VS_INT("total_frames", episode.budget.total_frames, int, "frames sampled per expansion (B)"),
      VS_INT("anchor_frames", episode.budget.anchor_frames, int, "anchor frames per expansion (B_s)"),
      VS_DOUBLE("tau_c", episode.tau_c, "query-score pooling temperature"),
      VS_DOUBLE("reward_logit_scale", episode.reward_logit_scale, "softmax logit scale for r in the entropy"),
      VS_INT("memory_capacity", episode.memory_capacity, std::size_t, "memory buffer capacity"),
      VS_INT("retrieval_top_k", episode.retrieval_top_k, std::size_t, "clips retrieved per query"),
      VS_INT("max_rounds", episode.max_rounds, int, "round limit"),
      VS_INT("max_total_frames", episode.max_total_frames, int, "frame budget per episode"),
      VS_INT("seed", episode.seed, std::uint64_t, "episode seed"),
      VS_BOOL("fusion", episode.fusion, "fuse r with u (false: h = r)"),
      VS_BOOL("query_update", episode.query_update, "extract new queries each round"),
      VS_BOOL("anchors", episode.anchors, "retrieve clips and select semantic anchors"),
      VS_BOOL("record_wall_time", episode.record_wall_time, "record wall_ms per round"),
      KeyDef{{"retry_budget", "retries per backend call"},
             [](RunConfig& c, const std::string& k, const std::string& v) {
               c.backend.retry_budget = parse_number<int>(k, v);
               c.episode.retry.max_retries = c.backend.retry_budget;
             },
             [](const RunConfig& c) { return std::to_string(c.backend.retry_budget); }},
      KeyDef{{"retry_base_delay_ms", "backoff before the first retry"},
             [](RunConfig& c, const std::string& k, const std::string& v) {
               c.episode.retry.base_delay = std::chrono::milliseconds(parse_number<long>(k, v));
             },
             [](const RunConfig& c) { return std::to_string(c.episode.retry.base_delay.count()); }},
      KeyDef{{"backend", "simulated or http"},
             [](RunConfig& c, const std::string& k, const std::string& v) {
               if (v == "simulated") {
                 c.backend.kind = BackendProfile::Kind::simulated;
               } else if (v == "http") {
                 c.backend.kind = BackendProfile::Kind::http;
               } else {
                 throw RejectedInput("config key '" + k + "': expected simulated or http");
               }
             },
             [](const RunConfig& c) {
               return std::string(c.backend.kind == BackendProfile::Kind::http ? "http" : "simulated");
             }},
      VS_STRING("endpoint", backend.endpoint, "chat completions base URL"),
      VS_STRING("model_name", backend.model_name, "chat model"),
      VS_DOUBLE("request_temperature", backend.request_temperature, "sampling temperature"),
      KeyDef{{"timeout_ms", "per-request timeout"},
             [](RunConfig& c, const std::string& k, const std::string& v) {
               c.backend.timeout = std::chrono::milliseconds(parse_number<long>(k, v));
             },
             [](const RunConfig& c) { return std::to_string(c.backend.timeout.count()); }},
      VS_STRING("frame_manifest", frame_manifest, "frame store manifest (live input)"),
      VS_STRING("embedding_manifest", embedding_manifest, "embedding manifest (live input)"),
      VS_STRING("question_file", question_file, "question JSON (live input)"),
      VS_STRING("retriever_endpoint", retriever_endpoint, "embeddings base URL"),
      VS_STRING("embedding_model", embedding_model, "embedding model"),
      VS_DOUBLE("clip_width", clip_width, "retrieved clip span in seconds"),
      VS_DOUBLE("duration", sim.duration, "synthetic video length"),
      VS_INT("evidence_count", sim.evidence_count, std::size_t, "planted evidence frames"),
      VS_DOUBLE("tightness", sim.tightness, "evidence clustering in [0,1]"),
      VS_DOUBLE("reward_noise_sigma", sim.reward_noise_sigma, "simulated reward noise"),
      VS_DOUBLE("similarity_noise_sigma", sim.similarity_noise_sigma, "simulated retrieval noise"),
      KeyDef{{"answer_threshold", "evidence frames needed to answer (0: all)"},
             [](RunConfig& c, const std::string& k, const std::string& v) {
               const int m = parse_number<int>(k, v);
               c.sim.answer_threshold = m == 0 ? std::nullopt : std::optional<int>(m);
             },
             [](const RunConfig& c) { return std::to_string(c.sim.answer_threshold.value_or(0)); }},
      VS_DOUBLE("reveal_radius", sim.reveal_radius, "distance at which late queries surface"),
      VS_INT("episodes", episodes, std::size_t, "bench episodes per arm"),
      VS_INT("base_seed", base_seed, std::uint64_t, "bench base seed"),
      VS_INT("workers", workers, unsigned, "bench worker threads"),
      VS_DOUBLE("min_duration", ranges.min_duration, "bench duration range"),
      VS_DOUBLE("max_duration", ranges.max_duration, "bench duration range"),
      VS_INT("min_evidence", ranges.min_evidence, std::size_t, "bench evidence range"),
      VS_INT("max_evidence", ranges.max_evidence, std::size_t, "bench evidence range"),
      VS_DOUBLE("bench_reward_noise_sigma", ranges.reward_noise_sigma, "bench reward noise"),
      VS_DOUBLE("bench_similarity_noise_sigma", ranges.similarity_noise_sigma, "bench retrieval noise"),
      KeyDef{{"arms", "bench arms, comma separated"},
             [](RunConfig& c, const std::string&, const std::string& v) { c.arms = split_list(v); },
             [](const RunConfig& c) { return join(c.arms); }},
      KeyDef{{"sweep_values", "B_s values for sweep, comma separated"},
             [](RunConfig& c, const std::string& k, const std::string& v) {
               c.sweep_values.clear();
               for (const auto& item : split_list(v)) c.sweep_values.push_back(parse_number<int>(k, item));
             },
             [](const RunConfig& c) { return join(c.sweep_values); }},
      VS_STRING("out", out, "output path"),
  };
  return keys;
}

#undef VS_DOUBLE
#undef VS_INT
#undef VS_BOOL
#undef VS_STRING

const KeyDef& find_key(const std::string& name) {
  const auto& keys = registry();
  const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeyDef& k) { return k.key.name == name; });
  if (it == keys.end()) throw RejectedInput("unknown config key '" + name + "'");
  return *it;
}

bool looks_secret(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const char* word : {"key", "token", "secret", "password"}) {
    if (key.find(word) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

void RunConfig::validate() const {
  episode.validate();
  const bool any_live = !frame_manifest.empty() || !embedding_manifest.empty() || !question_file.empty();
  if (any_live && (frame_manifest.empty() || embedding_manifest.empty() || question_file.empty())) {
    throw RejectedInput("live input needs frame_manifest, embedding_manifest and question_file together");
  }
  if (live_input() && backend.kind != BackendProfile::Kind::http) {
    throw RejectedInput("live input requires backend: http");
  }
  backend.validate();
  if (!(clip_width > 0.0)) throw RejectedInput("clip_width must be positive");
  if (workers < 1) throw RejectedInput("workers must be at least 1");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& k : registry()) out.push_back(k.key);
    return out;
  }();
  return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  find_key(key).set(config, key, value);
}

std::string get_config_value(const RunConfig& config, const std::string& key) {
  return find_key(key).get(config);
}

std::map<std::string, std::string> parse_config_text(const std::string& yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw RejectedInput(std::string("config is not valid YAML: ") + e.what());
  }
  std::map<std::string, std::string> out;
  if (root.IsNull()) return out;
  if (!root.IsMap()) throw RejectedInput("config must be a mapping of keys to values");
  for (const auto& entry : root) {
    const auto key = entry.first.as<std::string>();
    if (looks_secret(key)) {
      throw RejectedInput("config key '" + key + "' looks like a secret; set " +
                          std::string(kApiKeyEnv) + " in the environment instead");
    }
    find_key(key);
    const auto& value = entry.second;
    if (value.IsScalar()) {
      out[key] = value.as<std::string>();
    } else if (value.IsSequence()) {
      std::vector<std::string> items;
      for (const auto& item : value) items.push_back(item.as<std::string>());
      out[key] = join(items);
    } else {
      throw RejectedInput("config key '" + key + "' must be a scalar or a list");
    }
  }
  return out;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  return parse_config_text(read_file(path));
}

RunConfig resolve_config(const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& cli_values) {
  RunConfig config;
  for (const auto& [k, v] : file_values) set_config_value(config, k, v);
  for (const auto& [k, v] : cli_values) set_config_value(config, k, v);
  return config;
}

}  // namespace vidsearch
