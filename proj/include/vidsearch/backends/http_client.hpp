#pragma once

// JSON-over-HTTP transport and the chat/embeddings wire shapes.

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace vidsearch {

inline constexpr const char* kApiKeyEnv = "VIDSEARCH_API_KEY";

struct BackendProfile {
  enum class Kind { simulated, http };
  Kind kind = Kind::simulated;
  std::string endpoint;  // base URL, e.g. http://localhost:8000/v1
  std::string model_name;
  double request_temperature = 0.5;
  std::chrono::milliseconds timeout{60000};
  int retry_budget = 2;

  // Throws RejectedInput when an http profile lacks endpoint or model.
  void validate() const;
};

// Bearer token from the environment; never read from config files.
std::optional<std::string> api_key_from_env(const char* variable = kApiKeyEnv);

// One POST per call, no retries. Connection failures, timeouts and non-2xx
// statuses throw TransportError; an unparseable body throws MalformedResponse.
// A fresh connection is opened per call, so instances are safe to share.
class JsonHttpClient {
 public:
  JsonHttpClient(const std::string& endpoint, std::chrono::milliseconds timeout,
                 std::optional<std::string> bearer_token = std::nullopt);

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;
  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string endpoint_;
  std::string origin_;     // scheme://host[:port]
  std::string base_path_;  // without trailing slash
  std::chrono::milliseconds timeout_;
  std::optional<std::string> bearer_;
};

// "data:image/jpeg;base64,..." for a file on disk.
std::string image_data_url(const std::string& path);

// POST {base}/chat/completions
//   {"model": m, "temperature": t,
//    "messages": [{"role": "user", "content": [
//        {"type": "text", "text": prompt},
//        {"type": "image_url", "image_url": {"url": "data:..."}}, ...]}]}
// and returns choices[0].message.content.
class ChatClient {
 public:
  ChatClient(JsonHttpClient http, std::string model, double temperature);

  nlohmann::json request_body(const std::string& prompt,
                              std::span<const std::string> image_paths) const;
  std::string complete(const std::string& prompt, std::span<const std::string> image_paths) const;

 private:
  JsonHttpClient http_;
  std::string model_;
  double temperature_;
};

// POST {base}/embeddings {"model": m, "input": [text]} -> data[0].embedding
class EmbeddingClient {
 public:
  EmbeddingClient(JsonHttpClient http, std::string model);
  std::vector<double> embed(const std::string& text) const;

 private:
  JsonHttpClient http_;
  std::string model_;
};

}  // namespace vidsearch
