#include "vidsearch/backends/http_client.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <openssl/evp.h>

#include "vidsearch/backends/manifests.hpp"
#include "vidsearch/errors.hpp"

namespace vidsearch {

using json = nlohmann::json;

void BackendProfile::validate() const {
  if (kind != Kind::http) return;
  if (endpoint.empty()) throw RejectedInput("http backend requires an endpoint");
  if (model_name.empty()) throw RejectedInput("http backend requires a model name");
  if (timeout.count() <= 0) throw RejectedInput("http backend timeout must be positive");
  if (retry_budget < 0) throw RejectedInput("retry budget must be non-negative");
}

std::optional<std::string> api_key_from_env(const char* variable) {
  const char* value = std::getenv(variable);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

JsonHttpClient::JsonHttpClient(const std::string& endpoint, std::chrono::milliseconds timeout,
                               std::optional<std::string> bearer_token)
    : endpoint_(endpoint), timeout_(timeout), bearer_(std::move(bearer_token)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, url)) {
    throw RejectedInput("endpoint '" + endpoint + "' is not an http(s) URL");
  }
  origin_ = m[1].str();
  base_path_ = m[2].str();
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

json JsonHttpClient::post(const std::string& path, const json& body) const {
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (bearer_) headers.emplace("Authorization", "Bearer " + *bearer_);
  const std::string target = base_path_ + path;
  auto res = client.Post(target, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + origin_ + target + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("POST " + origin_ + target + " returned HTTP " + std::to_string(res->status),
                         res->status);
  }
  auto parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) {
    throw MalformedResponse("POST " + origin_ + target + " returned a non-JSON body");
  }
  return parsed;
}

std::string image_data_url(const std::string& path) {
  const std::string bytes = read_file(path);
  std::string encoded(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(encoded.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  encoded.resize(static_cast<std::size_t>(n));
  std::string mime = "application/octet-stream";
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == "jpg" || ext == "jpeg") mime = "image/jpeg";
    if (ext == "png") mime = "image/png";
    if (ext == "webp") mime = "image/webp";
  }
  return "data:" + mime + ";base64," + encoded;
}

ChatClient::ChatClient(JsonHttpClient http, std::string model, double temperature)
    : http_(std::move(http)), model_(std::move(model)), temperature_(temperature) {}

json ChatClient::request_body(const std::string& prompt,
                              std::span<const std::string> image_paths) const {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", prompt}});
  for (const auto& path : image_paths) {
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_data_url(path)}}}});
  }
  return {{"model", model_},
          {"temperature", temperature_},
          {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
}

std::string ChatClient::complete(const std::string& prompt,
                                 std::span<const std::string> image_paths) const {
  const json reply = http_.post("/chat/completions", request_body(prompt, image_paths));
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw MalformedResponse("chat response lacks choices[0].message.content");
  }
}

EmbeddingClient::EmbeddingClient(JsonHttpClient http, std::string model)
    : http_(std::move(http)), model_(std::move(model)) {}

std::vector<double> EmbeddingClient::embed(const std::string& text) const {
  const json reply = http_.post("/embeddings", {{"model", model_}, {"input", json::array({text})}});
  try {
    return reply.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw MalformedResponse("embeddings response lacks data[0].embedding");
  }
}

}  // namespace vidsearch
