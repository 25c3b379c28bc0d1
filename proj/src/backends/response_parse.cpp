#include "vidsearch/backends/response_parse.hpp"

#include <cctype>
#include <cmath>
#include <regex>

#include "vidsearch/errors.hpp"

namespace vidsearch {

using ojson = nlohmann::ordered_json;

namespace {

// Index of the bracket closing the one at `open`, or npos.
std::size_t matching_close(std::string_view text, std::size_t open) {
  const char opener = text[open];
  const char closer = opener == '{' ? '}' : ']';
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == opener) {
      ++depth;
    } else if (c == closer) {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

std::optional<int> score_value(const ojson& v) {
  double x = 0.0;
  if (v.is_number()) {
    x = v.get<double>();
  } else if (v.is_string()) {
    static const std::regex number(R"(^\s*(-?\d+(?:\.\d+)?)\s*%?\s*$)");
    std::smatch m;
    const std::string s = v.get<std::string>();
    if (!std::regex_match(s, m, number)) return std::nullopt;
    x = std::stod(m[1].str());
  } else {
    return std::nullopt;
  }
  if (!std::isfinite(x)) return std::nullopt;
  return static_cast<int>(std::lround(x));
}

// "Segment 3", "segment #3", "Segment3" -> 3
std::optional<NodeId> segment_key(const std::string& key) {
  static const std::regex pattern(R"(^\s*[Ss]egment\s*#?\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(key, m, pattern)) return std::nullopt;
  return static_cast<NodeId>(std::stoul(m[1].str()));
}

}  // namespace

std::vector<ojson> extract_json_values(std::string_view text, bool arrays) {
  std::vector<ojson> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c != '{' && !(arrays && c == '[')) {
      ++i;
      continue;
    }
    const std::size_t close = matching_close(text, i);
    if (close != std::string_view::npos) {
      auto parsed = ojson::parse(text.substr(i, close - i + 1), nullptr, false);
      if (!parsed.is_discarded()) {
        out.push_back(std::move(parsed));
        i = close + 1;
        continue;
      }
    }
    ++i;
  }
  return out;
}

ojson extract_single_object(std::string_view text) {
  std::vector<ojson> objects;
  for (auto& v : extract_json_values(text, false)) {
    if (v.is_object()) objects.push_back(std::move(v));
  }
  if (objects.empty()) throw MalformedResponse("no JSON object found in model response");
  if (objects.size() > 1) {
    throw MalformedResponse("ambiguous model response: " + std::to_string(objects.size()) +
                            " JSON objects");
  }
  return std::move(objects.front());
}

RewardResponse parse_reward_response(std::string_view text, std::span<const NodeId> ids) {
  const ojson object = extract_single_object(text);
  RewardResponse out;
  out.segments.resize(ids.size());
  for (const auto& [key, value] : object.items()) {
    const auto id = segment_key(key);
    if (!id) continue;
    // {"explanation": str, "score": n} or the terser [str, n].
    std::optional<int> score;
    std::string explanation;
    if (value.is_object()) {
      if (value.contains("score")) score = score_value(value.at("score"));
      if (value.contains("explanation") && value.at("explanation").is_string()) {
        explanation = value.at("explanation").get<std::string>();
      }
    } else if (value.is_array() && value.size() == 2 && value.at(0).is_string()) {
      score = score_value(value.at(1));
      explanation = value.at(0).get<std::string>();
    }
    if (!score) continue;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] != *id || out.segments[i]) continue;
      out.segments[i] = SegmentReward{std::move(explanation), *score};
      break;
    }
  }
  return out;
}

std::vector<std::string> parse_query_response(std::string_view text) {
  auto collect = [](const ojson& container) {
    std::vector<std::string> out;
    for (const auto& v : container) {
      if (!v.is_string()) throw MalformedResponse("query payload holds a non-string value");
      out.push_back(v.get<std::string>());
    }
    return out;
  };
  std::vector<ojson> objects;
  std::vector<ojson> arrays;
  for (auto& v : extract_json_values(text, true)) {
    (v.is_object() ? objects : arrays).push_back(std::move(v));
  }
  if (objects.size() == 1) return collect(objects.front());
  if (objects.empty() && arrays.size() == 1) return collect(arrays.front());
  if (objects.empty() && arrays.empty()) throw MalformedResponse("no query payload found");
  throw MalformedResponse("ambiguous query payload");
}

}  // namespace vidsearch
