#pragma once

// Tolerant extraction of structured payloads from model text.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vidsearch/backends/interfaces.hpp"

namespace vidsearch {

// Every top-level balanced {...} (and, when `arrays` is set, [...]) span of
// `text` that parses as JSON, in order of appearance. Braces inside JSON
// strings are respected; a span that fails to parse is skipped and its
// interior scanned again.
std::vector<nlohmann::ordered_json> extract_json_values(std::string_view text, bool arrays);

// The single JSON object embedded in `text`. Throws MalformedResponse when
// there is none or more than one.
nlohmann::ordered_json extract_single_object(std::string_view text);

// Reward payload keyed "Segment <id>". One slot per id, in order; a segment
// that is absent or lacks a usable score is nullopt. Throws MalformedResponse
// when no single object can be extracted.
RewardResponse parse_reward_response(std::string_view text, std::span<const NodeId> ids);

// Query payload: a keyed object (values in key order of appearance) or an
// array of strings. An empty object yields an empty list.
std::vector<std::string> parse_query_response(std::string_view text);

}  // namespace vidsearch
