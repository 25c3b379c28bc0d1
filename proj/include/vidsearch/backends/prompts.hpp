#pragma once

// Prompt templates and the text blocks substituted into them.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vidsearch/backends/interfaces.hpp"

namespace vidsearch {

enum class PromptKind { reward_first, reward_following, selection, query_generation, query_update };

std::string_view prompt_template(PromptKind kind);
std::string_view prompt_name(PromptKind kind);

// Replaces every {name} whose name is bound; other braces are copied as-is.
// Substituted text is never rescanned. Throws RejectedInput when a bound
// name does not occur in the template or a placeholder of the template is
// left unbound.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& bindings);

// "30, 60, 90"
std::string frame_block(std::span<const Timestamp> times);
// "40s, 60s"
std::string time_of_frames(std::span<const Timestamp> times);
// "Segment 1: [0s, 40s]" lines
std::string segment_block(std::span<const NodeId> ids, std::span<const SegmentInterval> segments);
// "Segment 2: [40s, 60s], score=51, explanation=..." lines, oldest first
std::string historical_block(std::span<const RewardRecord> history);
// "Segment 2: span=[40,60], score=0.7, explanation=..." lines
std::string candidate_block(std::span<const CandidateView> candidates);
// "- query" lines, "(none)" when empty
std::string history_queries_block(std::span<const std::string> queries);
// Fixed decimals with trailing zeros trimmed, at least one decimal: 0.51, 1.0
std::string format_score(double x);

// Appended to the selection prompt when the engine demands an answer.
inline constexpr std::string_view kAnswerNowDirective =
    "The exploration budget is exhausted. Answer the question now with the letter of the best "
    "option.";

std::string render_reward_prompt(const RewardRequest& request);
std::string render_selection_prompt(const PolicyRequest& request);
std::string render_query_generation_prompt(const Instruction& instruction);
std::string render_query_update_prompt(const QueryUpdateRequest& request);

}  // namespace vidsearch
