#include "vidsearch/backends/prompts.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "vidsearch/errors.hpp"

namespace vidsearch {
namespace {

constexpr std::string_view kRewardFirst =
    R"(/* Task Description */
You are acting as a reward model to guide the video question-answering process, with access to a {duration}-frame video ({duration} seconds in duration). You are provided with {frame_number} uniformly sampled frames from the video, at the following frame indices: {frame_block}, which divide the video into {segment_number} distinct segments.

/* Segment Information */
{segment_block}

/* Reward Instruction */
Your task is to evaluate the relevance of each segment in answering the question below, to assist in identifying the segment(s) that most effectively answer the question.
Question: {question}
Options: {options}
Treat the start and end frames of every sub-segment as cues for reconstructing what the segment might contain. Use these cues to judge how informative the segment is for answering the question and assign a score between 0% and 100%. Explain how the boundary frames shape your interpretation and why they lead you to the assigned relevance score. Please give the answer in the format: {"Segment #": {"explanation": str, "score": int}})";

constexpr std::string_view kRewardFollowing =
    R"(/* Task Description */
You are acting as a reward model in a multi-round video question-answering process. You have access to a {duration}-frame video ({duration} seconds), along with results from a previous round of evaluation. In this round, one specific segment has been further divided to provide more detailed analysis. You are provided with {N} new sampled frames to assess these sub-segments in relation to the question, at the following frame indices: {frame_block}.

/* Goal Question and Options*/
Question:{question}
Options:{options}

/* Historical Segment Information */
In the last round, the video was divided into {candidate_count} segments, each evaluated for its relevance to the goal question. Here are the results from all previous rounds:
{historical_block}

/* Current Segment Information */
In this round, segment {parent_label} has been further explored with {frame_number} new uniformly sampled frames, dividing it into {segment_number} new sub-segments:
{segment_block}

/* Reward Instruction */
Your task is to evaluate these new sub-segments for relevance to the original goal question based on provided frames, while considering the context and results from previous rounds. Treat the start and end frames of every sub-segment as cues for reconstructing what the segment might contain. Use these cues to judge how informative the segment is for answering the question and assign a score between 0% and 100%. Explain how the boundary frames shape your interpretation and why they lead you to the assigned relevance score. Please respond in the format: {"Segment #": {"explanation": str, "score": int}})";

constexpr std::string_view kSelection =
    R"(/* Task Description */
You are a helpful assistant with access to a video that is {duration} frames long ({duration} seconds).
You are tasked with exploring the video to gather the information needed to answer a specific question with complete confidence.
Question:{question}
Options:{options}
At each step, you may select one segment of the video to examine. Once you choose a segment, you will receive a set of representative frames sampled from that segment. Use each exploration step strategically to uncover key details, progressively refining your understanding of the video’s content. Continue exploring as needed until you have acquired all information necessary to answer the question.
In this round, you are provided with {memory_count} sampled frames stored in the memory module, with frame indices: {memory_indices}. In the history exploration process, the video has been divided into {candidate_total} distinct segments, each covering a specific interval. The interval and relevance score for each segment are detailed below.

/* Segment Information */
{candidate_block}

/* Exploration Instruction */
For each segment, we provide a fused score that adaptively combines two components to support your exploration: (1) an intrinsic reward, computed by an auxiliary video assistant based on the segment’s relevance to the question, and (2) a query score that reflects how many relevant clips are contained in the segment . Focus on the segments most likely to contain key information for confidently answering the question. Now, proceed with your exploration, selecting the segment you wish to explore. Please provide your choice in the following format: {Segment: int}.

Before drawing a conclusion, examine the relevant details as thoroughly as possible to gather sufficient information. Every action you take should aim to deepen your understanding of the video, especially the parts related to the question. You have ample time, so focus on providing the most accurate answer possible.

If you have enough information to answer the question, select the best answer from the options and directly provide the answer without giving any explanation.)";

constexpr std::string_view kQueryGeneration =
    R"(/* Role */
Produce short text queries for a VideoCLIP-style retriever.

/* Input */
ONE multiple-choice question about a video (with options).
Question: {question}
Options: {options}

/* Goal */
Do not answer the question. Convert the question into 1-5 stand-alone semantic queries that can be fed directly into the text encoder to retrieve relevant clips.

/* Output Format */
- Return only a JSON array of strings, length 1-5, no extra text.
- Each query must contain 6-12 lowercase words, concise and concrete.

/* Writing Rules */
1) Prefer copying key phrases from the question/options; avoid adding specific names, places, colors, or timestamps that are not present in the input.
2) If the question includes a temporal anchor (e.g., "after the interview with xxx"), include that anchor verbatim.
3) Each query should be a compact description: [temporal anchor if any] + [target from options] + [simple action or neutral cue].
4) No duplicates. If fewer high-quality queries are possible, output fewer.

/* Example Format Only (not content) */
Reply strictly in JSON format as:
{"query1": "...", "query2": "...", ...}
with no additional text.)";

constexpr std::string_view kQueryUpdate =
    R"(You are a video-understanding assistant.

/* Input Information */
- Frames with timestamps: {time_of_frames}
- A multiple-choice question with options
Question: {question}
Options: {options}
- Historical semantic queries information (already known):
{history_queries}

/* Task */
From the current frames only, extract new, concrete semantic queries that can guide subsequent retrieval or exploration toward answering the question.

/* Strict Rules */
1) Output only short, concrete semantic queries (nouns or verb-noun phrases with less than 10 words). No full sentences.
2) Each query must be directly grounded in the provided frames and must not appear in the historical information.
3) Avoid generic words ("scene", "shot", "clip") and avoid speculation (no unseen colors, names, or places).
4) Provide 2-5 items. If no new cues exist, return an empty dict {}.
5) Prefer salient, discriminative tokens that are easy to search (objects, OCR snippets, logos, tools, distinctive props, on-screen text, gestures, sound-indicated events).

/* Output Format */
Reply strictly in JSON as:
{"query1": "...", "query2": "...", ...}
with no extra text.

/* Negative Example (do NOT do this) */
- ["Frame 6 shows the villain in a shattered mirror environment with broken glass pieces around"])";

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Placeholder names: {identifier} with at least one letter.
std::set<std::string> placeholders(std::string_view tmpl) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < tmpl.size() && is_name_char(tmpl[j])) ++j;
    if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
      out.emplace(tmpl.substr(i + 1, j - i - 1));
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

std::vector<Timestamp> frame_times(std::span<const ObservedFrame> frames) {
  std::vector<Timestamp> out;
  for (const auto& f : frames) out.push_back(f.time);
  return out;
}

}  // namespace

std::string_view prompt_template(PromptKind kind) {
  switch (kind) {
    case PromptKind::reward_first: return kRewardFirst;
    case PromptKind::reward_following: return kRewardFollowing;
    case PromptKind::selection: return kSelection;
    case PromptKind::query_generation: return kQueryGeneration;
    case PromptKind::query_update: return kQueryUpdate;
  }
  return {};
}

std::string_view prompt_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::reward_first: return "reward_first";
    case PromptKind::reward_following: return "reward_following";
    case PromptKind::selection: return "selection";
    case PromptKind::query_generation: return "query_generation";
    case PromptKind::query_update: return "query_update";
  }
  return {};
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& bindings) {
  const auto names = placeholders(tmpl);
  for (const auto& [name, value] : bindings) {
    if (!names.count(name)) throw RejectedInput("template has no placeholder {" + name + "}");
  }
  for (const auto& name : names) {
    if (!bindings.count(name)) throw RejectedInput("placeholder {" + name + "} is unbound");
  }
  std::string out;
  out.reserve(tmpl.size() * 2);
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && is_name_char(tmpl[j])) ++j;
      if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
        auto it = bindings.find(std::string(tmpl.substr(i + 1, j - i - 1)));
        if (it != bindings.end()) {
          out += it->second;
          i = j;
          continue;
        }
      }
    }
    out += tmpl[i];
  }
  return out;
}

std::string frame_block(std::span<const Timestamp> times) {
  std::vector<std::string> parts;
  for (const auto t : times) parts.push_back(format_seconds(t));
  return join(parts, ", ");
}

std::string time_of_frames(std::span<const Timestamp> times) {
  std::vector<std::string> parts;
  for (const auto t : times) parts.push_back(format_seconds(t) + "s");
  return join(parts, ", ");
}

std::string segment_block(std::span<const NodeId> ids, std::span<const SegmentInterval> segments) {
  if (ids.size() != segments.size()) throw RejectedInput("segment ids and intervals differ in length");
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    lines.push_back("Segment " + std::to_string(ids[i]) + ": [" +
                    format_seconds(segments[i].start()) + "s, " +
                    format_seconds(segments[i].end()) + "s]");
  }
  return join(lines, "\n");
}

std::string historical_block(std::span<const RewardRecord> history) {
  std::vector<std::string> lines;
  for (const auto& r : history) {
    lines.push_back("Segment " + std::to_string(r.node) + ": [" +
                    format_seconds(r.interval.start()) + "s, " +
                    format_seconds(r.interval.end()) + "s], score=" +
                    std::to_string(r.raw_score) + ", explanation=" + one_line(r.trace));
  }
  return join(lines, "\n");
}

std::string candidate_block(std::span<const CandidateView> candidates) {
  std::vector<std::string> lines;
  for (const auto& c : candidates) {
    lines.push_back("Segment " + std::to_string(c.id) + ": span=[" +
                    format_seconds(c.interval.start()) + "," + format_seconds(c.interval.end()) +
                    "], score=" + format_score(c.fused_score) +
                    ", explanation=" + one_line(c.explanation));
  }
  return join(lines, "\n");
}

std::string history_queries_block(std::span<const std::string> queries) {
  if (queries.empty()) return "(none)";
  std::vector<std::string> lines;
  for (const auto& q : queries) lines.push_back("- " + q);
  return join(lines, "\n");
}

std::string format_score(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

std::string render_reward_prompt(const RewardRequest& request) {
  if (request.instruction == nullptr) throw RejectedInput("reward request without instruction");
  const auto times = frame_times(request.frames);
  std::map<std::string, std::string> b{
      {"duration", format_seconds(request.duration)},
      {"frame_number", std::to_string(request.frames.size())},
      {"frame_block", frame_block(times)},
      {"segment_number", std::to_string(request.segments.size())},
      {"segment_block", segment_block(request.segment_ids, request.segments)},
      {"question", request.instruction->question},
      {"options", request.instruction->options_text()},
  };
  if (request.kind == RoundKind::first) {
    return render_template(kRewardFirst, b);
  }
  b["N"] = std::to_string(request.frames.size());
  b["candidate_count"] = std::to_string(request.candidate_count);
  b["historical_block"] = historical_block(request.history);
  b["parent_label"] = request.parent_label;
  return render_template(kRewardFollowing, b);
}

std::string render_selection_prompt(const PolicyRequest& request) {
  if (request.instruction == nullptr) throw RejectedInput("policy request without instruction");
  const auto times = frame_times(request.memory_frames);
  std::string text = render_template(
      kSelection, {
                      {"duration", format_seconds(request.duration)},
                      {"question", request.instruction->question},
                      {"options", request.instruction->options_text()},
                      {"memory_count", std::to_string(request.memory_frames.size())},
                      {"memory_indices", frame_block(times)},
                      {"candidate_total", std::to_string(request.candidates.size())},
                      {"candidate_block", candidate_block(request.candidates)},
                  });
  if (request.answer_now) {
    text += "\n\n";
    text += kAnswerNowDirective;
  }
  return text;
}

std::string render_query_generation_prompt(const Instruction& instruction) {
  return render_template(kQueryGeneration, {{"question", instruction.question},
                                            {"options", instruction.options_text()}});
}

std::string render_query_update_prompt(const QueryUpdateRequest& request) {
  if (request.instruction == nullptr) throw RejectedInput("query update without instruction");
  const auto times = frame_times(request.frames);
  return render_template(kQueryUpdate, {{"time_of_frames", time_of_frames(times)},
                                        {"question", request.instruction->question},
                                        {"options", request.instruction->options_text()},
                                        {"history_queries", history_queries_block(request.history)}});
}

}  // namespace vidsearch
