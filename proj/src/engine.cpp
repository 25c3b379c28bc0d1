#include "vidsearch/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <regex>
#include <set>

#include <json.hpp>

#include "vidsearch/core/memory.hpp"
#include "vidsearch/errors.hpp"

namespace vidsearch {

void EpisodeConfig::validate() const {
  budget.validate();
  if (!(tau_c > 0.0)) throw RejectedInput("tau_c must be positive");
  if (!(reward_logit_scale > 0.0)) throw RejectedInput("reward_logit_scale must be positive");
  if (memory_capacity == 0) throw RejectedInput("memory_capacity must be positive");
  if (retrieval_top_k == 0) throw RejectedInput("retrieval_top_k must be positive");
  if (max_rounds < 1) throw RejectedInput("max_rounds must be positive");
  if (max_total_frames < 1) throw RejectedInput("max_total_frames must be positive");
  if (retry.max_retries < 0) throw RejectedInput("retry budget must be non-negative");
}

std::string EpisodeConfig::to_json() const {
  nlohmann::ordered_json j{{"total_frames", budget.total_frames},
                           {"anchor_frames", budget.anchor_frames},
                           {"tau_c", tau_c},
                           {"reward_logit_scale", reward_logit_scale},
                           {"memory_capacity", memory_capacity},
                           {"retrieval_top_k", retrieval_top_k},
                           {"max_rounds", max_rounds},
                           {"max_total_frames", max_total_frames},
                           {"seed", seed},
                           {"fusion", fusion},
                           {"query_update", query_update},
                           {"anchors", anchors},
                           {"retry_budget", retry.max_retries}};
  return j.dump();
}

namespace {

std::string label_alternation(const Instruction& instruction) {
  std::vector<std::string> labels;
  for (const auto& o : instruction.options) labels.push_back(o.label);
  std::sort(labels.begin(), labels.end(),
            [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  std::string alt;
  for (const auto& l : labels) {
    if (!alt.empty()) alt += '|';
    for (const char c : l) {
      if (!std::isalnum(static_cast<unsigned char>(c))) alt += '\\';
      alt += c;
    }
  }
  return "(" + alt + ")";
}

}  // namespace

std::optional<std::string> first_named_option(std::string_view text, const Instruction& instruction) {
  if (instruction.options.empty()) return std::nullopt;
  const std::string labels = label_alternation(instruction);
  const std::string after = "(?![A-Za-z0-9])";
  const std::regex patterns[] = {
      std::regex(R"(^\s*\(?)" + labels + R"(\)?(?:[.:)][\s\S]*)?\s*$)"),
      std::regex(R"([Aa]nswer\s*(?:is|:)?\s*:?\s*\(?)" + labels + after),
      std::regex(R"([Oo]ption\s+\(?)" + labels + after),
      std::regex(R"(\()" + labels + R"(\))"),
  };
  const std::string s(text);
  for (const auto& re : patterns) {
    std::smatch m;
    if (std::regex_search(s, m, re)) return m[1].str();
  }
  return std::nullopt;
}

Decision parse_decision(std::string_view text, const Instruction& instruction) {
  static const std::regex segment(R"re(\{\s*"?[Ss]egment"?\s*:\s*"?(\d+)"?\s*\})re");
  const std::string s(text);
  std::smatch m;
  Decision d;
  if (std::regex_search(s, m, segment)) {
    d.segment = static_cast<NodeId>(std::stoul(m[1].str()));
    return d;
  }
  d.label = first_named_option(text, instruction);
  return d;
}

Evaluation evaluate_children(const RewardRequest& request, SegmentRewardModel& model,
                             const RetryPolicy& retry) {
  const std::size_t n = request.segments.size();
  if (n == 0) throw RejectedInput("no children to evaluate");
  std::vector<std::optional<SegmentReward>> got(n);
  Evaluation out;
  for (int attempt = 0;; ++attempt) {
    RewardResponse response;
    try {
      int retries = 0;
      response = call_with_retry(
          retry,
          [&] {
            auto r = model.evaluate(request);
            if (r.segments.size() != n) {
              throw MalformedResponse("reward response has " + std::to_string(r.segments.size()) +
                                      " slots for " + std::to_string(n) + " segments");
            }
            return r;
          },
          retries);
      out.retries += retries;
    } catch (const RetriesExhausted& e) {
      out.retries += e.retries();
      if (e.kind() == FailureKind::transport) throw;
      out.warnings.push_back(std::string("reward model: ") + e.what());
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!got[i] && response.segments[i]) got[i] = std::move(response.segments[i]);
    }
    const bool complete = std::all_of(got.begin(), got.end(), [](const auto& g) { return g.has_value(); });
    if (complete || attempt >= retry.max_retries) break;
    ++out.retries;
    retry.wait(attempt + 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string label = i < request.segment_ids.size()
                                  ? "Segment " + std::to_string(request.segment_ids[i])
                                  : "segment " + std::to_string(i);
    if (!got[i]) {
      out.children.push_back({"", 0.0, 0, true});
      out.warnings.push_back(label + " missing from reward response; defaulted to 0");
      continue;
    }
    const auto normalized = normalize_intrinsic(got[i]->score);
    if (normalized.warning) out.warnings.push_back(label + ": " + *normalized.warning);
    out.children.push_back({got[i]->explanation, normalized.value, got[i]->score, false});
  }
  return out;
}

namespace {

const CandidateView& best_candidate(const std::vector<CandidateView>& candidates) {
  const CandidateView* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.fused_score > best->fused_score ||
        (c.fused_score == best->fused_score &&
         (c.interval.start() < best->interval.start() ||
          (c.interval.start() == best->interval.start() && c.id < best->id)))) {
      best = &c;
    }
  }
  return *best;
}

}  // namespace

Selection select_action(const PolicyRequest& request, PolicyModel& policy, const RetryPolicy& retry) {
  if (request.candidates.empty()) throw RejectedInput("selection needs at least one candidate");
  if (request.instruction == nullptr) throw RejectedInput("selection needs an instruction");
  Selection out;
  for (int attempt = 0; attempt < 2; ++attempt) {
    int retries = 0;
    std::string text;
    try {
      text = call_with_retry(retry, [&] { return policy.decide(request); }, retries);
    } catch (const RetriesExhausted& e) {
      out.retries += e.retries();
      throw;
    }
    out.retries += retries;
    out.responses.push_back(text);
    const Decision d = parse_decision(text, *request.instruction);
    if (d.segment) {
      const bool present = std::any_of(request.candidates.begin(), request.candidates.end(),
                                       [&](const CandidateView& c) { return c.id == *d.segment; });
      if (present) {
        out.action = {Action::Kind::explore, *d.segment, "", text};
        return out;
      }
      out.warnings.push_back("policy chose segment " + std::to_string(*d.segment) +
                             ", which is not a candidate");
    } else if (d.label) {
      out.action = {Action::Kind::answer, 0, *d.label, text};
      return out;
    } else {
      out.warnings.push_back("policy response could not be parsed");
    }
    if (attempt == 0) ++out.retries;
  }
  const auto& best = best_candidate(request.candidates);
  out.action = {Action::Kind::explore, best.id, "", ""};
  out.fallback = true;
  out.warnings.push_back("falling back to exploring segment " + std::to_string(best.id));
  return out;
}

namespace {

std::vector<AnchorRecord> anchor_records(const AnchorSet& anchors) {
  std::vector<AnchorRecord> out;
  for (const auto& a : anchors.anchors) out.push_back({a.frame_time, a.similarity, a.source_queries});
  return out;
}

class Episode {
 public:
  Episode(const VideoMeta& video, const Instruction& instruction, const Backends& backends,
          const EpisodeConfig& config)
      : video_(video),
        instruction_(instruction),
        backends_(backends),
        config_(config),
        tree_(video.whole()),
        memory_(config.memory_capacity) {}

  EpisodeResult run() {
    initialize();
    NodeId selected = tree_.root();
    for (int round = 1;; ++round) {
      const auto started = std::chrono::steady_clock::now();
      RoundRecord record{.round = round,
                         .selected = selected,
                         .selected_interval = tree_.node(selected).interval};
      const auto action = play_round(round, selected, record);
      if (config_.record_wall_time) {
        record.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - started)
                             .count();
      }
      trace_.rounds.push_back(std::move(record));
      if (action.kind == Action::Kind::answer) {
        trace_.result = TraceResult{action.label, round, frames_observed_, termination_};
        return {action.label, round, frames_observed_, termination_, trace_};
      }
      selected = action.node;
    }
  }

  const EpisodeTrace& trace() const { return trace_; }

 private:
  void initialize() {
    config_.validate();
    video_.validate();
    if (instruction_.options.empty()) throw RejectedInput("instruction has no options");
    if (video_.interior_points(video_.whole()).empty()) {
      throw RejectedInput("video " + video_.video_id + " has no interior grid point to sample");
    }
    auto& h = trace_.header;
    h.video_id = video_.video_id;
    h.duration = video_.duration.seconds();
    h.question = instruction_.question;
    for (const auto& o : instruction_.options) h.options.push_back(o.label + ". " + o.text);
    h.config_json = config_.to_json();

    auto discovery = discover_initial_queries(instruction_, *backends_.extractor, config_.retry);
    queries_ = std::move(discovery.queries);
    h.degraded = discovery.degraded;
    h.retries = discovery.retries;
    h.warnings = std::move(discovery.warnings);
    for (const auto& q : queries_.queries()) h.initial_queries.push_back(q.text);
    if (config_.anchors && !queries_.empty()) {
      anchors_ = build_anchor_set(
          retrieve_clips(queries_, *backends_.retriever, config_.retrieval_top_k, config_.retry));
    }
    h.initial_anchors = anchor_records(anchors_);
  }

  Action play_round(int round, NodeId selected, RoundRecord& record) {
    // Sampling and expansion.
    const SegmentInterval parent = tree_.node(selected).interval;
    const ExpansionResult expansion = expand(parent, anchors_, config_.budget, video_);
    const auto child_ids = tree_.attach_children(selected, expansion.children, round);
    for (const auto id : child_ids) {
      auto& node = tree_.node(id);
      node.atomic = video_.interior_points(node.interval).empty();
    }
    frames_observed_ += static_cast<int>(expansion.frames.size());
    record.achieved_radius = expansion.achieved_radius;
    std::vector<ObservedFrame> observed;
    for (const auto t : expansion.frames) {
      const bool from_anchor = std::binary_search(expansion.anchor_frames_used.begin(),
                                                  expansion.anchor_frames_used.end(), t);
      record.frames.push_back({t, from_anchor});
      observed.push_back({t, ""});
    }

    // Evaluation.
    RewardRequest request{.kind = round == 1 ? RoundKind::first : RoundKind::following,
                          .round = round,
                          .duration = video_.duration,
                          .instruction = &instruction_,
                          .segments = expansion.children,
                          .segment_ids = child_ids,
                          .frames = observed,
                          .history = history_.records(),
                          .parent_label = std::to_string(selected),
                          .candidate_count = candidates_.size()};
    const Evaluation evaluation = evaluate_children(request, *backends_.reward, config_.retry);
    record.retries += evaluation.retries;
    append(record.warnings, evaluation.warnings);
    for (std::size_t i = 0; i < child_ids.size(); ++i) {
      auto& node = tree_.node(child_ids[i]);
      const auto& e = evaluation.children[i];
      node.intrinsic_reward = e.reward;
      node.trace = e.trace;
      node.query_score = query_score(node.interval, anchors_, config_.tau_c, video_.duration);
      named_texts_.push_back(e.trace);
      record.children.push_back({node.id, node.interval, node.atomic, e.raw_score, e.reward,
                                 e.defaulted, e.trace});
    }

    // Candidate update and fusion over all of S.
    candidates_.erase(std::remove(candidates_.begin(), candidates_.end(), selected), candidates_.end());
    for (const auto id : child_ids) {
      if (!tree_.node(id).atomic) candidates_.push_back(id);
    }
    std::sort(candidates_.begin(), candidates_.end(), [&](NodeId a, NodeId b) {
      return tree_.node(a).interval.start() < tree_.node(b).interval.start();
    });
    if (!candidates_.empty()) {
      std::vector<FusionInput> inputs;
      for (const auto id : candidates_) {
        const auto& node = tree_.node(id);
        inputs.push_back({id, *node.intrinsic_reward, *node.query_score});
      }
      const auto fusion = fuse(inputs, config_.tau_c, config_.reward_logit_scale, !config_.fusion);
      record.entropy = fusion.context.entropy;
      for (const auto& b : fusion.bundles) {
        auto& node = tree_.node(b.node);
        node.fused_score = b.fused;
        record.candidates.push_back({b.node, node.interval, b.intrinsic, b.query, b.fused});
      }
    }

    // Logs and memory.
    for (std::size_t i = 0; i < child_ids.size(); ++i) {
      const auto& node = tree_.node(child_ids[i]);
      history_.append({round, node.id, node.interval, *node.trace, evaluation.children[i].raw_score,
                       *node.intrinsic_reward});
    }
    std::vector<MemoryEntry> incoming;
    for (std::size_t i = 0; i < expansion.frames.size(); ++i) {
      const double left = *tree_.node(child_ids[i]).intrinsic_reward;
      const double right = *tree_.node(child_ids[i + 1]).intrinsic_reward;
      incoming.push_back({expansion.frames[i], std::max(left, right), round});
    }
    auto update = update_memory(memory_, incoming);
    memory_ = std::move(update.buffer);
    record.memory_added = incoming;
    record.memory_evicted = std::move(update.evicted);
    record.memory_after = memory_.entries();
    record.memory_capacity = memory_.capacity();

    // Query and anchor update.
    if (config_.query_update) {
      auto delta = update_queries(observed, queries_, instruction_, *backends_.extractor, round,
                                  config_.retry);
      record.retries += delta.retries;
      append(record.warnings, delta.warnings);
      for (const auto& q : delta.added) {
        record.queries_added.push_back(q.text);
        queries_.add(q);
      }
      if (config_.anchors) {
        auto refresh = refresh_anchor_set(anchors_, delta.added, *backends_.retriever,
                                          config_.retrieval_top_k, config_.retry);
        anchors_ = std::move(refresh.anchors);
        append(record.warnings, refresh.warnings);
      }
    }
    record.anchors = anchor_records(anchors_);

    // Selection.
    if (candidates_.empty()) {
      termination_ = Termination::candidates_exhausted;
      record.warnings.push_back("no expandable segment left; answering from memory");
      return forced_answer(record);
    }
    const bool frame_limit = frames_observed_ >= config_.max_total_frames;
    const bool at_limit = frame_limit || round >= config_.max_rounds;
    PolicyRequest policy_request{.round = round,
                                 .duration = video_.duration,
                                 .instruction = &instruction_};
    for (const auto& e : memory_.entries()) policy_request.memory_frames.push_back({e.frame_time, ""});
    for (const auto id : candidates_) {
      const auto& node = tree_.node(id);
      policy_request.candidates.push_back({id, node.interval, *node.fused_score, *node.trace});
    }
    policy_request.answer_now = at_limit;
    const Selection selection = select_action(policy_request, *backends_.policy, config_.retry);
    record.retries += selection.retries;
    append(record.warnings, selection.warnings);
    record.policy_responses = selection.responses;
    append(named_texts_, selection.responses);

    if (at_limit) {
      termination_ = frame_limit ? Termination::forced_by_frame_budget
                                 : Termination::forced_by_round_limit;
    }
    if (selection.action.kind == Action::Kind::answer) {
      record.action = {ActionRecord::Kind::answer, 0, selection.action.label, at_limit, false};
      return selection.action;
    }
    if (at_limit) {
      record.warnings.push_back("policy kept exploring under the answer-now directive");
      return forced_answer(record);
    }
    record.action = {ActionRecord::Kind::explore, selection.action.node, "", false,
                     selection.fallback};
    return selection.action;
  }

  // Most recently named option in any policy or reward text, else the first.
  Action forced_answer(RoundRecord& record) {
    std::string label = instruction_.options.front().label;
    for (auto it = named_texts_.rbegin(); it != named_texts_.rend(); ++it) {
      if (auto named = first_named_option(*it, instruction_)) {
        label = *named;
        break;
      }
    }
    record.action = {ActionRecord::Kind::answer, 0, label, true, true};
    return {Action::Kind::answer, 0, label, ""};
  }

  static void append(std::vector<std::string>& into, const std::vector<std::string>& from) {
    into.insert(into.end(), from.begin(), from.end());
  }

  const VideoMeta& video_;
  const Instruction& instruction_;
  const Backends& backends_;
  const EpisodeConfig& config_;
  SegmentTree tree_;
  RewardHistory history_;
  MemoryBuffer memory_;
  QuerySet queries_;
  AnchorSet anchors_;
  std::vector<NodeId> candidates_;  // S, sorted by start time
  std::vector<std::string> named_texts_;
  int frames_observed_ = 0;
  Termination termination_ = Termination::policy_answered;
  EpisodeTrace trace_;
};

}  // namespace

EpisodeResult run_episode(const VideoMeta& video, const Instruction& instruction,
                          const Backends& backends, const EpisodeConfig& config) {
  if (!backends.extractor || !backends.retriever || !backends.reward || !backends.policy) {
    throw RejectedInput("all four backends are required");
  }
  Episode episode(video, instruction, backends, config);
  try {
    return episode.run();
  } catch (const BackendError& e) {
    throw EpisodeError(e.what(), episode.trace());
  } catch (const ContractViolation& e) {
    throw EpisodeError(e.what(), episode.trace());
  }
}

}  // namespace vidsearch
