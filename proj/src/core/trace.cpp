#include "vidsearch/core/trace.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "vidsearch/errors.hpp"

namespace vidsearch {

using ojson = nlohmann::ordered_json;

std::string to_string(Termination t) {
  switch (t) {
    case Termination::policy_answered: return "policy_answered";
    case Termination::forced_by_round_limit: return "forced_by_round_limit";
    case Termination::forced_by_frame_budget: return "forced_by_frame_budget";
    case Termination::candidates_exhausted: return "candidates_exhausted";
  }
  return "unknown";
}

Termination termination_from_string(const std::string& s) {
  for (auto t : {Termination::policy_answered, Termination::forced_by_round_limit,
                 Termination::forced_by_frame_budget, Termination::candidates_exhausted}) {
    if (to_string(t) == s) return t;
  }
  throw RejectedInput("unknown termination '" + s + "'");
}

double round_trace_value(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::floor(x * 1e10 + 0.5) / 1e10;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

namespace {

double num(double x) { return round_trace_value(x); }

ojson span_json(const SegmentInterval& s) {
  return ojson::array({num(s.start().seconds()), num(s.end().seconds())});
}

SegmentInterval span_from(const ojson& j) {
  return SegmentInterval(Timestamp(j.at(0).get<double>()), Timestamp(j.at(1).get<double>()));
}

ojson anchor_json(const AnchorRecord& a) {
  return ojson{{"t", num(a.time.seconds())}, {"similarity", num(a.similarity)}, {"queries", a.queries}};
}

AnchorRecord anchor_from(const ojson& j) {
  return {Timestamp(j.at("t").get<double>()), j.at("similarity").get<double>(),
          j.at("queries").get<std::vector<std::string>>()};
}

ojson memory_json(std::span<const MemoryEntry> entries) {
  ojson out = ojson::array();
  for (const auto& e : entries) {
    out.push_back(ojson{{"t", num(e.frame_time.seconds())},
                        {"reward", num(e.associated_reward)},
                        {"round", e.round_observed}});
  }
  return out;
}

std::vector<MemoryEntry> memory_from(const ojson& j) {
  std::vector<MemoryEntry> out;
  for (const auto& e : j) {
    out.push_back({Timestamp(e.at("t").get<double>()), e.at("reward").get<double>(),
                   e.at("round").get<int>()});
  }
  return out;
}

ojson header_json(const TraceHeader& h) {
  ojson anchors = ojson::array();
  for (const auto& a : h.initial_anchors) anchors.push_back(anchor_json(a));
  ojson j{{"type", "header"},
          {"schema", kTraceSchema},
          {"version", kTraceVersion},
          {"video_id", h.video_id},
          {"duration", num(h.duration)},
          {"question", h.question},
          {"options", h.options},
          {"config", h.config_json.empty() ? ojson::object() : ojson::parse(h.config_json)},
          {"initial_queries", h.initial_queries},
          {"initial_anchors", anchors},
          {"degraded", h.degraded},
          {"retries", h.retries},
          {"warnings", h.warnings}};
  return j;
}

ojson round_json(const RoundRecord& r) {
  ojson frames = ojson::array();
  for (const auto& f : r.frames) {
    frames.push_back(ojson{{"t", num(f.time.seconds())},
                           {"source", f.from_anchor ? "anchor" : "coverage"}});
  }
  ojson children = ojson::array();
  for (const auto& c : r.children) {
    children.push_back(ojson{{"id", c.id},
                             {"span", span_json(c.interval)},
                             {"atomic", c.atomic},
                             {"raw_score", c.raw_score},
                             {"r", num(c.intrinsic)},
                             {"defaulted", c.defaulted},
                             {"explanation", c.explanation}});
  }
  ojson candidates = ojson::array();
  for (const auto& c : r.candidates) {
    candidates.push_back(ojson{{"id", c.id},
                               {"span", span_json(c.interval)},
                               {"r", num(c.intrinsic)},
                               {"u", num(c.query)},
                               {"h", num(c.fused)}});
  }
  ojson anchors = ojson::array();
  for (const auto& a : r.anchors) anchors.push_back(anchor_json(a));
  ojson action{{"kind", r.action.kind == ActionRecord::Kind::explore ? "explore" : "answer"}};
  if (r.action.kind == ActionRecord::Kind::explore) {
    action["node"] = r.action.node;
  } else {
    action["label"] = r.action.label;
  }
  action["forced"] = r.action.forced;
  action["fallback"] = r.action.fallback;

  ojson j{{"type", "round"},
          {"round", r.round},
          {"selected", ojson{{"id", r.selected}, {"span", span_json(r.selected_interval)}}},
          {"frames", frames},
          {"radius", num(r.achieved_radius)},
          {"children", children},
          {"entropy", num(r.entropy)},
          {"weights", ojson::array({num(1.0 - r.entropy), num(r.entropy)})},
          {"candidates", candidates},
          {"memory",
           ojson{{"capacity", r.memory_capacity},
                 {"added", memory_json(r.memory_added)},
                 {"evicted", memory_json(r.memory_evicted)},
                 {"after", memory_json(r.memory_after)}}},
          {"queries_added", r.queries_added},
          {"anchors", anchors},
          {"policy_responses", r.policy_responses},
          {"action", action},
          {"retries", r.retries},
          {"warnings", r.warnings}};
  if (r.wall_ms) j["wall_ms"] = num(*r.wall_ms);
  return j;
}

ojson result_json(const TraceResult& r) {
  return ojson{{"type", "result"},
               {"answer", r.answer},
               {"rounds_used", r.rounds_used},
               {"frames_observed", r.frames_observed},
               {"termination", to_string(r.termination)}};
}

TraceHeader header_from(const ojson& j) {
  TraceHeader h;
  h.video_id = j.at("video_id").get<std::string>();
  h.duration = j.at("duration").get<double>();
  h.question = j.at("question").get<std::string>();
  h.options = j.at("options").get<std::vector<std::string>>();
  h.config_json = j.at("config").dump();
  h.initial_queries = j.at("initial_queries").get<std::vector<std::string>>();
  for (const auto& a : j.at("initial_anchors")) h.initial_anchors.push_back(anchor_from(a));
  h.degraded = j.at("degraded").get<bool>();
  h.retries = j.value("retries", 0);
  h.warnings = j.value("warnings", std::vector<std::string>{});
  return h;
}

RoundRecord round_from(const ojson& j) {
  RoundRecord r{.round = j.at("round").get<int>(),
                .selected = j.at("selected").at("id").get<NodeId>(),
                .selected_interval = span_from(j.at("selected").at("span"))};
  for (const auto& f : j.at("frames")) {
    r.frames.push_back({Timestamp(f.at("t").get<double>()), f.at("source") == "anchor"});
  }
  r.achieved_radius = j.at("radius").get<double>();
  for (const auto& c : j.at("children")) {
    r.children.push_back({c.at("id").get<NodeId>(), span_from(c.at("span")),
                          c.at("atomic").get<bool>(), c.at("raw_score").get<int>(),
                          c.at("r").get<double>(), c.at("defaulted").get<bool>(),
                          c.at("explanation").get<std::string>()});
  }
  r.entropy = j.at("entropy").get<double>();
  for (const auto& c : j.at("candidates")) {
    r.candidates.push_back({c.at("id").get<NodeId>(), span_from(c.at("span")),
                            c.at("r").get<double>(), c.at("u").get<double>(),
                            c.at("h").get<double>()});
  }
  const auto& mem = j.at("memory");
  r.memory_capacity = mem.at("capacity").get<std::size_t>();
  r.memory_added = memory_from(mem.at("added"));
  r.memory_evicted = memory_from(mem.at("evicted"));
  r.memory_after = memory_from(mem.at("after"));
  r.queries_added = j.at("queries_added").get<std::vector<std::string>>();
  for (const auto& a : j.at("anchors")) r.anchors.push_back(anchor_from(a));
  r.policy_responses = j.at("policy_responses").get<std::vector<std::string>>();
  const auto& action = j.at("action");
  if (action.at("kind") == "explore") {
    r.action.kind = ActionRecord::Kind::explore;
    r.action.node = action.at("node").get<NodeId>();
  } else {
    r.action.kind = ActionRecord::Kind::answer;
    r.action.label = action.at("label").get<std::string>();
  }
  r.action.forced = action.at("forced").get<bool>();
  r.action.fallback = action.at("fallback").get<bool>();
  r.retries = j.at("retries").get<int>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("wall_ms")) r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

TraceResult result_from(const ojson& j) {
  return {j.at("answer").get<std::string>(), j.at("rounds_used").get<int>(),
          j.at("frames_observed").get<int>(),
          termination_from_string(j.at("termination").get<std::string>())};
}

}  // namespace

std::string to_jsonl(const EpisodeTrace& trace) {
  std::string out = header_json(trace.header).dump() + "\n";
  for (const auto& r : trace.rounds) out += round_json(r).dump() + "\n";
  if (trace.result) out += result_json(*trace.result).dump() + "\n";
  return out;
}

void write_trace(const std::string& path, const EpisodeTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RejectedInput("cannot write trace file " + path);
  out << to_jsonl(trace);
  if (!out) throw RejectedInput("failed while writing trace file " + path);
}

ParsedTrace parse_trace(std::istream& in) {
  ParsedTrace out;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw RejectedInput("trace is empty");
  ojson header;
  try {
    header = ojson::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw RejectedInput("trace header is not valid JSON");
  }
  if (!header.is_object() || header.value("schema", "") != kTraceSchema) {
    throw RejectedInput("not a vidsearch trace (missing schema header)");
  }
  const int version = header.value("version", -1);
  if (version != kTraceVersion) {
    throw RejectedInput("trace schema version " + std::to_string(version) +
                        " is not supported (expected " + std::to_string(kTraceVersion) + ")");
  }
  try {
    out.trace.header = header_from(header);
  } catch (const std::exception& e) {
    throw RejectedInput(std::string("malformed trace header: ") + e.what());
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = ojson::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "round") {
        out.trace.rounds.push_back(round_from(j));
      } else if (type == "result") {
        out.trace.result = result_from(j);
      } else {
        throw RejectedInput("unknown record type '" + type + "'");
      }
    } catch (const std::exception& e) {
      out.truncated = true;
      out.truncation_reason = "line " + std::to_string(line_no) + ": " + e.what();
      return out;
    }
  }
  if (!out.trace.result) {
    out.truncated = true;
    out.truncation_reason = "no result record";
  }
  return out;
}

ParsedTrace read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RejectedInput("cannot open trace file " + path);
  return parse_trace(in);
}

}  // namespace vidsearch
