#include "vidsearch/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vidsearch/backends/http_backends.hpp"
#include "vidsearch/backends/manifests.hpp"
#include "vidsearch/errors.hpp"

namespace vidsearch {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const RunConfig& config) {
  fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw RejectedInput("cannot create output directory " + dir.string());
  }
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw RejectedInput("cannot write " + path.string());
}

struct LiveInput {
  VideoMeta video;
  Instruction instruction;
  Backends backends;
};

LiveInput load_live(const RunConfig& config) {
  auto store = std::make_shared<const FrameStore>(FrameStore::load(config.frame_manifest));
  store->require_complete();
  auto manifest = EmbeddingManifest::load(config.embedding_manifest);
  if (manifest.video_id != store->meta().video_id) {
    throw RejectedInput("embedding manifest video '" + manifest.video_id +
                        "' does not match frame store video '" + store->meta().video_id + "'");
  }
  LiveInput live{store->meta(), load_question(config.question_file), {}};
  const auto token = api_key_from_env();
  const auto& b = config.backend;
  const ChatClient chat(JsonHttpClient(b.endpoint, b.timeout, token), b.model_name, b.request_temperature);
  live.backends.extractor = std::make_shared<HttpQueryExtractor>(chat, store);
  live.backends.reward = std::make_shared<HttpRewardModel>(chat, store);
  live.backends.policy = std::make_shared<HttpPolicyModel>(chat, store);
  if (manifest.remote_endpoint) {
    live.backends.retriever = std::make_shared<RemoteRetriever>(
        JsonHttpClient(*manifest.remote_endpoint, b.timeout, token), live.video, config.clip_width);
  } else {
    const std::string endpoint = config.retriever_endpoint.empty() ? b.endpoint : config.retriever_endpoint;
    const std::string model = config.embedding_model.empty() ? manifest.model : config.embedding_model;
    live.backends.retriever = std::make_shared<EmbeddingRetriever>(
        EmbeddingClient(JsonHttpClient(endpoint, b.timeout, token), model), std::move(manifest),
        live.video, config.clip_width);
  }
  return live;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  fs::path trace_path;
  try {
    config.validate();
    trace_path = output_dir(config) / "trace.jsonl";
    EpisodeConfig episode_config = config.episode;
    episode_config.retry.max_retries = config.backend.retry_budget;
    std::optional<EpisodeResult> result;
    std::string correct;
    try {
      if (config.live_input()) {
        const auto live = load_live(config);
        result = run_episode(live.video, live.instruction, live.backends, episode_config);
      } else {
        const auto episode = generate_episode(episode_config.seed, config.sim);
        correct = episode.world->correct_option;
        result = run_episode(episode.world->video, episode.instruction,
                             make_sim_backends(episode.world), episode_config);
      }
    } catch (const EpisodeError& e) {
      write_trace(trace_path.string(), e.partial_trace());
      err << "error: " << e.what() << "\npartial trace written to " << trace_path.string() << "\n";
      return kExitBackend;
    }
    write_trace(trace_path.string(), result->trace);
    out << "answer: " << result->answer << "\n";
    if (!correct.empty()) out << "correct: " << correct << "\n";
    out << "rounds: " << result->rounds_used << "\n"
        << "frames observed: " << result->frames_observed << "\n"
        << "termination: " << to_string(result->termination) << "\n"
        << "trace: " << trace_path.string() << "\n";
    return kExitOk;
  } catch (const BackendError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

namespace {

BenchOptions bench_options(const RunConfig& config) {
  BenchOptions options;
  options.episodes = config.episodes;
  options.base_seed = config.base_seed;
  options.ranges = config.ranges;
  options.workers = config.workers;
  for (const auto& name : config.arms) options.arms.push_back(standard_arm(name, config.episode));
  return options;
}

}  // namespace

int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    if (config.live_input()) throw RejectedInput("bench runs on synthetic episodes only");
    const auto dir = output_dir(config);
    const auto result = run_bench(bench_options(config));
    const auto table = result.report.table();
    write_text(dir / "bench_report.json", result.report.to_json());
    write_text(dir / "bench_table.txt", table);
    out << table;
    for (const auto& arm : result.report.arms) {
      if (arm.degraded > 0) err << "warning: arm " << arm.name << " degraded in " << arm.degraded << " episodes\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    if (config.live_input()) throw RejectedInput("sweep runs on synthetic episodes only");
    const auto dir = output_dir(config);
    const auto report = run_sweep(config.sweep_values, config.episode, bench_options(config));
    write_text(dir / "sweep.json", report.to_json());
    write_text(dir / "sweep.txt", report.curve());
    out << report.curve();
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

namespace {

std::string fmt(double x, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string span_text(const SegmentInterval& s) {
  return "[" + format_seconds(s.start()) + ", " + format_seconds(s.end()) + "]";
}

}  // namespace

std::string render_trace(const EpisodeTrace& trace) {
  std::ostringstream out;
  const auto& h = trace.header;
  out << "video " << h.video_id << " (" << format_seconds(h.duration) << "s)\n"
      << "question: " << h.question << "\n";
  for (const auto& o : h.options) out << "  " << o << "\n";
  out << "initial queries:";
  for (const auto& q : h.initial_queries) out << " \"" << q << "\"";
  out << (h.degraded ? " (degraded)" : "") << "\n"
      << "initial anchors: " << h.initial_anchors.size() << "\n";
  for (const auto& r : trace.rounds) {
    out << "\nround " << r.round << ": expand node " << r.selected << " " << span_text(r.selected_interval) << "\n";
    out << "  frames:";
    for (const auto& f : r.frames) out << " " << format_seconds(f.time) << (f.from_anchor ? "(anchor)" : "(cover)");
    out << "  radius " << fmt(r.achieved_radius) << "\n";
    for (const auto& c : r.children) {
      out << "  child " << c.id << " " << span_text(c.interval) << " score " << c.raw_score
          << (c.defaulted ? " (defaulted)" : "") << (c.atomic ? " atomic" : "") << "\n";
    }
    out << "  H " << fmt(r.entropy) << "  weights (1-H, H) = (" << fmt(1.0 - r.entropy) << ", "
        << fmt(r.entropy) << ")\n";
    for (const auto& c : r.candidates) {
      out << "  candidate " << c.id << " " << span_text(c.interval) << " r " << fmt(c.intrinsic)
          << " u " << fmt(c.query) << " h " << fmt(c.fused) << "\n";
    }
    out << "  memory " << r.memory_after.size() << "/" << r.memory_capacity << ", +"
        << r.memory_added.size() << " -" << r.memory_evicted.size() << "\n";
    if (!r.queries_added.empty()) {
      out << "  new queries:";
      for (const auto& q : r.queries_added) out << " \"" << q << "\"";
      out << "\n";
    }
    out << "  anchors " << r.anchors.size() << "\n";
    if (r.action.kind == ActionRecord::Kind::answer) {
      out << "  action: answer " << r.action.label;
    } else {
      out << "  action: explore " << r.action.node;
    }
    out << (r.action.forced ? " [forced]" : "") << (r.action.fallback ? " [fallback]" : "") << "\n";
    for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
    if (r.wall_ms) out << "  wall " << fmt(*r.wall_ms, "%.1f") << " ms\n";
  }
  if (trace.result) {
    const auto& res = *trace.result;
    out << "\nresult: " << res.answer << " after " << res.rounds_used << " rounds, "
        << res.frames_observed << " frames (" << to_string(res.termination) << ")\n";
  }
  return out.str();
}

int cmd_show(const std::string& trace_path, std::ostream& out, std::ostream& err) {
  try {
    const auto parsed = read_trace(trace_path);
    out << render_trace(parsed.trace);
    if (parsed.truncated) out << "\n(trace truncated: " << parsed.truncation_reason << ")\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << trace_path << ": " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace vidsearch
