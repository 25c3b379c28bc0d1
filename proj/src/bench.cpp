#include "vidsearch/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vidsearch/errors.hpp"
#include "vidsearch/scoring.hpp"

namespace vidsearch {

using ojson = nlohmann::ordered_json;

void SimRanges::validate() const {
  if (!(min_duration >= 60.0 && max_duration >= min_duration)) {
    throw RejectedInput("duration range must satisfy 60 <= min <= max");
  }
  if (min_evidence < 1 || max_evidence < min_evidence) {
    throw RejectedInput("evidence range must satisfy 1 <= min <= max");
  }
  SimProfile{0, reward_noise_sigma, similarity_noise_sigma}.validate();
}

std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t index) {
  std::uint64_t x = base_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

EpisodeParams episode_params(std::uint64_t seed, const SimRanges& ranges) {
  ranges.validate();
  std::mt19937_64 engine(seed ^ 0xbe9cULL);
  const auto unit = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  EpisodeParams p;
  p.duration = std::floor(ranges.min_duration + (ranges.max_duration - ranges.min_duration) * unit());
  const auto span = ranges.max_evidence - ranges.min_evidence + 1;
  p.evidence_count = ranges.min_evidence + static_cast<std::size_t>(unit() * static_cast<double>(span));
  p.tightness = unit();
  p.reward_noise_sigma = ranges.reward_noise_sigma;
  p.similarity_noise_sigma = ranges.similarity_noise_sigma;
  return p;
}

ArmSpec standard_arm(const std::string& name, const EpisodeConfig& base) {
  ArmSpec arm{name, base};
  if (name == "full") return arm;
  if (name == "uniform") {
    arm.config.budget.anchor_frames = 0;
    arm.config.anchors = false;
  } else if (name == "intrinsic") {
    arm.config.fusion = false;
  } else if (name == "no-qu") {
    arm.config.query_update = false;
  } else {
    throw RejectedInput("unknown arm '" + name + "' (expected full, uniform, intrinsic or no-qu)");
  }
  return arm;
}

std::vector<ArmSpec> standard_arms(const EpisodeConfig& base) {
  std::vector<ArmSpec> out;
  for (const char* name : {"full", "uniform", "intrinsic", "no-qu"}) out.push_back(standard_arm(name, base));
  return out;
}

std::size_t histogram_bin(double entropy) {
  const auto bin = static_cast<std::size_t>(std::clamp(entropy, 0.0, 1.0) * kHistogramBins);
  return std::min(bin, kHistogramBins - 1);
}

EntropyHistograms entropy_histograms(const std::vector<EpisodeTrace>& traces, double logit_scale) {
  EntropyHistograms out;
  std::vector<double> r;
  std::vector<double> h;
  for (const auto& trace : traces) {
    for (const auto& round : trace.rounds) {
      if (round.candidates.empty()) continue;
      r.clear();
      h.clear();
      for (const auto& c : round.candidates) {
        r.push_back(c.intrinsic);
        h.push_back(c.fused);
      }
      const double hr = normalized_entropy(r, logit_scale);
      const double hh = normalized_entropy(h, logit_scale);
      ++out.intrinsic[histogram_bin(hr)];
      ++out.fused[histogram_bin(hh)];
      out.intrinsic_high += hr > kHighEntropy;
      out.fused_high += hh > kHighEntropy;
      ++out.rounds;
    }
  }
  return out;
}

EpisodeOutcome run_sim_episode(std::uint64_t seed, const EpisodeParams& params,
                               const EpisodeConfig& config) {
  const auto episode = generate_episode(seed, params);
  EpisodeConfig cfg = config;
  cfg.seed = seed;
  EpisodeOutcome out{seed};
  try {
    auto result = run_episode(episode.world->video, episode.instruction,
                              make_sim_backends(episode.world), cfg);
    out.success = result.answer == episode.world->correct_option;
    out.trace = std::move(result.trace);
  } catch (const EpisodeError& e) {
    out.degraded = true;
    out.error = e.what();
    out.trace = e.partial_trace();
  }
  return out;
}

namespace {

ArmReport aggregate(const ArmSpec& arm, const std::vector<EpisodeOutcome>& outcomes) {
  ArmReport a;
  a.name = arm.name;
  a.config_json = arm.config.to_json();
  a.episodes = outcomes.size();
  double frames = 0.0;
  double rounds = 0.0;
  std::vector<double> length_sum;
  std::vector<std::size_t> length_count;
  std::vector<EpisodeTrace> traces;
  for (const auto& o : outcomes) {
    a.successes += o.success;
    a.degraded += o.degraded;
    const auto& t = o.trace;
    const int used = t.result ? t.result->rounds_used : static_cast<int>(t.rounds.size());
    int observed = 0;
    for (const auto& r : t.rounds) observed += static_cast<int>(r.frames.size());
    frames += observed;
    rounds += used;
    ++a.rounds_distribution[used];
    ++a.terminations[t.result ? to_string(t.result->termination) : std::string("error")];
    for (std::size_t i = 0; i < t.rounds.size(); ++i) {
      if (length_sum.size() <= i) {
        length_sum.resize(i + 1, 0.0);
        length_count.resize(i + 1, 0);
      }
      length_sum[i] += t.rounds[i].selected_interval.length();
      ++length_count[i];
    }
    traces.push_back(t);
  }
  const double n = static_cast<double>(a.episodes);
  a.success_rate = static_cast<double>(a.successes) / n;
  a.mean_frames = frames / n;
  a.mean_rounds = rounds / n;
  for (std::size_t i = 0; i < length_sum.size(); ++i) {
    a.mean_selected_length.push_back(length_sum[i] / static_cast<double>(length_count[i]));
  }
  a.entropy = entropy_histograms(traces, arm.config.reward_logit_scale);
  return a;
}

double num(double x) { return round_trace_value(x); }

ojson histogram_json(const Histogram& h) {
  ojson out = ojson::array();
  for (const auto c : h) out.push_back(c);
  return out;
}

double fraction(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

BenchResult run_bench(const BenchOptions& options) {
  if (options.episodes < 1) throw RejectedInput("bench needs at least one episode");
  if (options.arms.empty()) throw RejectedInput("bench needs at least one arm");
  options.ranges.validate();
  for (const auto& arm : options.arms) arm.config.validate();

  const std::size_t n = options.episodes;
  const std::size_t jobs = n * options.arms.size();
  BenchResult result;
  result.outcomes.assign(options.arms.size(), std::vector<EpisodeOutcome>(n));
  std::vector<EpisodeParams> params(n);
  for (std::size_t i = 0; i < n; ++i) {
    params[i] = episode_params(episode_seed(options.base_seed, i), options.ranges);
  }

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t job; (job = next.fetch_add(1)) < jobs;) {
      const std::size_t arm = job / n;
      const std::size_t i = job % n;
      result.outcomes[arm][i] =
          run_sim_episode(episode_seed(options.base_seed, i), params[i], options.arms[arm].config);
    }
  };
  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  BenchReport& report = result.report;
  report.base_seed = options.base_seed;
  report.episodes = n;
  report.ranges = options.ranges;
  for (std::size_t a = 0; a < options.arms.size(); ++a) {
    report.arms.push_back(aggregate(options.arms[a], result.outcomes[a]));
  }
  const auto& base = report.arms.front();
  for (std::size_t a = 1; a < report.arms.size(); ++a) {
    const auto& arm = report.arms[a];
    PairedDelta d{arm.name, base.name, arm.success_rate - base.success_rate,
                  arm.mean_frames - base.mean_frames, arm.mean_rounds - base.mean_rounds};
    for (std::size_t i = 0; i < n; ++i) {
      const bool s = result.outcomes[a][i].success;
      const bool b = result.outcomes[0][i].success;
      d.arm_only_successes += s && !b;
      d.baseline_only_successes += b && !s;
    }
    report.deltas.push_back(d);
  }
  if (!options.keep_traces) {
    for (auto& arm : result.outcomes) {
      for (auto& o : arm) o.trace = {};
    }
  }
  return result;
}

std::string BenchReport::to_json() const {
  ojson j;
  j["base_seed"] = base_seed;
  j["episodes"] = episodes;
  j["ranges"] = {{"min_duration", num(ranges.min_duration)},
                 {"max_duration", num(ranges.max_duration)},
                 {"min_evidence", ranges.min_evidence},
                 {"max_evidence", ranges.max_evidence},
                 {"reward_noise_sigma", num(ranges.reward_noise_sigma)},
                 {"similarity_noise_sigma", num(ranges.similarity_noise_sigma)}};
  ojson arms_json = ojson::array();
  for (const auto& a : arms) {
    ojson rounds = ojson::object();
    for (const auto& [k, v] : a.rounds_distribution) rounds[std::to_string(k)] = v;
    ojson lengths = ojson::array();
    for (const double l : a.mean_selected_length) lengths.push_back(num(l));
    arms_json.push_back({{"name", a.name},
                         {"config", ojson::parse(a.config_json)},
                         {"episodes", a.episodes},
                         {"successes", a.successes},
                         {"degraded", a.degraded},
                         {"success_rate", num(a.success_rate)},
                         {"mean_frames_observed", num(a.mean_frames)},
                         {"mean_rounds", num(a.mean_rounds)},
                         {"rounds_distribution", rounds},
                         {"terminations", a.terminations},
                         {"mean_selected_length_by_round", lengths},
                         {"entropy",
                          {{"rounds", a.entropy.rounds},
                           {"threshold", kHighEntropy},
                           {"intrinsic_high_fraction", num(fraction(a.entropy.intrinsic_high, a.entropy.rounds))},
                           {"fused_high_fraction", num(fraction(a.entropy.fused_high, a.entropy.rounds))},
                           {"intrinsic_histogram", histogram_json(a.entropy.intrinsic)},
                           {"fused_histogram", histogram_json(a.entropy.fused)}}}});
  }
  j["arms"] = arms_json;
  ojson deltas_json = ojson::array();
  for (const auto& d : deltas) {
    deltas_json.push_back({{"arm", d.arm},
                           {"baseline", d.baseline},
                           {"success_rate", num(d.success_rate)},
                           {"mean_frames_observed", num(d.mean_frames)},
                           {"mean_rounds", num(d.mean_rounds)},
                           {"arm_only_successes", d.arm_only_successes},
                           {"baseline_only_successes", d.baseline_only_successes}});
  }
  j["paired_deltas"] = deltas_json;
  return j.dump(2) + "\n";
}

std::string BenchReport::table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %9s %9s %8s %9s %9s %9s\n", "arm", "success", "frames",
                "rounds", "H(r)>0.8", "H(h)>0.8", "degraded");
  out << line;
  for (const auto& a : arms) {
    std::snprintf(line, sizeof line, "%-12s %9.3f %9.2f %8.2f %9.3f %9.3f %9zu\n", a.name.c_str(),
                  a.success_rate, a.mean_frames, a.mean_rounds,
                  fraction(a.entropy.intrinsic_high, a.entropy.rounds),
                  fraction(a.entropy.fused_high, a.entropy.rounds), a.degraded);
    out << line;
  }
  if (!deltas.empty()) {
    out << "\npaired deltas vs " << deltas.front().baseline << " (" << episodes << " episodes)\n";
    for (const auto& d : deltas) {
      std::snprintf(line, sizeof line, "%-12s %+9.3f %+9.2f %+8.2f   wins %zu / losses %zu\n",
                    d.arm.c_str(), d.success_rate, d.mean_frames, d.mean_rounds,
                    d.arm_only_successes, d.baseline_only_successes);
      out << line;
    }
  }
  return out.str();
}

SweepReport run_sweep(const std::vector<int>& anchor_frames, const EpisodeConfig& base,
                      const BenchOptions& options) {
  if (anchor_frames.empty()) throw RejectedInput("sweep needs at least one B_s value");
  SweepReport report;
  BenchOptions opts = options;
  opts.arms.clear();
  opts.keep_traces = false;
  for (int v : anchor_frames) {
    if (v < 0) throw RejectedInput("B_s must be non-negative");
    if (v > base.budget.total_frames) {
      report.warnings.push_back("B_s " + std::to_string(v) + " exceeds B = " +
                                std::to_string(base.budget.total_frames) + "; clamped");
      v = base.budget.total_frames;
    }
    ArmSpec arm{"bs=" + std::to_string(v), base};
    arm.config.budget.anchor_frames = v;
    opts.arms.push_back(arm);
  }
  const auto bench = run_bench(opts);
  for (const auto& a : bench.report.arms) {
    const int v = std::stoi(a.name.substr(3));
    report.rows.push_back({v, a.success_rate, a.mean_frames, a.mean_rounds});
  }
  return report;
}

std::string SweepReport::to_json() const {
  ojson rows_json = ojson::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"anchor_frames", r.anchor_frames},
                         {"success_rate", num(r.success_rate)},
                         {"mean_frames_observed", num(r.mean_frames)},
                         {"mean_rounds", num(r.mean_rounds)}});
  }
  ojson j{{"rows", rows_json}, {"warnings", warnings}};
  return j.dump(2) + "\n";
}

std::string SweepReport::curve() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%4s %9s %9s  %s\n", "B_s", "success", "frames", "");
  out << line;
  for (const auto& r : rows) {
    const std::string bar(static_cast<std::size_t>(std::lround(r.success_rate * 40.0)), '#');
    std::snprintf(line, sizeof line, "%4d %9.3f %9.2f  %s\n", r.anchor_frames, r.success_rate,
                  r.mean_frames, bar.c_str());
    out << line;
  }
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace vidsearch
