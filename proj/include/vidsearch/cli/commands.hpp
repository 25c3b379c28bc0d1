#pragma once

#include <iosfwd>
#include <string>

#include "vidsearch/config.hpp"

namespace vidsearch {

// Exit statuses shared by every verb.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;    // bad config, manifest or trace
inline constexpr int kExitBackend = 3;  // a backend failed past its retry budget

// Each verb writes its files under config.out (a directory) and prints a
// summary to `out`; diagnostics go to `err`.

// <out>/trace.jsonl. The trace is written even when the episode fails.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
// <out>/bench_report.json and <out>/bench_table.txt.
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
// <out>/sweep.json and <out>/sweep.txt.
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_show(const std::string& trace_path, std::ostream& out, std::ostream& err);

// Round-by-round text rendering used by cmd_show.
std::string render_trace(const EpisodeTrace& trace);

}  // namespace vidsearch
