#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vidsearch/cli/commands.hpp"

using namespace vidsearch;

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::string seed;
  std::string out;
  std::string workers;
  std::string episodes;
  std::vector<std::string> arms;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool bench_flags) {
  cmd->add_option("--config", f.config_path, "YAML config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", f.sets, "override a config key (key=value), repeatable");
  cmd->add_option("--seed", f.seed, bench_flags ? "base seed" : "episode seed");
  cmd->add_option("--out", f.out, "output directory");
  if (bench_flags) {
    cmd->add_option("--workers", f.workers, "worker threads");
    cmd->add_option("--episodes", f.episodes, "episodes per arm");
    cmd->add_option("--arm", f.arms, "arm name (full, uniform, intrinsic, no-qu), repeatable");
  }
}

RunConfig resolve(const CommonFlags& f, bool bench_flags) {
  std::map<std::string, std::string> file;
  if (!f.config_path.empty()) file = load_config_file(f.config_path);
  std::map<std::string, std::string> cli;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw RejectedInput("--set expects key=value, got '" + s + "'");
    cli[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (!f.seed.empty()) cli[bench_flags ? "base_seed" : "seed"] = f.seed;
  if (!f.out.empty()) cli["out"] = f.out;
  if (!f.workers.empty()) cli["workers"] = f.workers;
  if (!f.episodes.empty()) cli["episodes"] = f.episodes;
  if (!f.arms.empty()) {
    std::string joined;
    for (const auto& a : f.arms) joined += (joined.empty() ? "" : ",") + a;
    cli["arms"] = joined;
  }
  return resolve_config(file, cli);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree search over long videos with simulated or live model backends"};
  app.require_subcommand(1);

  CommonFlags run_flags, bench_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "run one episode and write its trace");
  add_common(run, run_flags, false);
  auto* bench = app.add_subcommand("bench", "run the ablation arms over paired synthetic episodes");
  add_common(bench, bench_flags, true);
  auto* sweep = app.add_subcommand("sweep", "vary the anchor-frame budget B_s");
  add_common(sweep, sweep_flags, true);
  std::string trace_path;
  auto* show = app.add_subcommand("show", "render a trace round by round");
  show->add_option("trace", trace_path, "trace file")->required();
  auto* keys = app.add_subcommand("keys", "list config keys");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(resolve(run_flags, false), std::cout, std::cerr);
    if (*bench) return cmd_bench(resolve(bench_flags, true), std::cout, std::cerr);
    if (*sweep) return cmd_sweep(resolve(sweep_flags, true), std::cout, std::cerr);
    if (*show) return cmd_show(trace_path, std::cout, std::cerr);
    if (*keys) {
      const RunConfig defaults;
      for (const auto& k : config_keys()) {
        std::cout << k.name << " = " << get_config_value(defaults, k.name) << "    # " << k.description << "\n";
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
