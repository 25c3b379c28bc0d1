#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "stub_server.hpp"
#include "support.hpp"
#include "vidsearch/cli/commands.hpp"
#include "vidsearch/config.hpp"
#include "vidsearch/errors.hpp"

using namespace vidsearch;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("vidsearch-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// A file value that differs from the default and a command-line value that
// differs from the file value.
std::pair<std::string, std::string> sample_values(const std::string& key) {
  static constexpr const char* kCandidates[] = {"7",        "3",        "0.25",         "0.75",
                                                "true",     "false",    "http",         "simulated",
                                                "a/b.json", "c/d.json", "full,uniform", "intrinsic",
                                                "1,2",      "4"};
  const auto shown = [&](const char* v) -> std::optional<std::string> {
    RunConfig c;
    try {
      set_config_value(c, key, v);
    } catch (const RejectedInput&) {
      return std::nullopt;
    }
    return get_config_value(c, key);
  };
  const std::string d = get_config_value(RunConfig{}, key);
  for (const char* file_value : kCandidates) {
    const auto f = shown(file_value);
    if (!f || *f == d) continue;
    for (const char* cli_value : kCandidates) {
      const auto c = shown(cli_value);
      if (c && *c != *f) return {file_value, cli_value};
    }
  }
  FAIL("no sample values for " << key);
  return {};
}

}  // namespace

TEST_SUITE("config-cli") {
  TEST_CASE("command line beats file beats defaults for every key") {
    for (const auto& k : config_keys()) {
      CAPTURE(k.name);
      const auto [file_value, cli_value] = sample_values(k.name);
      const RunConfig defaults;
      RunConfig expect_file;
      set_config_value(expect_file, k.name, file_value);
      RunConfig expect_cli;
      set_config_value(expect_cli, k.name, cli_value);
      CHECK(get_config_value(resolve_config({}, {}), k.name) == get_config_value(defaults, k.name));
      CHECK(get_config_value(resolve_config({{k.name, file_value}}, {}), k.name) ==
            get_config_value(expect_file, k.name));
      CHECK(get_config_value(resolve_config({{k.name, file_value}}, {{k.name, cli_value}}), k.name) ==
            get_config_value(expect_cli, k.name));
    }
  }

  TEST_CASE("config files are flat YAML without secrets") {
    const auto m = parse_config_text("seed: 5\narms: [full, uniform]\ntau_c: 0.2\n");
    CHECK(m.at("seed") == "5");
    CHECK(m.at("arms") == "full,uniform");
    CHECK(resolve_config(m, {}).arms == std::vector<std::string>{"full", "uniform"});
    CHECK_THROWS_WITH_AS(parse_config_text("api_key: abc\n"), doctest::Contains("VIDSEARCH_API_KEY"), RejectedInput);
    CHECK_THROWS_AS(parse_config_text("no_such_key: 1\n"), RejectedInput);
    CHECK_THROWS_AS(parse_config_text("- a\n- b\n"), RejectedInput);
    CHECK_THROWS_AS(parse_config_text("tau_c: {a: 1}\n"), RejectedInput);
    CHECK(parse_config_text("").empty());
    RunConfig c;
    CHECK_THROWS_AS(set_config_value(c, "seed", "seven"), RejectedInput);
    CHECK_THROWS_AS(set_config_value(c, "fusion", "maybe"), RejectedInput);
  }

  TEST_CASE("live input must be complete") {
    RunConfig c;
    c.frame_manifest = "frames.json";
    CHECK_THROWS_AS(c.validate(), RejectedInput);
  }

  TEST_CASE("run writes a deterministic trace and show renders it") {
    const auto dir = scratch("run");
    RunConfig c;
    c.episode.seed = 7;
    c.out = (dir / "a").string();
    std::ostringstream out, err;
    REQUIRE(cmd_run(c, out, err) == kExitOk);
    c.out = (dir / "b").string();
    REQUIRE(cmd_run(c, out, err) == kExitOk);
    const auto a = testing::slurp((dir / "a" / "trace.jsonl").string());
    CHECK(a == testing::slurp((dir / "b" / "trace.jsonl").string()));
    CHECK(out.str().find("answer: ") != std::string::npos);

    std::ostringstream shown;
    REQUIRE(cmd_show((dir / "a" / "trace.jsonl").string(), shown, err) == kExitOk);
    const auto rounds = std::count(a.begin(), a.end(), '\n') - 2;
    std::size_t blocks = 0;
    for (std::size_t p = shown.str().find("\nround "); p != std::string::npos; p = shown.str().find("\nround ", p + 1)) ++blocks;
    CHECK(static_cast<long>(blocks) == rounds);
    CHECK(shown.str().find("weights (1-H, H)") != std::string::npos);

    write(dir / "cut.jsonl", a.substr(0, a.rfind("{\"type\":\"result\"")));
    std::ostringstream partial;
    CHECK(cmd_show((dir / "cut.jsonl").string(), partial, err) == kExitOk);
    CHECK(partial.str().find("truncated") != std::string::npos);

    write(dir / "empty.jsonl", "");
    std::ostringstream none, why;
    CHECK(cmd_show((dir / "empty.jsonl").string(), none, why) != kExitOk);
    write(dir / "v9.jsonl", R"({"type":"header","schema":"vidsearch.trace","version":9})" "\n");
    std::ostringstream why9;
    CHECK(cmd_show((dir / "v9.jsonl").string(), none, why9) != kExitOk);
    CHECK(why9.str().find("9") != std::string::npos);
  }

  TEST_CASE("missing manifest names the path") {
    const auto dir = scratch("missing");
    RunConfig c;
    c.backend.kind = BackendProfile::Kind::http;
    c.backend.endpoint = "http://127.0.0.1:9/v1";
    c.backend.model_name = "m";
    c.frame_manifest = (dir / "nope.json").string();
    c.embedding_manifest = (dir / "emb.json").string();
    c.question_file = (dir / "q.json").string();
    c.out = (dir / "out").string();
    std::ostringstream out, err;
    CHECK(cmd_run(c, out, err) == kExitInput);
    CHECK(err.str().find("nope.json") != std::string::npos);
  }

  TEST_CASE("unreachable live endpoint fails with a transport diagnostic and a partial trace") {
    const auto dir = scratch("live");
    std::string frames = R"({"video_id": "v", "duration": 20, "grid_step": 10, "frames": [)";
    for (int t = 0; t <= 20; t += 10) {
      write(dir / ("f" + std::to_string(t) + ".jpg"), "jpg");
      frames += std::string(t ? "," : "") + R"({"t": )" + std::to_string(t) + R"(, "path": "f)" +
                std::to_string(t) + R"(.jpg"})";
    }
    write(dir / "frames.json", frames + "]}");
    write(dir / "emb.json", R"({"video_id": "v", "remote_endpoint": "http://127.0.0.1:9/retrieve"})");
    write(dir / "q.json", R"({"question": "What happens?", "options": ["x", "y"]})");
    int port = 0;
    {
      testing::StubServer stub;
      port = std::stoi(stub.root_url().substr(stub.root_url().rfind(':') + 1));
    }
    const auto file = parse_config_text("backend: http\nendpoint: http://127.0.0.1:" + std::to_string(port) +
                                        "/v1\nmodel_name: m\ntimeout_ms: 300\nretry_budget: 1\n");
    RunConfig c = resolve_config(file, {{"frame_manifest", (dir / "frames.json").string()},
                                        {"embedding_manifest", (dir / "emb.json").string()},
                                        {"question_file", (dir / "q.json").string()},
                                        {"out", (dir / "out").string()}});
    std::ostringstream out, err;
    CHECK(cmd_run(c, out, err) == kExitBackend);
    CHECK(err.str().find("127.0.0.1") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "trace.jsonl"));
  }

  TEST_CASE("bench and sweep write their reports") {
    const auto dir = scratch("bench");
    RunConfig c;
    c.episodes = 4;
    c.arms = {"full"};
    c.out = dir.string();
    std::ostringstream out, err;
    REQUIRE(cmd_bench(c, out, err) == kExitOk);
    const auto first = testing::slurp((dir / "bench_report.json").string());
    REQUIRE(cmd_bench(c, out, err) == kExitOk);
    CHECK(first == testing::slurp((dir / "bench_report.json").string()));
    CHECK(fs::exists(dir / "bench_table.txt"));

    c.sweep_values = {3, 8};
    std::ostringstream sweep_out, sweep_err;
    REQUIRE(cmd_sweep(c, sweep_out, sweep_err) == kExitOk);
    CHECK(sweep_err.str().find("clamped") != std::string::npos);
    CHECK(fs::exists(dir / "sweep.txt"));

    c.arms = {"nonsense"};
    std::ostringstream bad;
    CHECK(cmd_bench(c, out, bad) == kExitInput);
  }
}
