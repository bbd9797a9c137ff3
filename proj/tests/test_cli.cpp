#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = SAND_CLI_PATH;
const std::string kConfigs = SAND_CONFIG_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("sand_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& content) { std::ofstream(path) << content; }

std::string config(const std::string& name) { return kConfigs + "/" + name; }

}  // namespace

TEST_CASE("usage errors exit 1", "[cli]") {
  TempDir t;
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("--help") == 0);
  CHECK(run("analyze --config " + t / "missing.json") == 1);
  write(t / "bad.json", R"({"layout": {"grid": {"s": 1, "rows": 2, "cols": 2}}, "radio": {"range": 2, "d_n": 1}, "colour": 3})");
  CHECK(run("simulate --config " + t / "bad.json --out " + t / "o") == 1);
  write(t / "both.json", R"({"layout": {"grid": {"s": 1, "rows": 2, "cols": 2}}, "radio": {"range": 2, "t_r": 4, "d_n": 1}})");
  CHECK(run("analyze --config " + t / "both.json --out " + t / "o") == 1);
  write(t / "broken.json", "{");
  CHECK(run("analyze --config " + t / "broken.json --out " + t / "o") == 1);
  CHECK(run("analyze --config " + config("grid_single_fault.json") + " --resolution -1 --out " + t / "o") == 1);
}

TEST_CASE("analyze reports snares and the range condition", "[cli]") {
  TempDir t;
  CHECK(run("analyze --config " + config("grid_two_faults.json") + " --svg --resolution 0.05 --out " + t / "two") == 2);
  const auto report = json::parse(slurp(t / "two/report.json"));
  CHECK(report["command"] == "analyze");
  CHECK(report["snare_free"] == false);
  CHECK(report["range_condition_ok"] == false);
  CHECK_FALSE(report["snares"].empty());
  CHECK(slurp(t / "two/layout.svg").find("<svg") != std::string::npos);

  CHECK(run("analyze --config " + config("grid_single_fault.json") + " --out " + t / "one") == 2);
  const auto single = json::parse(slurp(t / "one/report.json"));
  CHECK(single["snare_free"] == true);
  CHECK(single["range_condition_ok"] == false);
  CHECK_FALSE(fs::exists(t / "one/layout.svg"));

  CHECK(run("analyze --config " + config("no_fault_random.json") + " --out " + t / "ok") == 0);
  CHECK(json::parse(slurp(t / "ok/report.json"))["range_condition_ok"] == true);
}

TEST_CASE("simulate exit codes follow the verdicts", "[cli]") {
  TempDir t;
  CHECK(run("simulate --config " + config("no_fault_random.json") + " --out " + t / "a") == 0);
  const auto verdicts = json::parse(slurp(t / "a/verdicts.json"));
  CHECK(verdicts["quiesced"] == true);
  CHECK(verdicts["fairness"]["ok"] == true);
  CHECK(verdicts["variants"].size() == 3);
  std::istringstream trace(slurp(t / "a/trace.jsonl"));
  std::string line, last;
  std::size_t lines = 0;
  while (std::getline(trace, line)) {
    const auto e = json::parse(line);
    CHECK(e.contains("epoch"));
    CHECK(e.contains("kind"));
    last = e["kind"];
    ++lines;
  }
  CHECK(lines > 0);
  CHECK(last == "end");

  CHECK(run("simulate --config " + config("fabricate.json") + " --out " + t / "f") == 0);
  CHECK(run("simulate --config " + config("discredit.json") + " --out " + t / "d") == 3);

  write(t / "flood.json", R"({
    "layout": {"inline": {"nodes": [
      {"position": [0, 0], "role": "correct"},
      {"position": [0.5, 0], "role": "faulty"}]}},
    "radio": {"range": 2, "d_n": 1},
    "adversary": [{"kind": "flood", "f": 1, "tss": 4, "base": [0, 0.5]}]
  })");
  CHECK(run("simulate --config " + t / "flood.json --max-epochs 300 --out " + t / "fl") == 4);
  CHECK(json::parse(slurp(t / "fl/verdicts.json"))["quiesced"] == false);
}

TEST_CASE("simulate is reproducible from the seed", "[cli]") {
  TempDir t;
  const std::string cfg = config("no_fault_random.json");
  CHECK(run("simulate --config " + cfg + " --seed 5 --out " + t / "a") == 0);
  CHECK(run("simulate --config " + cfg + " --seed 5 --out " + t / "b") == 0);
  CHECK(slurp(t / "a/trace.jsonl") == slurp(t / "b/trace.jsonl"));
  CHECK(slurp(t / "a/verdicts.json") == slurp(t / "b/verdicts.json"));
  CHECK(json::parse(slurp(t / "a/verdicts.json"))["seed"] == 5);
}

TEST_CASE("generate writes deterministic layouts", "[cli]") {
  TempDir t;
  CHECK(run("generate --kind random --n 6 --area 2 3 --seed 3 --out " + t / "a") == 0);
  CHECK(run("generate --kind random --n 6 --area 2 3 --seed 3 --out " + t / "b") == 0);
  CHECK(slurp(t / "a/layout.json") == slurp(t / "b/layout.json"));
  const auto doc = json::parse(slurp(t / "a/layout.json"));
  REQUIRE(doc["nodes"].size() == 6);
  for (const auto& n : doc["nodes"]) {
    CHECK(n["position"][0].get<double>() >= 0.0);
    CHECK(n["position"][0].get<double>() <= 2.0);
    CHECK(n["position"][1].get<double>() <= 3.0);
  }

  CHECK(run("generate --config " + config("generate_grid.json") + " --out " + t / "g") == 0);
  CHECK(json::parse(slurp(t / "g/layout.json"))["nodes"].size() == 9);
  CHECK(run("generate --kind hexagon --out " + t / "h") == 1);

  // A generated file feeds back in as a layout source.
  write(t / "from_file.json", R"({"layout": {"file": ")" + t / "g/layout.json" + R"("}, "radio": {"range": 1.5, "d_n": 1}})");
  CHECK(run("simulate --config " + t / "from_file.json --out " + t / "s") == 0);
}
