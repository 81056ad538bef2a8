#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "tempdir.hpp"

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(WEARFUSE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("exit codes") {
  TempDir dir("cli");
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("extract --seed notanumber") == 2);
  spit(dir / "bad.json", R"({"purity": 1.01})");
  CHECK(run("extract --config " + (dir / "bad.json").string()) == 2);
  spit(dir / "unknown.json", R"({"windows": 3})");
  CHECK(run("train --config " + (dir / "unknown.json").string()) == 2);
  CHECK(run("extract --data /nonexistent/wearfuse --out " + (dir / "out").string()) == 1);
  CHECK(run("train --out " + (dir / "empty").string()) == 1);
  CHECK(run("evaluate --corrupt TEMP --out " + (dir / "out").string()) == 2);
}

TEST_CASE("decompose subcommand") {
  TempDir dir("cli");
  std::string csv = "value\n";
  for (int n = 0; n < 256; ++n) csv += std::to_string(std::sin(0.3 * n)) + "\n";
  spit(dir / "x.csv", csv);
  CHECK(run("decompose --input " + (dir / "x.csv").string() + " --fs 64 --output " + (dir / "m.csv").string()) == 0);
  CHECK(slurp(dir / "m.csv").rfind("mode_1", 0) == 0);
  CHECK(run("decompose --input " + (dir / "x.csv").string() + " --fs 64") == 2);
  spit(dir / "bad.csv", "value\n1\nx\n");
  CHECK(run("decompose --input " + (dir / "bad.csv").string() + " --fs 64 --output " + (dir / "o.csv").string()) ==
        1);
}

TEST_CASE("synth then all") {
  TempDir dir("cli");
  spit(dir / "cfg.json",
       R"({"window_seconds": 10, "synth": {"subjects": 7, "block_seconds": 40}, "mlp": {"hidden": [8], "max_epochs": 10}})");
  const std::string common = " -q --config " + (dir / "cfg.json").string() + " --data " + (dir / "data").string() +
                             " --out " + (dir / "out").string();
  CHECK(run("synth" + common) == 0);
  CHECK(std::filesystem::exists(dir / "data" / "S07" / "ACC_Z.csv"));
  CHECK(run("all --seed 42 --corrupt EDA" + common) == 0);
  auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  CHECK(report["config"]["seed"] == 42);
  CHECK(report["corruption"].size() == 1);
  CHECK(report["corruption"][0]["sensor"] == "EDA");
  CHECK(std::filesystem::exists(dir / "out" / "per_size.csv"));
}
