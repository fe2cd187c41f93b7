#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "fpr/io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + FPR_TOOL_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

// Writes an LV-only config next to the scratch output.
fs::path small_config(const std::string& name) {
  const auto dir = support::fresh_dir(name);
  fpr::Json doc;
  doc["catalog"] = support::data("catalog.json").string();
  doc["out"] = "out";
  doc["grids"] = fpr::Json::array({fpr::Json{{"id", "lv"}, {"path", support::data("lv_feeder.json").string()}}});
  doc["scenarios"] = fpr::Json{{"n_random_draws", 1}, {"scale_factors", fpr::Json::array({1.0, 1.5})}};
  doc["sweep"] = fpr::Json{{"n_directions", 8}};
  doc["cep"] = fpr::Json{{"study", support::data("toy_study.json").string()}};
  fpr::io::write_json_file(dir / "config.json", doc);
  return dir;
}

}  // namespace

TEST_CASE("help and usage errors") {
  const auto help = run("--help");
  CHECK(help.code == 0);
  for (const char* sub : {"variate", "for", "fpr", "linearize", "cep", "pipeline"}) {
    CHECK(help.output.find(sub) != std::string::npos);
  }
  const auto none = run("");
  CHECK(none.code == 1);
  CHECK(none.output.rfind("error[invalid_argument]:", 0) == 0);
  CHECK(run("fpr").code == 1);
  CHECK(run("fpr -c x.json --jobs -2").code == 1);
}

TEST_CASE("missing config is an io error with a one-line message") {
  const auto r = run("pipeline -c /nonexistent/config.json");
  CHECK(r.code == 2);
  CHECK(r.output.rfind("error[io]:", 0) == 0);
  CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 1);
}

TEST_CASE("subcommands run in sequence") {
  const auto dir = small_config("cli_steps");
  const std::string cfg = "-c \"" + (dir / "config.json").string() + "\" -q";
  CHECK(run("variate " + cfg).code == 0);
  CHECK(fs::exists(dir / "out/lv/stages/stage_0001.json"));
  CHECK(run("for " + cfg).code == 0);
  CHECK(fs::exists(dir / "out/lv/fors/for_0001.csv"));
  CHECK(run("fpr " + cfg).code == 0);
  CHECK(fs::exists(dir / "out/lv/fpr.json"));
  CHECK(run("linearize " + cfg).code == 0);
  const auto r = run("cep " + cfg + " --export-lp");
  CHECK(r.code == 0);
  CHECK(r.output.empty());
  CHECK(fs::exists(dir / "out/cep/report.csv"));
  CHECK(fs::exists(dir / "out/cep/scenario_b.lp"));
}

TEST_CASE("progress goes to stderr unless quiet") {
  const auto dir = small_config("cli_progress");
  const auto r = run("fpr -c \"" + (dir / "config.json").string() + "\" --out \"" + (dir / "alt").string() + "\"");
  CHECK(r.code == 0);
  CHECK(r.output.find("[fpr] grid lv (LV): done") != std::string::npos);
  CHECK(fs::exists(dir / "alt/lv/fpr.json"));
}

TEST_CASE("schema errors carry their exit code") {
  const auto dir = support::fresh_dir("cli_schema");
  fpr::io::write_text_file(dir / "config.json", R"({"catalog": "c.json", "grids": 3})");
  const auto r = run("variate -c \"" + (dir / "config.json").string() + "\"");
  CHECK(r.code == 3);
  CHECK(r.output.rfind("error[schema]:", 0) == 0);
}
