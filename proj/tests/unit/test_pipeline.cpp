#include <doctest.h>

#include "fpr/error.hpp"
#include "fpr/io.hpp"
#include "fpr/pipeline.hpp"
#include "support.hpp"

using namespace fpr;
namespace fs = std::filesystem;

namespace {

Json small_config(const fs::path& out) {
  Json doc;
  doc["catalog"] = support::data("catalog.json").string();
  doc["out"] = out.string();
  doc["grids"] = Json::array({Json{{"id", "lv"}, {"path", support::data("lv_feeder.json").string()}}});
  doc["scenarios"] = Json{{"n_random_draws", 1}, {"scale_factors", Json::array({1.0, 2.0})}};
  doc["sweep"] = Json{{"n_directions", 12}};
  doc["seed"] = 3;
  return doc;
}

const pipeline::Logger kSilent = [](const std::string&) {};

}  // namespace

TEST_CASE("config parsing resolves relative paths") {
  const auto cfg = pipeline::load_config(support::data("pipeline.json"));
  CHECK(cfg.grids.size() == 3);
  CHECK(cfg.catalog == support::data("catalog.json"));
  CHECK(cfg.grids[2].children.size() == 3);
  CHECK(cfg.scenarios.master_seed == 42);
  REQUIRE(cfg.cep_study);
  CHECK(cfg.cep_study->filename() == "study_pipeline.json");
}

TEST_CASE("children come before parents") {
  auto cfg = pipeline::load_config(support::data("pipeline.json"));
  std::swap(cfg.grids[0], cfg.grids[2]);  // mv first in the file
  const auto order = pipeline::dependency_order(cfg);
  REQUIRE(order.size() == 3);
  CHECK(cfg.grids[order.back()].id == "mv");
}

TEST_CASE("cycles and unknown children are rejected") {
  Json doc = small_config("out");
  doc["grids"][0]["children"] = Json::array({Json{{"grid", "ghost"}, {"bus", "lv1"}}});
  CHECK_THROWS_AS(pipeline::config_from_json(doc, ".", "cfg"), Error);
  doc = small_config("out");
  doc["grids"][0]["children"] = Json::array({Json{{"grid", "lv"}, {"bus", "lv1"}}});
  CHECK_THROWS_AS(pipeline::dependency_order(pipeline::config_from_json(doc, ".", "cfg")), Error);
  doc = small_config("out");
  doc["unknown_key"] = 1;
  CHECK_THROWS_AS(pipeline::config_from_json(doc, ".", "cfg"), Error);
}

TEST_CASE("fpr chain writes the artifact layout") {
  const auto out = support::fresh_dir("pipeline_unit");
  const auto cfg = pipeline::config_from_json(small_config(out), ".", "cfg");
  pipeline::run_fpr(cfg, kSilent);
  const auto dir = pipeline::grid_dir(cfg, "lv");
  CHECK(fs::exists(dir / "scenarios.json"));
  CHECK(fs::exists(pipeline::stage_path(cfg, "lv", 0)));
  CHECK(fs::exists(pipeline::stage_path(cfg, "lv", 1)));
  CHECK(fs::exists(pipeline::for_path(cfg, "lv", 1)));
  CHECK(fs::exists(dir / "fpr.json"));
  CHECK(fs::exists(dir / "fpr_curve.csv"));
  CHECK(fs::exists(dir / "linear_model.json"));
  const auto fpr = builder::fpr_from_json(io::read_json_file(dir / "fpr.json"), "fpr");
  CHECK_FALSE(fpr.entries.empty());

  // Re-linearizing reproduces the same bytes.
  const auto before = support::slurp(dir / "linear_model.json");
  pipeline::run_linearize(cfg, kSilent);
  CHECK(support::slurp(dir / "linear_model.json") == before);
}

TEST_CASE("cep without a study is a configuration error") {
  const auto out = support::fresh_dir("pipeline_nocep");
  const auto cfg = pipeline::config_from_json(small_config(out), ".", "cfg");
  CHECK_THROWS_AS(pipeline::run_cep(cfg, kSilent), Error);
}

TEST_CASE("unplannable scenarios fail unless skipped") {
  const auto out = support::fresh_dir("pipeline_unplannable");
  Json doc = small_config(out);
  doc["grids"][0]["path"] = support::data("two_bus_voltage.json").string();
  doc["scenarios"]["scale_factors"] = Json::array({1.0, 400.0});
  doc["reinforce"] = Json{{"max_iterations", 2}};
  auto cfg = pipeline::config_from_json(doc, ".", "cfg");
  try {
    pipeline::run_variate(cfg, kSilent);
    FAIL("expected unplannable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unplannable);
  }
  cfg.skip_failed = true;
  CHECK_NOTHROW(pipeline::run_variate(cfg, kSilent));
}
