#include "fpr/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

#include "fpr/cep.hpp"
#include "fpr/error.hpp"
#include "fpr/parallel.hpp"

namespace fpr::pipeline {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string padded(int id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", id);
  return buf;
}

struct Loaded {
  grid::EquipmentCatalog catalog;
  std::vector<grid::Network> networks;  // config order
};

Loaded load_inputs(const PipelineConfig& cfg) {
  Loaded l;
  l.catalog = grid::load_catalog(cfg.catalog);
  for (const auto& g : cfg.grids) l.networks.push_back(grid::load_network(g.path, l.catalog));
  return l;
}

std::vector<int> scenario_ids_on_disk(const fs::path& dir, const std::string& prefix) {
  std::vector<int> ids;
  if (!fs::is_directory(dir)) return ids;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && e.path().extension() == ".json") {
      ids.push_back(std::stoi(name.substr(prefix.size(), 4)));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

const GridConfig& grid_by_id(const PipelineConfig& cfg, const std::string& id) {
  for (const auto& g : cfg.grids) {
    if (g.id == id) return g;
  }
  fail(ErrorKind::invalid_argument, "unknown grid '" + id + "'");
}

fs::path fpr_file(const PipelineConfig& cfg, const std::string& id) { return grid_dir(cfg, id) / "fpr.json"; }

void variate_grid(const PipelineConfig& cfg, const GridConfig& g, const grid::Network& base,
                  const grid::EquipmentCatalog& catalog, const Logger& log) {
  std::vector<std::pair<ChildLink, builder::Fpr>> children;
  for (const auto& c : g.children) {
    const fs::path f = fpr_file(cfg, c.grid);
    if (!fs::exists(f)) {
      fail(ErrorKind::io, "grid '" + g.id + "' needs the FPR of child '" + c.grid + "' at '" +
                              f.string() + "'");
    }
    children.push_back({c, builder::fpr_from_json(io::read_json_file(f), f.string())});
  }

  scenario::ScenarioConfig sc = cfg.scenarios;
  const auto scenarios = scenario::generate(base, sc);
  const fs::path dir = grid_dir(cfg, g.id);
  fs::remove_all(dir / "stages");
  fs::remove_all(dir / "fors");
  io::write_json_file(dir / "scenarios.json", scenario::scenarios_to_json(scenarios));

  std::vector<std::optional<expansion::ExpansionStage>> stages(scenarios.size());
  std::vector<std::string> failures(scenarios.size());
  parallel_for(scenarios.size(), cfg.jobs, [&](std::size_t i) {
    const auto& s = scenarios[i];
    grid::Network net = scenario::apply(base, s);
    for (const auto& [link, fpr] : children) {
      net = builder::embed_child(net, fpr, link.bus, g.selection, s.scale_factor);
    }
    try {
      auto stage = expansion::reinforce(net, catalog, cfg.reinforce);
      stage.scenario_id = s.scenario_id;
      stage.scale_factor = s.scale_factor;
      stages[i] = std::move(stage);
    } catch (const expansion::ReinforcementError& e) {
      failures[i] = e.what();
    }
  });

  int written = 0;
  std::string first_failure;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (stages[i]) {
      io::write_json_file(stage_path(cfg, g.id, scenarios[i].scenario_id), expansion::stage_to_json(*stages[i]));
      ++written;
    } else {
      const std::string msg = "scenario " + std::to_string(scenarios[i].scenario_id) + " of '" + g.id +
                              "' unplannable: " + failures[i];
      if (!cfg.skip_failed) fail(ErrorKind::unplannable, msg);
      log("skipped " + msg);
    }
  }
  if (written == 0) fail(ErrorKind::unplannable, "no plannable scenario for grid '" + g.id + "'");
  log("variate " + g.id + ": " + std::to_string(written) + " of " + std::to_string(scenarios.size()) +
      " stages written");
}

void for_grid(const PipelineConfig& cfg, const GridConfig& g, const Logger& log) {
  const fs::path dir = grid_dir(cfg, g.id);
  const auto ids = scenario_ids_on_disk(dir / "stages", "stage_");
  if (ids.empty()) fail(ErrorKind::io, "no expansion stages for grid '" + g.id + "' below '" + dir.string() + "'");
  fs::remove_all(dir / "fors");
  std::vector<std::optional<region::ForPolygon>> fors(ids.size());
  std::vector<std::string> failures(ids.size());
  parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
    const fs::path sp = stage_path(cfg, g.id, ids[i]);
    const auto stage = expansion::stage_from_json(io::read_json_file(sp), sp.string());
    region::SweepConfig sw = cfg.sweep;
    sw.jobs = 1;
    sw.use_cases = cfg.reinforce.use_cases;
    try {
      fors[i] = region::compute_for(stage.network, sw);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::infeasible) throw;
      failures[i] = e.what();
    }
  });
  int written = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!fors[i]) {
      const std::string msg = "FOR of stage " + std::to_string(ids[i]) + " of '" + g.id + "': " + failures[i];
      if (!cfg.skip_failed) fail(ErrorKind::infeasible, msg);
      log("skipped " + msg);
      continue;
    }
    io::write_json_file(for_path(cfg, g.id, ids[i]), region::for_to_json(*fors[i]));
    auto csv = for_path(cfg, g.id, ids[i]);
    csv.replace_extension(".csv");
    io::write_text_file(csv, region::for_to_csv(*fors[i]));
    ++written;
  }
  log("for " + g.id + ": " + std::to_string(written) + " regions at " +
      std::to_string(cfg.sweep.n_directions) + " directions");
}

void assemble_grid(const PipelineConfig& cfg, const GridConfig& g, const Logger& log) {
  const fs::path dir = grid_dir(cfg, g.id);
  std::vector<builder::StageRegion> regions;
  for (int id : scenario_ids_on_disk(dir / "fors", "for_")) {
    const fs::path sp = stage_path(cfg, g.id, id);
    const fs::path fp = for_path(cfg, g.id, id);
    auto stage = expansion::stage_from_json(io::read_json_file(sp), sp.string());
    auto poly = region::for_from_json(io::read_json_file(fp), fp.string());
    auto r = builder::stage_region(stage, std::move(poly));
    r.grid_id = g.id;
    regions.push_back(std::move(r));
  }
  if (regions.empty()) fail(ErrorKind::io, "no feasible operation regions for grid '" + g.id + "'");
  const auto fpr = builder::assemble(regions);
  io::write_json_file(dir / "fpr.json", builder::fpr_to_json(fpr));
  io::write_text_file(dir / "fpr_curve.csv", builder::fpr_curve_csv(fpr, cfg.linearize.metric));
  log("fpr " + g.id + ": " + std::to_string(fpr.entries.size()) + " entries from " +
      std::to_string(regions.size()) + " stages");
}

void linearize_grid(const PipelineConfig& cfg, const GridConfig& g, const Logger& log) {
  const fs::path f = fpr_file(cfg, g.id);
  const auto fpr = builder::fpr_from_json(io::read_json_file(f), f.string());
  const auto model = builder::linearize(fpr, cfg.linearize);
  io::write_json_file(grid_dir(cfg, g.id) / "linear_model.json", builder::linear_model_to_json(model));
  log("linearize " + g.id + ": capex_per_mw " + io::format_number(model.capex_per_mw) + ", base_cost " +
      io::format_number(model.base_cost) + (model.degenerate ? " (" + model.warning + ")" : ""));
}

std::string describe(const GridConfig& g, const grid::Network& net) {
  return g.id + " (" + grid::to_string(net.grid_level()) + ")";
}

}  // namespace

PipelineConfig config_from_json(const Json& doc, const fs::path& base, const std::string& source) {
  io::require_keys_subset(doc, {"catalog", "out", "grids", "scenarios", "sweep", "reinforce",
                                "linearize", "cep", "seed", "jobs", "skip_failed", "export_lp"},
                          source);
  PipelineConfig cfg;
  cfg.catalog = resolve(base, io::string_field(doc, "catalog", source));
  if (doc.contains("out")) cfg.out = resolve(base, io::string_field(doc, "out", source));
  const Json& grids = io::require_field(doc, "grids", source);
  if (!grids.is_array() || grids.empty()) fail(ErrorKind::schema, source + ".grids: expected a nonempty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const std::string w = source + ".grids[" + std::to_string(i) + "]";
    io::require_keys_subset(grids[i], {"id", "path", "children", "selection"}, w);
    GridConfig g;
    g.path = resolve(base, io::string_field(grids[i], "path", w));
    g.id = grids[i].contains("id") ? io::string_field(grids[i], "id", w) : g.path.stem().string();
    if (!ids.insert(g.id).second) fail(ErrorKind::schema, w + ": duplicate grid id '" + g.id + "'");
    if (grids[i].contains("selection")) {
      g.selection = builder::parse_child_selection(io::string_field(grids[i], "selection", w));
    }
    if (grids[i].contains("children")) {
      const Json& cs = grids[i]["children"];
      for (std::size_t k = 0; k < cs.size(); ++k) {
        const std::string wc = w + ".children[" + std::to_string(k) + "]";
        io::require_keys_subset(cs[k], {"grid", "bus"}, wc);
        g.children.push_back({io::string_field(cs[k], "grid", wc), io::string_field(cs[k], "bus", wc)});
      }
    }
    cfg.grids.push_back(std::move(g));
  }
  for (const auto& g : cfg.grids) {
    for (const auto& c : g.children) {
      if (!ids.count(c.grid)) fail(ErrorKind::schema, source + ": grid '" + g.id + "' has unknown child '" + c.grid + "'");
    }
  }
  if (doc.contains("scenarios")) cfg.scenarios = scenario::config_from_json(doc["scenarios"], source + ".scenarios");
  if (doc.contains("seed")) cfg.scenarios.master_seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("sweep")) {
    const Json& s = doc["sweep"];
    const std::string w = source + ".sweep";
    io::require_keys_subset(s, {"n_directions", "bisection_tol_mw", "max_bisection_steps"}, w);
    if (s.contains("n_directions")) cfg.sweep.n_directions = s["n_directions"].get<int>();
    if (s.contains("bisection_tol_mw")) cfg.sweep.bisection_tol_mw = io::number_field(s, "bisection_tol_mw", w);
    if (s.contains("max_bisection_steps")) cfg.sweep.max_bisection_steps = s["max_bisection_steps"].get<int>();
  }
  if (doc.contains("reinforce")) {
    const Json& r = doc["reinforce"];
    const std::string w = source + ".reinforce";
    io::require_keys_subset(r, {"planning_margin", "max_iterations", "feed_in_load_fraction"}, w);
    cfg.reinforce.planning_margin = io::number_or(r, "planning_margin", cfg.reinforce.planning_margin, w);
    if (r.contains("max_iterations")) cfg.reinforce.max_iterations = r["max_iterations"].get<int>();
    cfg.reinforce.use_cases.feed_in_load_fraction =
        io::number_or(r, "feed_in_load_fraction", cfg.reinforce.use_cases.feed_in_load_fraction, w);
  }
  if (doc.contains("linearize")) {
    const Json& l = doc["linearize"];
    const std::string w = source + ".linearize";
    io::require_keys_subset(l, {"metric", "opex_per_mwh"}, w);
    if (l.contains("metric")) cfg.linearize.metric = builder::parse_capacity_metric(io::string_field(l, "metric", w));
    cfg.linearize.opex_per_mwh = io::number_or(l, "opex_per_mwh", 0.0, w);
  }
  if (doc.contains("cep")) {
    const Json& c = doc["cep"];
    io::require_keys_subset(c, {"study"}, source + ".cep");
    cfg.cep_study = resolve(base, io::string_field(c, "study", source + ".cep"));
  }
  if (doc.contains("jobs")) cfg.jobs = doc["jobs"].get<int>();
  cfg.skip_failed = io::bool_or(doc, "skip_failed", false, source);
  cfg.export_lp = io::bool_or(doc, "export_lp", false, source);
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  return config_from_json(io::read_json_file(path), path.parent_path(), path.string());
}

std::vector<std::size_t> dependency_order(const PipelineConfig& cfg) {
  const std::size_t n = cfg.grids.size();
  std::vector<int> level(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    // Level from the file when readable; ordering only needs a hint.
    try {
      const Json doc = io::read_json_file(cfg.grids[i].path);
      if (doc.contains("buses")) {
        int best = 0;
        for (const auto& b : doc["buses"]) {
          if (b.contains("voltage_level") && b["voltage_level"].is_string()) {
            const auto lvl = static_cast<int>(grid::parse_voltage_level(b["voltage_level"].get<std::string>()));
            if (!b.value("is_pcc", false)) best = std::max(best, lvl);
          }
        }
        level[i] = best;
      }
    } catch (const Error&) {
    }
  }
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[cfg.grids[i].id] = i;
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  while (order.size() < n) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      bool ready = true;
      for (const auto& c : cfg.grids[i].children) ready = ready && done[idx.at(c.grid)];
      if (ready && (!pick || level[i] < level[*pick])) pick = i;
    }
    if (!pick) fail(ErrorKind::schema, "grid dependencies form a cycle");
    done[*pick] = true;
    order.push_back(*pick);
  }
  return order;
}

Logger stderr_logger() {
  return [](const std::string& msg) {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[fpr] " << msg << '\n';
  };
}

fs::path grid_dir(const PipelineConfig& cfg, const std::string& grid_id) { return cfg.out / grid_id; }

fs::path stage_path(const PipelineConfig& cfg, const std::string& grid_id, int scenario_id) {
  return grid_dir(cfg, grid_id) / "stages" / ("stage_" + padded(scenario_id) + ".json");
}

fs::path for_path(const PipelineConfig& cfg, const std::string& grid_id, int scenario_id) {
  return grid_dir(cfg, grid_id) / "fors" / ("for_" + padded(scenario_id) + ".json");
}

void run_variate(const PipelineConfig& cfg, const Logger& log) {
  const Loaded in = load_inputs(cfg);
  for (std::size_t i : dependency_order(cfg)) {
    log("variate grid " + describe(cfg.grids[i], in.networks[i]));
    variate_grid(cfg, cfg.grids[i], in.networks[i], in.catalog, log);
  }
}

void run_for(const PipelineConfig& cfg, const Logger& log) {
  for (std::size_t i : dependency_order(cfg)) for_grid(cfg, cfg.grids[i], log);
}

void run_fpr(const PipelineConfig& cfg, const Logger& log) {
  const Loaded in = load_inputs(cfg);
  for (std::size_t i : dependency_order(cfg)) {
    const auto& g = cfg.grids[i];
    log("grid " + describe(g, in.networks[i]) + ": start");
    variate_grid(cfg, g, in.networks[i], in.catalog, log);
    for_grid(cfg, g, log);
    assemble_grid(cfg, g, log);
    linearize_grid(cfg, g, log);
    log("grid " + describe(g, in.networks[i]) + ": done");
  }
}

void run_linearize(const PipelineConfig& cfg, const Logger& log) {
  for (std::size_t i : dependency_order(cfg)) linearize_grid(cfg, cfg.grids[i], log);
}

void run_cep(const PipelineConfig& cfg, const Logger& log) {
  if (!cfg.cep_study) fail(ErrorKind::invalid_argument, "no CEP study configured");
  const fs::path study = *cfg.cep_study;
  const fs::path study_dir = study.parent_path();
  cep::ModelResolver resolver = [&](const std::string& ref) -> fs::path {
    if (ref.rfind("grid:", 0) == 0) {
      const std::string id = ref.substr(5);
      grid_by_id(cfg, id);
      return grid_dir(cfg, id) / "linear_model.json";
    }
    return resolve(study_dir, ref);
  };
  const cep::CepModel b = cep::load_model(study, resolver);
  const cep::CepModel a = cep::derive_scenario_a(b);
  const auto report = cep::run_study(a, b);
  const fs::path dir = cfg.out / "cep";
  io::write_text_file(dir / "report.csv", cep::report_csv(report.rows));
  io::write_text_file(dir / "summary.csv", cep::summary_csv(report));
  if (cfg.export_lp) {
    io::write_text_file(dir / "scenario_a.lp", lp::to_lp_text(report.lp_a.problem));
    io::write_text_file(dir / "scenario_b.lp", lp::to_lp_text(report.lp_b.problem));
  }
  log("cep " + b.id + ": objective A " + io::format_number(report.a.objective) + ", B " +
      io::format_number(report.b.objective) + ", delta " +
      io::format_number(report.b.objective - report.a.objective));
}

void run_pipeline(const PipelineConfig& cfg, const Logger& log) {
  run_fpr(cfg, log);
  if (cfg.cep_study) run_cep(cfg, log);
}

}  // namespace fpr::pipeline
