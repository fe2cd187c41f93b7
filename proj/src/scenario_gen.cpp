#include "fpr/scenario_gen.hpp"

#include <cmath>
#include <random>

#include "fpr/error.hpp"

namespace fpr::scenario {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform in (0, 1); never exactly zero so every candidate keeps a share.
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::string pick_technology(const std::map<std::string, double>& mix, std::mt19937_64& rng,
                            const std::string& fallback) {
  if (mix.empty()) return fallback;
  const double u = open_unit(rng);
  double acc = 0.0;
  for (const auto& [tech, share] : mix) {
    acc += share;
    if (u < acc) return tech;
  }
  return mix.rbegin()->first;
}

void check_mix(const std::map<std::string, double>& mix, const char* name) {
  if (mix.empty()) return;
  double sum = 0.0;
  for (const auto& [tech, share] : mix) {
    if (share < 0) fail(ErrorKind::invalid_argument, std::string(name) + ": negative share");
    sum += share;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(ErrorKind::invalid_argument, std::string(name) + ": shares must sum to 1");
  }
}

}  // namespace

void check_config(const ScenarioConfig& cfg) {
  if (cfg.n_random_draws < 1) fail(ErrorKind::invalid_argument, "n_random_draws must be >= 1");
  if (cfg.scale_factors.empty() || cfg.scale_factors.front() != 1.0) {
    fail(ErrorKind::invalid_argument, "scale_factors must start with 1.0");
  }
  for (std::size_t i = 1; i < cfg.scale_factors.size(); ++i) {
    if (!(cfg.scale_factors[i] > cfg.scale_factors[i - 1])) {
      fail(ErrorKind::invalid_argument, "scale_factors must be strictly increasing");
    }
  }
  if (!(cfg.cos_phi > 0 && cfg.cos_phi <= 1)) {
    fail(ErrorKind::invalid_argument, "cos_phi must lie in (0, 1]");
  }
  check_mix(cfg.technology_mix, "technology_mix");
  check_mix(cfg.load_technology_mix, "load_technology_mix");
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t draw,
                          std::uint64_t scale_index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ (draw + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (scale_index + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

CapacityTotals capacity_totals(const grid::Network& net) {
  CapacityTotals t;
  for (const auto& u : net.units) {
    if (u.kind == grid::UnitKind::generator) t.generation_mw += u.p_max_mw;
    if (u.kind == grid::UnitKind::load) t.load_mw += -u.p_min_mw;
  }
  return t;
}

std::vector<SupplyTaskScenario> generate(const grid::Network& net, const ScenarioConfig& cfg) {
  check_config(cfg);
  std::size_t redistributable = 0;
  for (const auto& u : net.units) {
    if (u.kind != grid::UnitKind::equivalent_fpr) ++redistributable;
  }
  if (redistributable == 0) {
    fail(ErrorKind::invalid_argument,
         "network '" + net.id + "' has no load or generation units to redistribute");
  }

  const CapacityTotals base = capacity_totals(net);
  const std::size_t pcc = net.pcc_index();
  const double tan_phi = std::tan(std::acos(cfg.cos_phi));

  // Candidate buses per kind, in network bus order, each with its units.
  struct Candidate {
    std::vector<const grid::Unit*> units;
  };
  auto candidates_for = [&](grid::UnitKind kind) {
    std::vector<Candidate> out;
    for (std::size_t b = 0; b < net.buses.size(); ++b) {
      if (b == pcc) continue;
      Candidate c;
      for (const auto& u : net.units) {
        if (u.kind == kind && u.bus == net.buses[b].id) c.units.push_back(&u);
      }
      if (!c.units.empty()) out.push_back(std::move(c));
    }
    return out;
  };
  const auto gen_candidates = candidates_for(grid::UnitKind::generator);
  const auto load_candidates = candidates_for(grid::UnitKind::load);

  std::vector<SupplyTaskScenario> out;
  const auto n_scales = cfg.scale_factors.size();
  for (int draw = 0; draw < cfg.n_random_draws; ++draw) {
    for (std::size_t k = 0; k < n_scales; ++k) {
      SupplyTaskScenario sc;
      sc.scenario_id = draw * static_cast<int>(n_scales) + static_cast<int>(k);
      sc.draw = draw;
      sc.scale_factor = cfg.scale_factors[k];
      sc.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(draw), k);
      std::mt19937_64 rng(sc.seed);

      auto partition = [&](const std::vector<Candidate>& cands, double total, bool is_load,
                           const std::map<std::string, double>& mix) {
        std::vector<double> w(cands.size());
        double sum = 0.0;
        for (auto& x : w) {
          x = open_unit(rng);
          sum += x;
        }
        for (std::size_t c = 0; c < cands.size(); ++c) {
          const double bus_share = total * w[c] / sum;
          const double unit_share = bus_share / static_cast<double>(cands[c].units.size());
          for (const grid::Unit* u : cands[c].units) {
            UnitOverride o;
            if (is_load) {
              o.p_min_mw = -unit_share;
              o.p_max_mw = 0.0;
            } else {
              o.p_min_mw = 0.0;
              o.p_max_mw = unit_share;
            }
            o.q_min_mvar = -unit_share * tan_phi;
            o.q_max_mvar = unit_share * tan_phi;
            o.technology = pick_technology(mix, rng, u->technology);
            sc.unit_overrides[u->id] = o;
          }
        }
      };
      partition(gen_candidates, base.generation_mw * sc.scale_factor, false, cfg.technology_mix);
      partition(load_candidates, base.load_mw * sc.scale_factor, true, cfg.load_technology_mix);
      out.push_back(std::move(sc));
    }
  }
  return out;
}

grid::Network apply(const grid::Network& net, const SupplyTaskScenario& scenario) {
  grid::Network out = net;
  for (const auto& [id, o] : scenario.unit_overrides) {
    grid::Unit* u = out.find_unit(id);
    if (!u) fail(ErrorKind::invalid_argument, "scenario overrides unknown unit '" + id + "'");
    u->p_min_mw = o.p_min_mw;
    u->p_max_mw = o.p_max_mw;
    u->q_min_mvar = o.q_min_mvar;
    u->q_max_mvar = o.q_max_mvar;
    u->technology = o.technology;
  }
  return out;
}

Json scenarios_to_json(const std::vector<SupplyTaskScenario>& scenarios) {
  Json arr = Json::array();
  for (const auto& sc : scenarios) {
    Json overrides = Json::object();
    for (const auto& [id, o] : sc.unit_overrides) {
      overrides[id] = Json{{"p_min_mw", o.p_min_mw},
                           {"p_max_mw", o.p_max_mw},
                           {"q_min_mvar", o.q_min_mvar},
                           {"q_max_mvar", o.q_max_mvar},
                           {"technology", o.technology}};
    }
    arr.push_back(Json{{"scenario_id", sc.scenario_id},
                       {"draw", sc.draw},
                       {"seed", sc.seed},
                       {"scale_factor", sc.scale_factor},
                       {"unit_overrides", std::move(overrides)}});
  }
  return arr;
}

std::vector<SupplyTaskScenario> scenarios_from_json(const Json& doc) {
  if (!doc.is_array()) fail(ErrorKind::schema, "scenario list: expected an array");
  std::vector<SupplyTaskScenario> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string w = "scenarios[" + std::to_string(i) + "]";
    const Json& j = doc[i];
    io::require_keys_subset(j, {"scenario_id", "draw", "seed", "scale_factor", "unit_overrides"}, w);
    SupplyTaskScenario sc;
    sc.scenario_id = io::require_field(j, "scenario_id", w).get<int>();
    sc.draw = io::require_field(j, "draw", w).get<int>();
    sc.seed = io::require_field(j, "seed", w).get<std::uint64_t>();
    sc.scale_factor = io::number_field(j, "scale_factor", w);
    for (const auto& item : io::require_field(j, "unit_overrides", w).items()) {
      const std::string wo = w + ".unit_overrides." + item.key();
      const Json& o = item.value();
      io::require_keys_subset(o, {"p_min_mw", "p_max_mw", "q_min_mvar", "q_max_mvar", "technology"},
                              wo);
      sc.unit_overrides[item.key()] =
          UnitOverride{io::number_field(o, "p_min_mw", wo), io::number_field(o, "p_max_mw", wo),
                       io::number_field(o, "q_min_mvar", wo), io::number_field(o, "q_max_mvar", wo),
                       io::string_field(o, "technology", wo)};
    }
    out.push_back(std::move(sc));
  }
  return out;
}

ScenarioConfig config_from_json(const Json& doc, const std::string& where) {
  io::require_keys_subset(doc,
                          {"n_random_draws", "scale_factors", "master_seed", "technology_mix",
                           "load_technology_mix", "cos_phi"},
                          where);
  ScenarioConfig cfg;
  if (doc.contains("n_random_draws")) cfg.n_random_draws = doc["n_random_draws"].get<int>();
  if (doc.contains("scale_factors")) {
    cfg.scale_factors = doc["scale_factors"].get<std::vector<double>>();
  }
  if (doc.contains("master_seed")) cfg.master_seed = doc["master_seed"].get<std::uint64_t>();
  if (doc.contains("technology_mix")) {
    for (const auto& item : doc["technology_mix"].items()) {
      cfg.technology_mix[item.key()] = item.value().get<double>();
    }
  }
  if (doc.contains("load_technology_mix")) {
    for (const auto& item : doc["load_technology_mix"].items()) {
      cfg.load_technology_mix[item.key()] = item.value().get<double>();
    }
  }
  cfg.cos_phi = io::number_or(doc, "cos_phi", cfg.cos_phi, where);
  check_config(cfg);
  return cfg;
}

}  // namespace fpr::scenario
