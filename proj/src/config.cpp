#include "m6/config.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace m6 {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void apply_known_keys(const json& obj, const std::vector<const char*>& known,
                      const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(),
                     [&key](const char* k) { return key == k; }) == known.end()) {
      throw std::invalid_argument("unknown config key '" + where + "." + key + "'");
    }
  }
}

}  // namespace

EngineConfig load_engine_config(const std::string& json_text) {
  EngineConfig config;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  apply_known_keys(doc, {"ga", "levels", "drums", "fitness", "vary_repeats"}, "");

  if (doc.contains("ga")) {
    const json& ga = doc["ga"];
    apply_known_keys(ga,
                     {"population_size", "generations", "tournament_size", "mutation_rate",
                      "crossover_rate", "elitism_count", "threads"},
                     "ga");
    read_field(ga, "population_size", config.ga.population_size);
    read_field(ga, "generations", config.ga.generations);
    read_field(ga, "tournament_size", config.ga.tournament_size);
    read_field(ga, "mutation_rate", config.ga.mutation_rate);
    read_field(ga, "crossover_rate", config.ga.crossover_rate);
    read_field(ga, "elitism_count", config.ga.elitism_count);
    read_field(ga, "threads", config.ga.threads);
    if (config.ga.population_size < 1 || config.ga.generations < 0 ||
        config.ga.tournament_size < 1 ||
        config.ga.tournament_size > config.ga.population_size ||
        config.ga.mutation_rate < 0.0 || config.ga.mutation_rate > 1.0 ||
        config.ga.crossover_rate < 0.0 || config.ga.crossover_rate > 1.0) {
      throw std::invalid_argument("ga config out of range");
    }
  }
  if (doc.contains("levels")) {
    const json& levels = doc["levels"];
    apply_known_keys(levels,
                     {"level_zero", "level_low", "level_med", "level_high", "compliance_low",
                      "compliance_med", "compliance_high", "compliance_sigma", "ei_none", "ei_low", "ei_med",
                      "ei_high", "sigma_default", "weight_default", "harmony_weight"},
                     "levels");
    read_field(levels, "level_zero", config.levels.level_zero);
    read_field(levels, "level_low", config.levels.level_low);
    read_field(levels, "level_med", config.levels.level_med);
    read_field(levels, "level_high", config.levels.level_high);
    read_field(levels, "compliance_low", config.levels.compliance_low);
    read_field(levels, "compliance_med", config.levels.compliance_med);
    read_field(levels, "compliance_high", config.levels.compliance_high);
    read_field(levels, "compliance_sigma", config.levels.compliance_sigma);
    read_field(levels, "ei_none", config.levels.ei_none);
    read_field(levels, "ei_low", config.levels.ei_low);
    read_field(levels, "ei_med", config.levels.ei_med);
    read_field(levels, "ei_high", config.levels.ei_high);
    read_field(levels, "sigma_default", config.levels.sigma_default);
    read_field(levels, "weight_default", config.levels.weight_default);
    read_field(levels, "harmony_weight", config.levels.harmony_weight);
  }
  if (doc.contains("drums")) {
    const json& drums = doc["drums"];
    apply_known_keys(drums,
                     {"hat_quarter_below", "hat_eighth_below", "open_hat_scale",
                      "ride_base_prob", "ride_arousal_scale", "bell_prob", "crash_start_prob",
                      "crash_elsewhere_prob", "fill_base_prob", "fill_arousal_scale",
                      "fill_min_steps", "fill_max_steps", "echo_prob", "sparsity_prob"},
                     "drums");
    read_field(drums, "hat_quarter_below", config.drums.hat_quarter_below);
    read_field(drums, "hat_eighth_below", config.drums.hat_eighth_below);
    read_field(drums, "open_hat_scale", config.drums.open_hat_scale);
    read_field(drums, "ride_base_prob", config.drums.ride_base_prob);
    read_field(drums, "ride_arousal_scale", config.drums.ride_arousal_scale);
    read_field(drums, "bell_prob", config.drums.bell_prob);
    read_field(drums, "crash_start_prob", config.drums.crash_start_prob);
    read_field(drums, "crash_elsewhere_prob", config.drums.crash_elsewhere_prob);
    read_field(drums, "fill_base_prob", config.drums.fill_base_prob);
    read_field(drums, "fill_arousal_scale", config.drums.fill_arousal_scale);
    read_field(drums, "fill_min_steps", config.drums.fill_min_steps);
    read_field(drums, "fill_max_steps", config.drums.fill_max_steps);
    read_field(drums, "echo_prob", config.drums.echo_prob);
    read_field(drums, "sparsity_prob", config.drums.sparsity_prob);
  }
  if (doc.contains("fitness")) {
    // Per-feature target overrides keyed by feature name.
    for (const auto& [name, body] : doc["fitness"].items()) {
      int feature = -1;
      for (int i = 0; i < kFeatureCount; ++i) {
        if (name == feature_name(i)) feature = i;
      }
      if (feature < 0) {
        throw std::invalid_argument("unknown feature '" + name + "' in fitness overrides");
      }
      apply_known_keys(body, {"mu", "sigma", "weight"}, "fitness." + name);
      auto& entry = config.levels.overrides[static_cast<size_t>(feature)];
      read_field(body, "mu", entry.mu);
      read_field(body, "sigma", entry.sigma);
      read_field(body, "weight", entry.weight);
    }
  }
  read_field(doc, "vary_repeats", config.vary_repeats);
  return config;
}

EngineConfig load_engine_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_engine_config(buffer.str());
}

}  // namespace m6
