#pragma once

#include <array>
#include <string>

#include "m6/evolution.h"

namespace m6 {

// Calibration of the ordinal target table onto concrete Gaussian parameters.
// These are engine defaults, exposed here and in the config file so they can
// be retuned without touching code.
struct LevelParams {
  // Generic level anchors.
  double level_zero = 0.0;
  double level_low = 0.3;
  double level_med = 0.5;
  double level_high = 0.85;
  // Compliance features (in-scale, in-chord ratios) mean "how strictly the
  // track obeys"; their High genuinely means "essentially always", and they
  // get a tighter Gaussian than taste features.
  double compliance_low = 0.4;
  double compliance_med = 0.7;
  double compliance_high = 1.0;
  double compliance_sigma = 0.05;
  // Emotion-impact magnitudes.
  double ei_none = 0.0;
  double ei_low = 0.1;
  double ei_med = 0.2;
  double ei_high = 0.3;

  double sigma_default = 0.15;
  double weight_default = 1.0;
  double harmony_weight = 2.0;

  // Direct per-feature target overrides; negative fields keep the table value.
  struct TargetOverride {
    double mu = -1.0;
    double sigma = -1.0;
    double weight = -1.0;
  };
  std::array<TargetOverride, kFeatureCount> overrides{};
};

struct DrumParams {
  // Hi-hat subdivision thresholds on arousal.
  double hat_quarter_below = 0.33;
  double hat_eighth_below = 0.75;
  // Last closed hi-hat opens with probability open_hat_scale * arousal.
  double open_hat_scale = 0.6;
  double ride_base_prob = 0.15;
  double ride_arousal_scale = 0.35;
  double bell_prob = 0.08;
  double crash_start_prob = 0.85;
  double crash_elsewhere_prob = 0.02;
  // Fill probability per measure in Standard mode; doubled in the final
  // measure of a section.
  double fill_base_prob = 0.1;
  double fill_arousal_scale = 0.4;
  int fill_min_steps = 2;
  int fill_max_steps = 8;
  // Realism post-processing.
  double echo_prob = 0.08;
  double sparsity_prob = 0.05;
};

struct EngineConfig {
  GaConfig ga;
  LevelParams levels;
  DrumParams drums;
  bool vary_repeats = false;
};

// Applies overrides from a JSON config file on top of the defaults.
// Unknown keys are rejected so typos do not silently vanish.
EngineConfig load_engine_config(const std::string& json_text);
EngineConfig load_engine_config_file(const std::string& path);

}  // namespace m6
