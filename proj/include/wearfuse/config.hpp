#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wearfuse/ewt.hpp"
#include "wearfuse/mlp.hpp"
#include "wearfuse/windowing.hpp"

namespace wearfuse {

struct SplitConfig {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
  bool loso = false;  // leave-one-subject-out instead of the single split
};

struct SynthConfig {
  std::size_t subjects = 15;
  double fs = 64.0;
  double block_seconds = 120.0;  // one contiguous block per condition
};

/// Every tunable of the pipeline. JSON form mirrors these field names.
struct PipelineConfig {
  double window_seconds = 30.0;
  double overlap = 0.75;
  double purity = 0.9;
  std::size_t modes = 5;
  double epsilon = 1e-12;
  ScaleSpaceConfig scale_space;
  MlpHyper mlp;  // mlp.seed is ignored: model seeds derive from `seed`
  SplitConfig split;
  std::uint64_t seed = 42;
  std::vector<Modality> sensors{Modality::ECG, Modality::EDA, Modality::EMG, Modality::BVP, Modality::ACC};
  std::vector<Modality> corrupt_sensors;  // each in turn replaced by white noise on test subjects at evaluation
  SynthConfig synth;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string data_dir;
  std::string out_dir;

  /// Throws Error(Validation) naming the offending field.
  void validate() const;
  EwtConfig ewt() const;
  std::size_t feature_dim() const { return 3 * modes; }

  std::string to_json() const;
  /// Unknown keys are rejected; missing keys keep their defaults.
  static PipelineConfig from_json(const std::string& text);
  /// Applies the keys present in `text` on top of this config.
  void merge_json(const std::string& text);
  static PipelineConfig load(const std::string& path);
};

}  // namespace wearfuse
