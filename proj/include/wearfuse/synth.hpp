#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wearfuse/config.hpp"
#include "wearfuse/dataset.hpp"

namespace wearfuse {

/// Tone frequency (Hz) each class drives in one sensor, indexed by AffectClass.
struct ToneTable {
  Modality sensor;
  std::array<double, kNumClasses> hz;
  double noise;  // pink noise std relative to a unit tone
};

/// Generator table for the five default sensors. Some sensors share a tone
/// between two classes, so no single sensor separates all three.
std::span<const ToneTable> synthetic_tone_table();
const ToneTable& tone_table_for(Modality sensor);

/// Kellet's pink-noise filter over `n` white Gaussian samples, scaled to unit std.
std::vector<double> pink_noise(std::size_t n, std::uint64_t seed);

std::string synthetic_subject_id(std::size_t index);  // "S01", "S02", ...

/// One subject: one contiguous block per class in seeded order. Signals at
/// synth.fs, labels at 700 Hz with codes 1..3 only. ACC is emitted as axes.
SubjectData synthesize_subject(const PipelineConfig& config, std::size_t index);

/// Writes synth.subjects subject directories under `dir`; returns their ids.
std::vector<std::string> generate_synthetic(const PipelineConfig& config, const std::filesystem::path& dir);

}  // namespace wearfuse
