#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wearfuse/config.hpp"
#include "wearfuse/dataset.hpp"
#include "wearfuse/features.hpp"
#include "wearfuse/fusion.hpp"
#include "wearfuse/mlp.hpp"

namespace wearfuse {

using Logger = std::function<void(const std::string&)>;

// ---- extraction ----

struct FeatureRow {
  std::string subject;
  Modality modality = Modality::ECG;
  std::size_t k = 0;
  AffectClass label = AffectClass::Baseline;
  std::vector<double> values;
};

struct ExtractCount {
  std::string subject;
  Modality modality = Modality::ECG;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct FeatureStore {
  std::size_t modes = 0;
  std::vector<FeatureRow> rows;
  std::vector<ExtractCount> counts;

  std::size_t dim() const noexcept { return kFeaturesPerMode * modes; }
  std::vector<std::string> subjects() const;
  /// features.csv and extract_log.json
  void save(const std::filesystem::path& dir) const;
  static FeatureStore load(const std::filesystem::path& dir);
};

/// Means of consecutive `factor`-sample blocks; a trailing partial block is dropped.
std::vector<double> block_average(std::span<const double> y, std::size_t factor);

/// Window, label, decompose and featurize one record. Windows longer than the
/// FBSE limit are block-averaged by the smallest factor that fits.
std::vector<FeatureRow> extract_record(const SignalRecord& record, const LabelStream& labels,
                                       const PipelineConfig& config, ExtractCount* count = nullptr);

/// Every subject under config.data_dir, every configured sensor.
FeatureStore run_extract(const PipelineConfig& config, const Logger& log = {});

// ---- splits ----

enum class SplitRole { Train, Val, Test, None };

struct SubjectSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;

  SplitRole role_of(const std::string& subject) const;
  /// Throws std::logic_error if a subject appears in two roles.
  void assert_disjoint() const;
  bool operator==(const SubjectSplit&) const = default;
};

/// Single split: seeded shuffle, round(train*n) train, round(val*n) val, rest test.
/// LOSO: one fold per subject. Throws InsufficientData when a role would be empty.
std::vector<SubjectSplit> make_splits(std::vector<std::string> subjects, const SplitConfig& split,
                                      std::uint64_t seed);

// ---- models ----

/// A trained classifier with the normalization it was fitted with.
struct Checkpoint {
  std::string name;
  std::vector<Modality> members;  // one entry for a sensor model
  Standardizer norm;
  TrainedMlp model;
  std::uint64_t seed = 0;

  ClassDistribution predict(std::span<const double> raw) const;
  std::string to_json() const;
  static Checkpoint from_json(const std::string& text);
};

struct FoldModels {
  SubjectSplit split;
  std::vector<Checkpoint> sensors;  // config order
  std::vector<Checkpoint> teams;    // feature-level models, every team of size >= 2

  const Checkpoint& sensor(Modality m) const;
  const Checkpoint& team(const Team& t) const;
};

struct ModelStore {
  std::vector<Modality> sensors;
  std::vector<FoldModels> folds;

  void save(const std::filesystem::path& dir) const;  // models/manifest.json + one file per model
  static ModelStore load(const std::filesystem::path& dir);
};

ModelStore run_train(const PipelineConfig& config, const FeatureStore& features, const Logger& log = {});

// ---- evaluation ----

using Confusion = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;  // [true][predicted]

struct Score {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::map<std::string, double> by_subject;
  Confusion confusion{};
};

struct TeamResult {
  Team team;
  Score decision;
  Score feature;  // singletons reuse the sensor model
};

struct SizeSummary {
  std::size_t size = 0;
  std::size_t teams = 0;
  double mean_decision = 0.0;
  double std_decision = 0.0;  // population std over the teams of this size
  double mean_feature = 0.0;
  double std_feature = 0.0;
};

struct Tally {
  std::size_t d_gt_f = 0;
  std::size_t d_eq_f = 0;
  std::size_t d_lt_f = 0;

  std::size_t total() const noexcept { return d_gt_f + d_eq_f + d_lt_f; }
  std::array<double, 3> percentages() const;
};

struct SensorResult {
  Modality sensor = Modality::ECG;
  double val_f1 = 0.0;  // mean over folds
  double test_accuracy = 0.0;
};

struct CorruptionResult {
  Modality sensor = Modality::ECG;
  double decision_clean = 0.0;
  double decision_corrupt = 0.0;
  double feature_clean = 0.0;
  double feature_corrupt = 0.0;

  double decision_drop() const noexcept { return decision_clean - decision_corrupt; }
  double feature_drop() const noexcept { return feature_clean - feature_corrupt; }
};

struct EvalReport {
  PipelineConfig config;
  std::vector<SubjectSplit> folds;
  std::size_t test_windows = 0;
  std::vector<SensorResult> sensors;
  std::vector<TeamResult> teams;  // size-major, lexicographic
  std::vector<SizeSummary> per_size;
  Tally cases;      // one per (team, test subject)
  Tally per_team;   // one per team, pooled over test subjects
  std::vector<CorruptionResult> corruption;  // one per corrupted sensor, config order

  /// Mean (decision drop, feature drop) over the corruption scenarios.
  std::pair<double, double> mean_drops() const;

  const TeamResult& team(const Team& t) const;
  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
};

inline constexpr const char* kCaseDefinition = "one (team, test subject) accuracy pair";

/// Fused and feature-level accuracy for every team on the test windows shared by
/// all sensors. Each sensor in config.corrupt_sensors is in turn re-extracted from
/// white noise for the test subjects (needs config.data_dir). Fusion audit
/// records go to `audit_path` as JSON lines when given.
EvalReport run_evaluate(const PipelineConfig& config, const FeatureStore& features, const ModelStore& models,
                        const std::optional<std::filesystem::path>& audit_path = std::nullopt,
                        const Logger& log = {});

/// report.json and per_size.csv under `dir`.
void emit_report(const EvalReport& report, const std::filesystem::path& dir);

/// Synthesizes data when config.data_dir is empty, then extract, train,
/// evaluate and report under config.out_dir.
EvalReport run_all(const PipelineConfig& config, const Logger& log = {});

}  // namespace wearfuse
