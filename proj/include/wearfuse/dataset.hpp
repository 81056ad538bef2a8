#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wearfuse/windowing.hpp"

namespace wearfuse {

// Ingestion layout, one directory per subject:
//   <MODALITY>.csv  header "value", one sample per line
//   labels.csv      header "label", one integer code per line at 700 Hz
//   meta.json       {"<MODALITY>": fs_hz, ...}

struct SubjectData {
  std::string subject_id;
  std::map<Modality, SignalRecord> signals;
  LabelStream labels;
};

std::vector<double> read_value_csv(const std::filesystem::path& path);
std::vector<int> read_label_csv(const std::filesystem::path& path);
std::map<Modality, double> read_meta(const std::filesystem::path& path);

void write_value_csv(const std::filesystem::path& path, std::span<const double> values);
void write_label_csv(const std::filesystem::path& path, std::span<const int> labels);

/// Subject directories (those holding labels.csv), sorted by name.
std::vector<std::string> list_subjects(const std::filesystem::path& root);

/// Reads the labels and the records needed for `sensors`. ACC is assembled from
/// the three axis files. Throws MissingModality / Ingestion / Io.
SubjectData read_subject(const std::filesystem::path& dir, std::span<const Modality> sensors);

/// Writes every record (axis records for ACC), labels.csv and meta.json.
void write_subject(const std::filesystem::path& dir, const SubjectData& data);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace wearfuse
