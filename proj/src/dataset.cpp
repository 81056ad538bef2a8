#include "wearfuse/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wearfuse/error.hpp"

namespace wearfuse {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_line(const fs::path& path, std::size_t line, const std::string& why) {
  fail(ErrorCode::Ingestion, path.string() + ":" + std::to_string(line) + ": " + why);
}

template <class T>
std::vector<T> read_column(const fs::path& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    std::string cell = trim(line);
    if (!seen_header) {
      if (cell != header) bad_line(path, number, "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    if (cell.empty()) bad_line(path, number, "empty line");
    T value{};
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) bad_line(path, number, "cannot parse '" + cell + "'");
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value)) bad_line(path, number, "non-finite value");
    }
    out.push_back(value);
  }
  if (!seen_header) bad_line(path, 1, "missing header '" + std::string(header) + "'");
  return out;
}

template <class T>
void write_column(const fs::path& path, std::string_view header, std::span<const T> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  std::string buf;
  buf.reserve(values.size() * 12 + 16);
  buf.append(header).push_back('\n');
  char tmp[64];
  for (T v : values) {
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    buf.append(tmp, ptr).push_back('\n');
  }
  out << buf;
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

fs::path record_path(const fs::path& dir, Modality m) {
  return dir / (std::string(to_string(m)) + ".csv");
}

}  // namespace

std::string format_double(double v) {
  char tmp[64];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
  return std::string(tmp, ptr);
}

std::vector<double> read_value_csv(const fs::path& path) { return read_column<double>(path, "value"); }
std::vector<int> read_label_csv(const fs::path& path) { return read_column<int>(path, "label"); }

void write_value_csv(const fs::path& path, std::span<const double> values) {
  write_column<double>(path, "value", values);
}
void write_label_csv(const fs::path& path, std::span<const int> labels) {
  write_column<int>(path, "label", labels);
}

std::map<Modality, double> read_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Ingestion, path.string() + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::Ingestion, path.string() + ": expected an object");
  std::map<Modality, double> out;
  for (const auto& [key, value] : j.items()) {
    auto m = parse_modality(key);
    if (!m || *m == Modality::ACC) fail(ErrorCode::Ingestion, path.string() + ": unknown modality '" + key + "'");
    if (!value.is_number() || !(value.get<double>() > 0.0)) {
      fail(ErrorCode::Ingestion, path.string() + ": sampling rate of " + key + " must be a positive number");
    }
    out[*m] = value.get<double>();
  }
  return out;
}

std::vector<std::string> list_subjects(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) fail(ErrorCode::Io, "data directory not found: " + root.string());
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "labels.csv")) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

SubjectData read_subject(const fs::path& dir, std::span<const Modality> sensors) {
  SubjectData data;
  data.subject_id = dir.filename().string();
  auto meta = read_meta(dir / "meta.json");
  data.labels.subject_id = data.subject_id;
  data.labels.labels = read_label_csv(dir / "labels.csv");
  if (data.labels.labels.empty()) fail(ErrorCode::Ingestion, (dir / "labels.csv").string() + ": no labels");

  auto load = [&](Modality m) {
    auto it = meta.find(m);
    if (it == meta.end()) {
      fail(ErrorCode::MissingModality, data.subject_id + ": meta.json has no rate for " + std::string(to_string(m)));
    }
    auto path = record_path(dir, m);
    if (!fs::exists(path)) fail(ErrorCode::MissingModality, "missing " + path.string());
    SignalRecord r{data.subject_id, m, it->second, read_value_csv(path)};
    if (r.samples.empty()) fail(ErrorCode::Ingestion, path.string() + ": no samples");
    return r;
  };

  for (Modality m : sensors) {
    if (m == Modality::ACC) {
      auto x = load(Modality::ACC_X);
      auto y = load(Modality::ACC_Y);
      auto z = load(Modality::ACC_Z);
      data.signals[m] = acceleration_magnitude(x, y, z);
    } else {
      data.signals[m] = load(m);
    }
  }
  return data;
}

void write_subject(const fs::path& dir, const SubjectData& data) {
  fs::create_directories(dir);
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [m, record] : data.signals) {
    if (m == Modality::ACC) fail(ErrorCode::InvalidArgument, "write the ACC axes, not the magnitude");
    write_value_csv(record_path(dir, m), record.samples);
    meta[std::string(to_string(m))] = record.fs;
  }
  write_label_csv(dir / "labels.csv", data.labels.labels);
  std::ofstream out(dir / "meta.json", std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + (dir / "meta.json").string());
  out << meta.dump(2) << '\n';
}

}  // namespace wearfuse
