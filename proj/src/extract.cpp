#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wearfuse/error.hpp"
#include "wearfuse/fbse.hpp"
#include "wearfuse/parallel.hpp"
#include "wearfuse/pipeline.hpp"

namespace wearfuse {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

template <class T>
T parse_cell(std::string_view cell, const fs::path& path, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    fail(ErrorCode::Ingestion, path.string() + ":" + std::to_string(line) + ": cannot parse '" +
                                   std::string(cell) + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> FeatureStore::subjects() const {
  std::set<std::string> ids;
  for (const auto& r : rows) ids.insert(r.subject);
  return {ids.begin(), ids.end()};
}

void FeatureStore::save(const fs::path& dir) const {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "features.csv", std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + (dir / "features.csv").string());
    std::string buf = "subject,modality,window_k,label";
    for (std::size_t i = 0; i < dim(); ++i) buf += ",f_" + std::to_string(i);
    buf += '\n';
    for (const auto& r : rows) {
      buf += r.subject;
      buf += ',';
      buf += to_string(r.modality);
      buf += ',' + std::to_string(r.k) + ',' + std::to_string(code_of(r.label));
      for (double v : r.values) {
        buf += ',';
        buf += format_double(v);
      }
      buf += '\n';
    }
    out << buf;
    if (!out) fail(ErrorCode::Io, "write failed for " + (dir / "features.csv").string());
  }
  nlohmann::ordered_json log;
  log["modes"] = modes;
  log["counts"] = nlohmann::ordered_json::array();
  for (const auto& c : counts) {
    log["counts"].push_back({{"subject", c.subject},
                             {"modality", std::string(to_string(c.modality))},
                             {"accepted", c.accepted},
                             {"rejected", c.rejected}});
  }
  std::ofstream out(dir / "extract_log.json", std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + (dir / "extract_log.json").string());
  out << log.dump(2) << '\n';
}

FeatureStore FeatureStore::load(const fs::path& dir) {
  FeatureStore store;
  const auto path = dir / "features.csv";
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string() + " (run extract first)");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Ingestion, path.string() + ":1: missing header");
  auto header = split_csv(line);
  if (header.size() < 4 || header[0] != "subject" || header[1] != "modality" || header[2] != "window_k" ||
      header[3] != "label" || (header.size() - 4) % kFeaturesPerMode != 0 || header.size() == 4) {
    fail(ErrorCode::Ingestion, path.string() + ":1: unexpected header");
  }
  const std::size_t dim = header.size() - 4;
  for (std::size_t i = 0; i < dim; ++i) {
    if (header[4 + i] != "f_" + std::to_string(i)) fail(ErrorCode::Ingestion, path.string() + ":1: unexpected header");
  }
  store.modes = dim / kFeaturesPerMode;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::Ingestion, path.string() + ":" + std::to_string(number) + ": expected " +
                                     std::to_string(header.size()) + " columns");
    }
    FeatureRow r;
    r.subject = std::string(cells[0]);
    auto m = parse_modality(cells[1]);
    if (!m) fail(ErrorCode::Ingestion, path.string() + ":" + std::to_string(number) + ": unknown modality");
    r.modality = *m;
    r.k = parse_cell<std::size_t>(cells[2], path, number);
    auto label = class_from_code(parse_cell<int>(cells[3], path, number));
    if (!label) fail(ErrorCode::Ingestion, path.string() + ":" + std::to_string(number) + ": label must be 1, 2 or 3");
    r.label = *label;
    r.values.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) r.values.push_back(parse_cell<double>(cells[4 + i], path, number));
    store.rows.push_back(std::move(r));
  }
  const auto log_path = dir / "extract_log.json";
  if (fs::exists(log_path)) {
    std::ifstream lin(log_path);
    auto j = nlohmann::json::parse(lin);
    for (const auto& c : j.at("counts")) {
      store.counts.push_back({c.at("subject").get<std::string>(),
                              parse_modality(c.at("modality").get<std::string>()).value(),
                              c.at("accepted").get<std::size_t>(), c.at("rejected").get<std::size_t>()});
    }
  }
  return store;
}

std::vector<double> block_average(std::span<const double> y, std::size_t factor) {
  if (factor == 0) fail(ErrorCode::InvalidArgument, "block_average: factor must be positive");
  std::vector<double> out(y.size() / factor);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < factor; ++j) acc += y[i * factor + j];
    out[i] = acc / static_cast<double>(factor);
  }
  return out;
}

std::vector<FeatureRow> extract_record(const SignalRecord& record, const LabelStream& labels,
                                       const PipelineConfig& config, ExtractCount* count) {
  auto spec = WindowSpec::make(config.window_seconds, config.overlap, record.fs);
  auto labeled = label_windows(record, labels, spec, config.purity);
  const auto ewt = config.ewt();
  std::vector<FeatureRow> rows;
  rows.reserve(labeled.accepted.size());
  // windows longer than the FBSE limit are block-averaged down to fit
  const std::size_t factor = (spec.length + kMaxFbseLength - 1) / kMaxFbseLength;
  for (const auto& w : labeled.accepted) {
    auto modes = factor > 1 ? decompose(block_average(w.samples, factor), record.fs / static_cast<double>(factor), ewt)
                            : decompose(w.samples, record.fs, ewt);
    auto fv = feature_vector(modes, w, config.modes, config.epsilon);
    rows.push_back({w.subject_id, record.modality, w.k, w.label, std::move(fv.values)});
  }
  if (count) *count = {record.subject_id, record.modality, labeled.accepted.size(), labeled.rejected};
  return rows;
}

FeatureStore run_extract(const PipelineConfig& config, const Logger& log) {
  config.validate();
  if (config.data_dir.empty()) fail(ErrorCode::Validation, "config field 'data_dir': required for extraction");
  auto subjects = list_subjects(config.data_dir);
  if (subjects.empty()) fail(ErrorCode::Ingestion, "no subject directories under " + config.data_dir);

  const std::size_t ns = config.sensors.size();
  std::vector<std::vector<FeatureRow>> rows(subjects.size() * ns);
  std::vector<ExtractCount> counts(subjects.size() * ns);
  parallel_for(subjects.size(), config.threads, [&](std::size_t s) {
    auto data = read_subject(fs::path(config.data_dir) / subjects[s], config.sensors);
    for (std::size_t m = 0; m < ns; ++m) {
      rows[s * ns + m] = extract_record(data.signals.at(config.sensors[m]), data.labels, config, &counts[s * ns + m]);
    }
  });

  FeatureStore store;
  store.modes = config.modes;
  for (auto& part : rows) {
    for (auto& r : part) store.rows.push_back(std::move(r));
  }
  store.counts = std::move(counts);
  if (log) {
    for (const auto& c : store.counts) {
      log(c.subject + " " + std::string(to_string(c.modality)) + ": " + std::to_string(c.accepted) +
          " windows, " + std::to_string(c.rejected) + " rejected");
    }
  }
  return store;
}

}  // namespace wearfuse
