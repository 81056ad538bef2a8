#include "wearfuse/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wearfuse/error.hpp"

namespace wearfuse {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  fail(ErrorCode::Validation, "config field '" + field + "': " + why);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) invalid(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) invalid(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(where.empty() ? key : where + "." + key, e.what());
  }
}

Modality read_modality(const json& v, const std::string& field) {
  if (!v.is_string()) invalid(field, "expected a modality name");
  auto m = parse_modality(v.get<std::string>());
  if (!m) invalid(field, "unknown modality '" + v.get<std::string>() + "'");
  return *m;
}

void apply_json(const json& j, PipelineConfig& c) {
  check_keys(j,
             {"window_seconds", "overlap", "purity", "modes", "epsilon", "scale_space", "mlp", "split",
              "seed", "sensors", "corrupt_sensors", "synth", "threads", "data_dir", "out_dir"},
             "");
  read(j, "window_seconds", c.window_seconds, "");
  read(j, "overlap", c.overlap, "");
  read(j, "purity", c.purity, "");
  read(j, "modes", c.modes, "");
  read(j, "epsilon", c.epsilon, "");
  read(j, "seed", c.seed, "");
  read(j, "threads", c.threads, "");
  read(j, "data_dir", c.data_dir, "");
  read(j, "out_dir", c.out_dir, "");
  if (j.contains("scale_space")) {
    const auto& s = j.at("scale_space");
    check_keys(s, {"scales", "sigma0", "growth", "truncate"}, "scale_space");
    read(s, "scales", c.scale_space.scales, "scale_space");
    read(s, "sigma0", c.scale_space.sigma0, "scale_space");
    read(s, "growth", c.scale_space.growth, "scale_space");
    read(s, "truncate", c.scale_space.truncate, "scale_space");
  }
  if (j.contains("mlp")) {
    const auto& m = j.at("mlp");
    check_keys(m, {"hidden", "learning_rate", "l2", "dropout", "batch_size", "max_epochs", "patience"},
               "mlp");
    read(m, "hidden", c.mlp.hidden, "mlp");
    read(m, "learning_rate", c.mlp.learning_rate, "mlp");
    read(m, "l2", c.mlp.l2, "mlp");
    read(m, "dropout", c.mlp.dropout, "mlp");
    read(m, "batch_size", c.mlp.batch_size, "mlp");
    read(m, "max_epochs", c.mlp.max_epochs, "mlp");
    read(m, "patience", c.mlp.patience, "mlp");
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    check_keys(s, {"train", "val", "test", "loso"}, "split");
    read(s, "train", c.split.train, "split");
    read(s, "val", c.split.val, "split");
    read(s, "test", c.split.test, "split");
    read(s, "loso", c.split.loso, "split");
  }
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    check_keys(s, {"subjects", "fs", "block_seconds"}, "synth");
    read(s, "subjects", c.synth.subjects, "synth");
    read(s, "fs", c.synth.fs, "synth");
    read(s, "block_seconds", c.synth.block_seconds, "synth");
  }
  if (j.contains("sensors")) {
    const auto& s = j.at("sensors");
    if (!s.is_array()) invalid("sensors", "expected an array of modality names");
    c.sensors.clear();
    for (const auto& v : s) c.sensors.push_back(read_modality(v, "sensors"));
  }
  if (j.contains("corrupt_sensors")) {
    const auto& s = j.at("corrupt_sensors");
    if (!s.is_array()) invalid("corrupt_sensors", "expected an array of modality names");
    c.corrupt_sensors.clear();
    for (const auto& v : s) c.corrupt_sensors.push_back(read_modality(v, "corrupt_sensors"));
  }
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Validation, std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(window_seconds > 0.0) || !std::isfinite(window_seconds)) invalid("window_seconds", "must be positive");
  if (!(overlap >= 0.0 && overlap < 1.0)) invalid("overlap", "must lie in [0, 1)");
  if (!(purity > 0.0 && purity <= 1.0)) invalid("purity", "must lie in (0, 1]");
  if (modes < 1 || modes > 64) invalid("modes", "must lie in [1, 64]");
  if (!(epsilon > 0.0)) invalid("epsilon", "must be positive");
  if (scale_space.scales < 1 || scale_space.scales > 1000) invalid("scale_space.scales", "must lie in [1, 1000]");
  if (!(scale_space.sigma0 > 0.0)) invalid("scale_space.sigma0", "must be positive");
  if (!(scale_space.growth >= 1.0)) invalid("scale_space.growth", "must be >= 1");
  if (!(scale_space.truncate > 0.0)) invalid("scale_space.truncate", "must be positive");
  try {
    mlp.validate();
  } catch (const Error& e) {
    invalid("mlp", e.what());
  }
  for (double f : {split.train, split.val, split.test}) {
    if (!(f >= 0.0 && f <= 1.0)) invalid("split", "fractions must lie in [0, 1]");
  }
  if (std::abs(split.train + split.val + split.test - 1.0) > 1e-9) invalid("split", "fractions must sum to 1");
  if (!(split.train > 0.0) || !(split.val > 0.0)) invalid("split", "train and val fractions must be positive");
  if (sensors.empty()) invalid("sensors", "at least one sensor is required");
  std::set<Modality> seen;
  for (auto m : sensors) {
    if (m == Modality::ACC_X || m == Modality::ACC_Y || m == Modality::ACC_Z) {
      invalid("sensors", "use ACC (axis magnitude) rather than a single axis");
    }
    if (!seen.insert(m).second) invalid("sensors", "duplicate sensor " + std::string(to_string(m)));
  }
  std::set<Modality> corrupt;
  for (auto m : corrupt_sensors) {
    if (!seen.count(m)) invalid("corrupt_sensors", std::string(to_string(m)) + " is not one of the sensors");
    if (!corrupt.insert(m).second) invalid("corrupt_sensors", "duplicate sensor " + std::string(to_string(m)));
  }
  if (synth.subjects < 3) invalid("synth.subjects", "must be at least 3");
  if (!(synth.fs > 0.0)) invalid("synth.fs", "must be positive");
  if (!(synth.block_seconds > 0.0)) invalid("synth.block_seconds", "must be positive");
}

EwtConfig PipelineConfig::ewt() const { return EwtConfig{modes, scale_space, true}; }

std::string PipelineConfig::to_json() const {
  ordered j;
  j["window_seconds"] = window_seconds;
  j["overlap"] = overlap;
  j["purity"] = purity;
  j["modes"] = modes;
  j["epsilon"] = epsilon;
  j["scale_space"] = {{"scales", scale_space.scales},
                      {"sigma0", scale_space.sigma0},
                      {"growth", scale_space.growth},
                      {"truncate", scale_space.truncate}};
  j["mlp"] = {{"hidden", mlp.hidden},         {"learning_rate", mlp.learning_rate},
              {"l2", mlp.l2},                 {"dropout", mlp.dropout},
              {"batch_size", mlp.batch_size}, {"max_epochs", mlp.max_epochs},
              {"patience", mlp.patience}};
  j["split"] = {{"train", split.train}, {"val", split.val}, {"test", split.test}, {"loso", split.loso}};
  j["seed"] = seed;
  ordered names = ordered::array();
  for (auto m : sensors) names.push_back(std::string(to_string(m)));
  j["sensors"] = names;
  ordered corrupt = ordered::array();
  for (auto m : corrupt_sensors) corrupt.push_back(std::string(to_string(m)));
  j["corrupt_sensors"] = corrupt;
  j["synth"] = {{"subjects", synth.subjects},
                {"fs", synth.fs},
                {"block_seconds", synth.block_seconds}};
  j["threads"] = threads;
  j["data_dir"] = data_dir;
  j["out_dir"] = out_dir;
  return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  PipelineConfig c;
  c.merge_json(text);
  return c;
}

void PipelineConfig::merge_json(const std::string& text) {
  apply_json(parse(text), *this);
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace wearfuse
