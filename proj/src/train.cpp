#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pipeline_internal.hpp"
#include "wearfuse/error.hpp"
#include "wearfuse/parallel.hpp"
#include "wearfuse/rng.hpp"

namespace wearfuse {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered = nlohmann::ordered_json;

// ---- splits ----

SplitRole SubjectSplit::role_of(const std::string& subject) const {
  auto has = [&](const std::vector<std::string>& v) { return std::find(v.begin(), v.end(), subject) != v.end(); };
  if (has(train)) return SplitRole::Train;
  if (has(val)) return SplitRole::Val;
  if (has(test)) return SplitRole::Test;
  return SplitRole::None;
}

void SubjectSplit::assert_disjoint() const {
  std::set<std::string> seen;
  for (const auto* part : {&train, &val, &test}) {
    for (const auto& s : *part) {
      if (!seen.insert(s).second) throw std::logic_error("subject " + s + " assigned to two splits");
    }
  }
}

std::vector<SubjectSplit> make_splits(std::vector<std::string> subjects, const SplitConfig& split,
                                      std::uint64_t seed) {
  std::sort(subjects.begin(), subjects.end());
  subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
  const std::size_t n = subjects.size();
  std::vector<SubjectSplit> folds;
  if (!split.loso) {
    std::mt19937_64 rng(derive_seed(seed, "split"));
    std::shuffle(subjects.begin(), subjects.end(), rng);
    // round half to even: 0.7 * 15 = 10.5 -> 10
    auto n_train = static_cast<std::size_t>(std::nearbyint(split.train * static_cast<double>(n)));
    auto n_val = static_cast<std::size_t>(std::nearbyint(split.val * static_cast<double>(n)));
    if (n_train < 1 || n_val < 1 || n_train + n_val >= n) {
      fail(ErrorCode::InsufficientData, std::to_string(n) + " subjects cannot fill train/val/test");
    }
    SubjectSplit s;
    s.train.assign(subjects.begin(), subjects.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(subjects.begin() + static_cast<std::ptrdiff_t>(n_train),
                 subjects.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(subjects.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), subjects.end());
    for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
    s.assert_disjoint();
    folds.push_back(std::move(s));
    return folds;
  }
  if (n < 3) fail(ErrorCode::InsufficientData, "leave-one-subject-out needs at least 3 subjects");
  auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::nearbyint(split.val * static_cast<double>(n))));
  n_val = std::min(n_val, n - 2);
  for (const auto& held : subjects) {
    std::vector<std::string> rest;
    for (const auto& s : subjects) {
      if (s != held) rest.push_back(s);
    }
    std::mt19937_64 rng(derive_seed(seed, "split/loso/" + held));
    std::shuffle(rest.begin(), rest.end(), rng);
    SubjectSplit s;
    s.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
    s.train.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val), rest.end());
    s.test = {held};
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    s.assert_disjoint();
    folds.push_back(std::move(s));
  }
  return folds;
}

// ---- checkpoints ----

ClassDistribution Checkpoint::predict(std::span<const double> raw) const {
  auto x = norm.apply(raw);
  return model.net.predict_proba(x);
}

std::string Checkpoint::to_json() const {
  ordered j;
  j["name"] = name;
  ordered names = ordered::array();
  for (auto m : members) names.push_back(std::string(to_string(m)));
  j["members"] = names;
  const auto& net = model.net;
  j["shape"] = net.shape();
  ordered layers = ordered::array();
  auto params = net.parameters();
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    auto w0 = net.weight_offset(l);
    auto b0 = net.bias_offset(l);
    auto out = net.shape()[l + 1];
    layers.push_back({{"weights", std::vector<double>(params.begin() + static_cast<std::ptrdiff_t>(w0),
                                                      params.begin() + static_cast<std::ptrdiff_t>(b0))},
                      {"bias", std::vector<double>(params.begin() + static_cast<std::ptrdiff_t>(b0),
                                                   params.begin() + static_cast<std::ptrdiff_t>(b0 + out))}});
  }
  j["layers"] = layers;
  const auto& h = model.hyper;
  j["hyper"] = {{"hidden", h.hidden},         {"learning_rate", h.learning_rate}, {"l2", h.l2},
                {"dropout", h.dropout},       {"batch_size", h.batch_size},       {"max_epochs", h.max_epochs},
                {"patience", h.patience}};
  j["seed"] = seed;
  j["f1"] = model.f1;
  j["val_accuracy"] = model.val_accuracy;
  j["best_epoch"] = model.best_epoch;
  j["normalization"] = {{"mean", norm.mean}, {"scale", norm.scale}};
  return j.dump(2);
}

Checkpoint Checkpoint::from_json(const std::string& text) {
  Checkpoint c;
  try {
    auto j = json::parse(text);
    c.name = j.at("name").get<std::string>();
    for (const auto& m : j.at("members")) {
      auto parsed = parse_modality(m.get<std::string>());
      if (!parsed) fail(ErrorCode::Ingestion, "checkpoint " + c.name + ": unknown modality");
      c.members.push_back(*parsed);
    }
    auto shape = j.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() < 2) fail(ErrorCode::Ingestion, "checkpoint " + c.name + ": bad shape");
    std::vector<std::size_t> hidden(shape.begin() + 1, shape.end() - 1);
    c.model.net = Mlp(shape.front(), hidden, shape.back());
    auto params = c.model.net.parameters();
    const auto& layers = j.at("layers");
    if (layers.size() != shape.size() - 1) fail(ErrorCode::Ingestion, "checkpoint " + c.name + ": layer count");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      auto w = layers[l].at("weights").get<std::vector<double>>();
      auto b = layers[l].at("bias").get<std::vector<double>>();
      if (w.size() != shape[l] * shape[l + 1] || b.size() != shape[l + 1]) {
        fail(ErrorCode::Ingestion, "checkpoint " + c.name + ": layer " + std::to_string(l) + " size");
      }
      std::copy(w.begin(), w.end(), params.begin() + static_cast<std::ptrdiff_t>(c.model.net.weight_offset(l)));
      std::copy(b.begin(), b.end(), params.begin() + static_cast<std::ptrdiff_t>(c.model.net.bias_offset(l)));
    }
    const auto& h = j.at("hyper");
    auto& hy = c.model.hyper;
    hy.hidden = h.at("hidden").get<std::vector<std::size_t>>();
    hy.learning_rate = h.at("learning_rate").get<double>();
    hy.l2 = h.at("l2").get<double>();
    hy.dropout = h.at("dropout").get<double>();
    hy.batch_size = h.at("batch_size").get<std::size_t>();
    hy.max_epochs = h.at("max_epochs").get<std::size_t>();
    hy.patience = h.at("patience").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    hy.seed = c.seed;
    c.model.f1 = j.at("f1").get<double>();
    c.model.val_accuracy = j.at("val_accuracy").get<double>();
    c.model.best_epoch = j.at("best_epoch").get<std::size_t>();
    c.norm.mean = j.at("normalization").at("mean").get<std::vector<double>>();
    c.norm.scale = j.at("normalization").at("scale").get<std::vector<double>>();
    if (c.norm.mean.size() != shape.front() || c.norm.scale.size() != shape.front()) {
      fail(ErrorCode::Ingestion, "checkpoint " + c.name + ": normalization size");
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Ingestion, std::string("malformed checkpoint: ") + e.what());
  }
  return c;
}

const Checkpoint& FoldModels::sensor(Modality m) const {
  for (const auto& c : sensors) {
    if (c.members.size() == 1 && c.members[0] == m) return c;
  }
  fail(ErrorCode::MissingModality, "no model for sensor " + std::string(to_string(m)));
}

const Checkpoint& FoldModels::team(const Team& t) const {
  if (t.members.size() == 1) return sensor(t.members[0]);
  for (const auto& c : teams) {
    if (c.members == t.members) return c;
  }
  fail(ErrorCode::MissingModality, "no feature-level model for team " + t.name());
}

namespace {

ordered split_json(const SubjectSplit& s) { return {{"train", s.train}, {"val", s.val}, {"test", s.test}}; }

SubjectSplit split_from(const json& j) {
  SubjectSplit s;
  s.train = j.at("train").get<std::vector<std::string>>();
  s.val = j.at("val").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

std::string fold_dir(std::size_t f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fold_%02zu", f);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text << '\n';
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

void ModelStore::save(const fs::path& dir) const {
  const auto root = dir / "models";
  fs::create_directories(root);
  ordered manifest;
  ordered names = ordered::array();
  for (auto m : sensors) names.push_back(std::string(to_string(m)));
  manifest["sensors"] = names;
  manifest["folds"] = ordered::array();
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    fs::create_directories(root / fold_dir(f));
    ordered entry = split_json(fold.split);
    entry["dir"] = fold_dir(f);
    entry["models"] = ordered::array();
    for (const auto* group : {&fold.sensors, &fold.teams}) {
      for (const auto& c : *group) {
        write_text(root / fold_dir(f) / (c.name + ".json"), c.to_json());
        entry["models"].push_back(c.name);
      }
    }
    manifest["folds"].push_back(entry);
  }
  write_text(root / "manifest.json", manifest.dump(2));
}

ModelStore ModelStore::load(const fs::path& dir) {
  const auto root = dir / "models";
  ModelStore store;
  json manifest;
  try {
    manifest = json::parse(read_text(root / "manifest.json"));
    for (const auto& m : manifest.at("sensors")) store.sensors.push_back(parse_modality(m.get<std::string>()).value());
    for (const auto& entry : manifest.at("folds")) {
      FoldModels fold;
      fold.split = split_from(entry);
      const auto sub = root / entry.at("dir").get<std::string>();
      for (const auto& name : entry.at("models")) {
        auto c = Checkpoint::from_json(read_text(sub / (name.get<std::string>() + ".json")));
        (c.members.size() == 1 ? fold.sensors : fold.teams).push_back(std::move(c));
      }
      store.folds.push_back(std::move(fold));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Ingestion, std::string("malformed model manifest: ") + e.what());
  } catch (const std::bad_optional_access&) {
    fail(ErrorCode::Ingestion, "model manifest names an unknown modality");
  }
  return store;
}

// ---- training ----

namespace {

struct Job {
  std::size_t fold = 0;
  std::vector<Modality> members;
  bool sensor = false;
};

Checkpoint train_one(const PipelineConfig& config, const detail::WindowIndex& index,
                     std::span<const FeatureRow> rows, const SubjectSplit& split, std::size_t fold, const Job& job) {
  Checkpoint c;
  c.members = job.members;
  c.name = Team{job.members}.name();
  c.seed = derive_seed(config.seed, "mlp/" + fold_dir(fold) + "/" + c.name);

  LabeledSet train, val;
  auto take = [&](const std::string& subject, std::vector<double> x, AffectClass y) {
    switch (split.role_of(subject)) {
      case SplitRole::Train:
        train.x.push_back(std::move(x));
        train.y.push_back(static_cast<int>(y));
        break;
      case SplitRole::Val:
        val.x.push_back(std::move(x));
        val.y.push_back(static_cast<int>(y));
        break;
      default:
        break;  // test and unassigned rows never reach training
    }
  };
  if (job.sensor) {
    for (const auto& r : rows) {
      if (r.modality == job.members[0]) take(r.subject, r.values, r.label);
    }
  } else {
    for (const auto& [key, entry] : index) {
      if (entry.covers(job.members)) take(key.subject, detail::concat(entry, job.members), entry.label);
    }
  }
  if (train.x.empty() || val.x.empty()) {
    fail(ErrorCode::InsufficientData, c.name + ": no training or validation windows in " + fold_dir(fold));
  }
  c.norm = Standardizer::fit(train.x);
  for (auto* set : {&train, &val}) {
    for (auto& x : set->x) x = c.norm.apply(x);
  }
  MlpHyper hyper = config.mlp;
  hyper.seed = c.seed;
  c.model = train_mlp(train, val, hyper);
  return c;
}

}  // namespace

ModelStore run_train(const PipelineConfig& config, const FeatureStore& features, const Logger& log) {
  config.validate();
  if (features.modes != config.modes) {
    fail(ErrorCode::DimensionMismatch, "feature store has " + std::to_string(features.modes) +
                                           " modes, config expects " + std::to_string(config.modes));
  }
  ModelStore store;
  store.sensors = config.sensors;
  auto splits = make_splits(features.subjects(), config.split, config.seed);
  const auto index = detail::index_rows(features.rows);

  std::vector<Job> jobs;
  for (std::size_t f = 0; f < splits.size(); ++f) {
    for (auto m : config.sensors) jobs.push_back({f, {m}, true});
    for (std::size_t size = 2; size <= config.sensors.size(); ++size) {
      for (auto& t : enumerate_teams(config.sensors, size)) jobs.push_back({f, t.members, false});
    }
  }
  std::vector<Checkpoint> trained(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
    trained[i] = train_one(config, index, features.rows, splits[jobs[i].fold], jobs[i].fold, jobs[i]);
  });

  store.folds.resize(splits.size());
  for (std::size_t f = 0; f < splits.size(); ++f) store.folds[f].split = splits[f];
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& fold = store.folds[jobs[i].fold];
    if (log && jobs[i].sensor) {
      log(fold_dir(jobs[i].fold) + " " + trained[i].name + ": val F1 " + format_double(trained[i].model.f1));
    }
    (jobs[i].sensor ? fold.sensors : fold.teams).push_back(std::move(trained[i]));
  }
  return store;
}

}  // namespace wearfuse
