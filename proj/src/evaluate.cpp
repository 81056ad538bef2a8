#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"
#include "pipeline_internal.hpp"
#include "wearfuse/error.hpp"
#include "wearfuse/rng.hpp"
#include "wearfuse/synth.hpp"

namespace wearfuse {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered = nlohmann::ordered_json;

std::array<double, 3> Tally::percentages() const {
  const double n = static_cast<double>(total());
  if (n == 0.0) return {0.0, 0.0, 0.0};
  return {100.0 * static_cast<double>(d_gt_f) / n, 100.0 * static_cast<double>(d_eq_f) / n,
          100.0 * static_cast<double>(d_lt_f) / n};
}

const TeamResult& EvalReport::team(const Team& t) const {
  for (const auto& r : teams) {
    if (r.team == t) return r;
  }
  fail(ErrorCode::MissingModality, "team " + t.name() + " not in report");
}

namespace {

struct Outcome {
  std::string subject;
  int truth = 0;
  int predicted = 0;
};

Score score(const std::vector<Outcome>& outcomes) {
  Score s;
  std::vector<int> pred, truth;
  std::map<std::string, std::pair<std::size_t, std::size_t>> per;  // correct, total
  for (const auto& o : outcomes) {
    pred.push_back(o.predicted);
    truth.push_back(o.truth);
    auto& [c, n] = per[o.subject];
    c += o.predicted == o.truth;
    ++n;
    ++s.confusion[static_cast<std::size_t>(o.truth)][static_cast<std::size_t>(o.predicted)];
  }
  if (!outcomes.empty()) {
    s.accuracy = accuracy(pred, truth);
    s.macro_f1 = macro_f1(pred, truth);
  }
  for (const auto& [subject, cn] : per) {
    s.by_subject[subject] = static_cast<double>(cn.first) / static_cast<double>(cn.second);
  }
  return s;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

void tally(Tally& t, double d, double f) {
  if (d > f) {
    ++t.d_gt_f;
  } else if (d == f) {
    ++t.d_eq_f;
  } else {
    ++t.d_lt_f;
  }
}

ordered dist_json(const ClassDistribution& p) { return ordered(std::vector<double>(p.begin(), p.end())); }

// White noise with the original stream's mean and std, per test subject.
std::map<detail::WindowKey, std::vector<double>> corrupted_rows(const PipelineConfig& config, Modality sensor,
                                                                const std::vector<std::string>& subjects) {
  if (config.data_dir.empty()) {
    fail(ErrorCode::Validation, "config field 'data_dir': needed to re-extract the corrupted sensor");
  }
  std::map<detail::WindowKey, std::vector<double>> out;
  const std::array<Modality, 1> only{sensor};
  for (const auto& subject : subjects) {
    auto data = read_subject(fs::path(config.data_dir) / subject, only);
    auto record = data.signals.at(sensor);
    double mean = 0.0, var = 0.0;
    for (double v : record.samples) mean += v;
    mean /= static_cast<double>(record.samples.size());
    for (double v : record.samples) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / static_cast<double>(record.samples.size()));
    if (!(sd > 0.0)) sd = 1.0;
    std::mt19937_64 rng(derive_seed(config.seed, "corrupt/" + subject + "/" + std::string(to_string(sensor))));
    std::normal_distribution<double> noise(mean, sd);
    for (auto& v : record.samples) v = noise(rng);
    for (auto& row : extract_record(record, data.labels, config)) {
      out[{row.subject, row.k}] = std::move(row.values);
    }
  }
  return out;
}

}  // namespace

EvalReport run_evaluate(const PipelineConfig& config, const FeatureStore& features, const ModelStore& models,
                        const std::optional<fs::path>& audit_path, const Logger& log) {
  config.validate();
  if (models.sensors != config.sensors) fail(ErrorCode::DimensionMismatch, "model store sensors differ from config");
  if (models.folds.empty()) fail(ErrorCode::InsufficientData, "model store has no folds");

  EvalReport report;
  report.config = config;
  const auto index = detail::index_rows(features.rows);
  const auto teams = enumerate_teams(config.sensors);

  std::ofstream audit;
  if (audit_path) {
    if (audit_path->has_parent_path()) fs::create_directories(audit_path->parent_path());
    audit.open(*audit_path, std::ios::binary);
    if (!audit) fail(ErrorCode::Io, "cannot write " + audit_path->string());
  }

  std::vector<std::vector<Outcome>> decision(teams.size()), feature(teams.size());
  std::map<Modality, double> f1_sum;
  struct CorruptCounts {
    std::size_t total = 0, decision_clean = 0, decision_corrupt = 0, feature_clean = 0, feature_corrupt = 0;
  };
  std::vector<CorruptCounts> corrupt(config.corrupt_sensors.size());

  for (std::size_t f = 0; f < models.folds.size(); ++f) {
    const auto& fold = models.folds[f];
    fold.split.assert_disjoint();
    report.folds.push_back(fold.split);
    for (auto m : config.sensors) f1_sum[m] += fold.sensor(m).model.f1;

    std::vector<const std::pair<const detail::WindowKey, detail::WindowEntry>*> windows;
    for (const auto& kv : index) {
      if (fold.split.role_of(kv.first.subject) == SplitRole::Test && kv.second.covers(config.sensors)) {
        windows.push_back(&kv);
      }
    }
    report.test_windows += windows.size();

    for (const auto* kv : windows) {
      const auto& [key, entry] = *kv;
      const int truth = static_cast<int>(entry.label);
      std::map<Modality, SspOutput> ssp;
      for (auto m : config.sensors) {
        const auto& ck = fold.sensor(m);
        ssp[m] = SspOutput{m, ck.predict(entry.rows.at(m)->values), ck.model.f1};
      }
      for (std::size_t t = 0; t < teams.size(); ++t) {
        const auto& members = teams[t].members;
        std::vector<SspOutput> outs;
        for (auto m : members) outs.push_back(ssp.at(m));
        auto fused = fuse(outs);
        const int d = argmax(fused.p);
        const int fl = members.size() == 1 ? argmax(outs[0].p)
                                           : argmax(fold.team(teams[t]).predict(detail::concat(entry, members)));
        decision[t].push_back({key.subject, truth, d});
        feature[t].push_back({key.subject, truth, fl});
        if (audit.is_open()) {
          ordered rec;
          rec["fold"] = f;
          rec["subject"] = key.subject;
          rec["window_k"] = key.k;
          rec["team"] = teams[t].name();
          ordered ids = ordered::array(), ps = ordered::array(), f1s = ordered::array();
          for (const auto& o : outs) {
            ids.push_back(std::string(to_string(o.sensor)));
            ps.push_back(dist_json(o.p));
            f1s.push_back(o.f1);
          }
          rec["members"] = ids;
          rec["p"] = ps;
          rec["entropy"] = fused.entropies;
          rec["f1"] = f1s;
          rec["weights"] = fused.weights;
          rec["gamma"] = fused.gamma;
          rec["p_team"] = dist_json(fused.p);
          rec["fallback"] = fused.fallback;
          rec["label"] = std::string(to_string(entry.label));
          rec["predicted"] = std::string(to_string(static_cast<AffectClass>(d)));
          audit << rec.dump() << '\n';
        }
      }
    }

    const auto& full = teams.back().members;
    const auto& full_model = full.size() == 1 ? fold.sensor(full[0]) : fold.team(teams.back());
    for (std::size_t c = 0; c < config.corrupt_sensors.size(); ++c) {
      const Modality bad = config.corrupt_sensors[c];
      const auto noisy = corrupted_rows(config, bad, fold.split.test);
      for (const auto* kv : windows) {
        const auto& [key, entry] = *kv;
        auto it = noisy.find(key);
        if (it == noisy.end()) continue;
        const int truth = static_cast<int>(entry.label);
        std::vector<SspOutput> clean, dirty;
        std::vector<double> x_dirty;
        for (auto m : full) {
          const auto& ck = fold.sensor(m);
          const auto& raw = m == bad ? it->second : entry.rows.at(m)->values;
          clean.push_back({m, ck.predict(entry.rows.at(m)->values), ck.model.f1});
          dirty.push_back({m, ck.predict(raw), ck.model.f1});
          x_dirty.insert(x_dirty.end(), raw.begin(), raw.end());
        }
        auto& n = corrupt[c];
        ++n.total;
        n.decision_clean += argmax(fuse(clean).p) == truth;
        n.decision_corrupt += argmax(fuse(dirty).p) == truth;
        n.feature_clean += argmax(full_model.predict(detail::concat(entry, full))) == truth;
        n.feature_corrupt += argmax(full_model.predict(x_dirty)) == truth;
      }
    }
  }

  for (std::size_t t = 0; t < teams.size(); ++t) {
    report.teams.push_back({teams[t], score(decision[t]), score(feature[t])});
  }
  for (auto m : config.sensors) {
    report.sensors.push_back({m, f1_sum[m] / static_cast<double>(models.folds.size()),
                              report.team(Team{{m}}).decision.accuracy});
  }
  for (std::size_t size = 1; size <= config.sensors.size(); ++size) {
    std::vector<double> d, fl;
    for (const auto& r : report.teams) {
      if (r.team.members.size() != size) continue;
      d.push_back(r.decision.accuracy);
      fl.push_back(r.feature.accuracy);
    }
    SizeSummary s;
    s.size = size;
    s.teams = d.size();
    std::tie(s.mean_decision, s.std_decision) = mean_std(d);
    std::tie(s.mean_feature, s.std_feature) = mean_std(fl);
    report.per_size.push_back(s);
  }
  for (const auto& r : report.teams) {
    tally(report.per_team, r.decision.accuracy, r.feature.accuracy);
    for (const auto& [subject, acc] : r.decision.by_subject) tally(report.cases, acc, r.feature.by_subject.at(subject));
  }
  for (std::size_t c = 0; c < corrupt.size(); ++c) {
    const auto& n = corrupt[c];
    if (n.total == 0) fail(ErrorCode::InsufficientData, "no test windows for the corruption scenario");
    const double total = static_cast<double>(n.total);
    report.corruption.push_back({config.corrupt_sensors[c], static_cast<double>(n.decision_clean) / total,
                                 static_cast<double>(n.decision_corrupt) / total,
                                 static_cast<double>(n.feature_clean) / total,
                                 static_cast<double>(n.feature_corrupt) / total});
  }
  if (log) {
    const auto& full = report.teams.back();
    log("test windows: " + std::to_string(report.test_windows) + ", full team decision " +
        format_double(full.decision.accuracy) + ", feature " + format_double(full.feature.accuracy));
  }
  return report;
}

// ---- report serialization ----

namespace {

ordered score_json(const Score& s) {
  ordered j;
  j["accuracy"] = s.accuracy;
  j["macro_f1"] = s.macro_f1;
  ordered by = ordered::object();
  for (const auto& [k, v] : s.by_subject) by[k] = v;
  j["by_subject"] = by;
  ordered conf = ordered::array();
  for (const auto& row : s.confusion) conf.push_back(std::vector<std::size_t>(row.begin(), row.end()));
  j["confusion"] = conf;
  return j;
}

Score score_from(const json& j) {
  Score s;
  s.accuracy = j.at("accuracy").get<double>();
  s.macro_f1 = j.at("macro_f1").get<double>();
  for (const auto& [k, v] : j.at("by_subject").items()) s.by_subject[k] = v.get<double>();
  const auto& conf = j.at("confusion");
  if (conf.size() != kNumClasses) fail(ErrorCode::Ingestion, "report confusion matrix must be 3x3");
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    auto row = conf[r].get<std::vector<std::size_t>>();
    if (row.size() != kNumClasses) fail(ErrorCode::Ingestion, "report confusion matrix must be 3x3");
    std::copy(row.begin(), row.end(), s.confusion[r].begin());
  }
  return s;
}

ordered tally_json(const Tally& t) {
  auto pct = t.percentages();
  return {{"d_gt_f", t.d_gt_f},   {"d_eq_f", t.d_eq_f}, {"d_lt_f", t.d_lt_f},
          {"pct_d_gt_f", pct[0]}, {"pct_d_eq_f", pct[1]}, {"pct_d_lt_f", pct[2]}};
}

Tally tally_from(const json& j) {
  return {j.at("d_gt_f").get<std::size_t>(), j.at("d_eq_f").get<std::size_t>(), j.at("d_lt_f").get<std::size_t>()};
}

Modality modality_from(const json& j) {
  auto m = parse_modality(j.get<std::string>());
  if (!m) fail(ErrorCode::Ingestion, "report names an unknown modality");
  return *m;
}

}  // namespace

std::pair<double, double> EvalReport::mean_drops() const {
  if (corruption.empty()) return {0.0, 0.0};
  double d = 0.0, f = 0.0;
  for (const auto& c : corruption) {
    d += c.decision_drop();
    f += c.feature_drop();
  }
  const double n = static_cast<double>(corruption.size());
  return {d / n, f / n};
}

std::string EvalReport::to_json() const {
  ordered j;
  j["config"] = ordered::parse(config.to_json());
  j["protocol"] = config.split.loso ? "loso" : "split";
  j["case_definition"] = kCaseDefinition;
  j["folds"] = ordered::array();
  for (const auto& s : folds) j["folds"].push_back({{"train", s.train}, {"val", s.val}, {"test", s.test}});
  j["test_windows"] = test_windows;
  j["sensors"] = ordered::array();
  for (const auto& s : sensors) {
    j["sensors"].push_back(
        {{"sensor", std::string(to_string(s.sensor))}, {"val_f1", s.val_f1}, {"test_accuracy", s.test_accuracy}});
  }
  j["teams"] = ordered::array();
  for (const auto& t : teams) {
    ordered names = ordered::array();
    for (auto m : t.team.members) names.push_back(std::string(to_string(m)));
    j["teams"].push_back({{"name", t.team.name()},
                          {"size", t.team.members.size()},
                          {"members", names},
                          {"decision", score_json(t.decision)},
                          {"feature", score_json(t.feature)}});
  }
  j["per_size"] = ordered::array();
  for (const auto& s : per_size) {
    j["per_size"].push_back({{"size", s.size},
                             {"teams", s.teams},
                             {"mean_decision", s.mean_decision},
                             {"std_decision", s.std_decision},
                             {"mean_feature", s.mean_feature},
                             {"std_feature", s.std_feature}});
  }
  j["comparison"] = {{"cases", tally_json(cases)}, {"teams", tally_json(per_team)}};
  j["corruption"] = ordered::array();
  for (const auto& c : corruption) {
    j["corruption"].push_back({{"sensor", std::string(to_string(c.sensor))},
                       {"decision_clean", c.decision_clean},
                       {"decision_corrupt", c.decision_corrupt},
                       {"decision_drop", c.decision_drop()},
                       {"feature_clean", c.feature_clean},
                       {"feature_corrupt", c.feature_corrupt},
                       {"feature_drop", c.feature_drop()}});
  }
  if (!corruption.empty()) {
    auto [d, f] = mean_drops();
    j["corruption_mean"] = {{"decision_drop", d}, {"feature_drop", f}};
  }
  return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
  EvalReport r;
  try {
    auto j = json::parse(text);
    r.config = PipelineConfig::from_json(j.at("config").dump());
    for (const auto& s : j.at("folds")) {
      r.folds.push_back({s.at("train").get<std::vector<std::string>>(), s.at("val").get<std::vector<std::string>>(),
                         s.at("test").get<std::vector<std::string>>()});
    }
    r.test_windows = j.at("test_windows").get<std::size_t>();
    for (const auto& s : j.at("sensors")) {
      r.sensors.push_back({modality_from(s.at("sensor")), s.at("val_f1").get<double>(),
                           s.at("test_accuracy").get<double>()});
    }
    for (const auto& t : j.at("teams")) {
      TeamResult tr;
      for (const auto& m : t.at("members")) tr.team.members.push_back(modality_from(m));
      tr.decision = score_from(t.at("decision"));
      tr.feature = score_from(t.at("feature"));
      r.teams.push_back(std::move(tr));
    }
    for (const auto& s : j.at("per_size")) {
      r.per_size.push_back({s.at("size").get<std::size_t>(), s.at("teams").get<std::size_t>(),
                            s.at("mean_decision").get<double>(), s.at("std_decision").get<double>(),
                            s.at("mean_feature").get<double>(), s.at("std_feature").get<double>()});
    }
    r.cases = tally_from(j.at("comparison").at("cases"));
    r.per_team = tally_from(j.at("comparison").at("teams"));
    for (const auto& c : j.at("corruption")) {
      r.corruption.push_back(CorruptionResult{modality_from(c.at("sensor")), c.at("decision_clean").get<double>(),
                                      c.at("decision_corrupt").get<double>(), c.at("feature_clean").get<double>(),
                                      c.at("feature_corrupt").get<double>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Ingestion, std::string("malformed report: ") + e.what());
  }
  return r;
}

void emit_report(const EvalReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + (dir / "report.json").string());
    out << report.to_json() << '\n';
    if (!out) fail(ErrorCode::Io, "write failed for " + (dir / "report.json").string());
  }
  std::ofstream out(dir / "per_size.csv", std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + (dir / "per_size.csv").string());
  out << "size,mean_decision,std_decision,mean_feature,std_feature\n";
  for (const auto& s : report.per_size) {
    out << s.size << ',' << format_double(s.mean_decision) << ',' << format_double(s.std_decision) << ','
        << format_double(s.mean_feature) << ',' << format_double(s.std_feature) << '\n';
  }
  if (!out) fail(ErrorCode::Io, "write failed for " + (dir / "per_size.csv").string());
}

EvalReport run_all(const PipelineConfig& input, const Logger& log) {
  PipelineConfig config = input;
  config.validate();
  if (config.out_dir.empty()) fail(ErrorCode::Validation, "config field 'out_dir': required");
  const fs::path out = config.out_dir;
  if (config.data_dir.empty()) {
    config.data_dir = (out / "data").string();
    if (log) log("generating " + std::to_string(config.synth.subjects) + " synthetic subjects in " + config.data_dir);
    generate_synthetic(config, config.data_dir);
  }
  run_extract(config, log).save(out);
  run_train(config, FeatureStore::load(out), log).save(out);
  auto report = run_evaluate(config, FeatureStore::load(out), ModelStore::load(out), out / "fusion_audit.jsonl", log);
  emit_report(report, out);
  return report;
}

}  // namespace wearfuse
