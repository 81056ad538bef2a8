// Batch CLI over the C API.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wearfuse/wearfuse.h"

namespace {

int exit_code(wf_status s) {
  if (s == WF_OK) return 0;
  return s == WF_ERR_VALIDATION ? 2 : 1;
}

int report_failure(const char* stage, wf_status s) {
  std::cerr << "wearfuse " << stage << ": " << wf_status_name(s) << ": " << wf_last_error() << '\n';
  return exit_code(s);
}

void log_line(const char* message, void*) { std::cerr << message << '\n'; }

void print_summary(const wf_pipeline* p) {
  char* text = nullptr;
  if (wf_pipeline_report_json(p, &text) != WF_OK) return;
  auto j = nlohmann::json::parse(text);
  wf_string_free(text);
  std::printf("test windows: %zu (%s protocol)\n", j["test_windows"].get<std::size_t>(),
              j["protocol"].get<std::string>().c_str());
  std::printf("%-5s %9s %9s %9s %9s\n", "size", "mean_D", "std_D", "mean_F", "std_F");
  for (const auto& s : j["per_size"]) {
    std::printf("%-5zu %9.4f %9.4f %9.4f %9.4f\n", s["size"].get<std::size_t>(), s["mean_decision"].get<double>(),
                s["std_decision"].get<double>(), s["mean_feature"].get<double>(), s["std_feature"].get<double>());
  }
  for (const char* key : {"cases", "teams"}) {
    const auto& t = j["comparison"][key];
    std::printf("D>F %.2f%%  D=F %.2f%%  D<F %.2f%%  (per %s, n=%zu)\n", t["pct_d_gt_f"].get<double>(),
                t["pct_d_eq_f"].get<double>(), t["pct_d_lt_f"].get<double>(),
                std::string(key) == "cases" ? "(team, test subject)" : "team",
                t["d_gt_f"].get<std::size_t>() + t["d_eq_f"].get<std::size_t>() + t["d_lt_f"].get<std::size_t>());
  }
  for (const auto& c : j["corruption"]) {
    std::printf("noise on %-4s decision drop %.4f, feature drop %.4f\n", c["sensor"].get<std::string>().c_str(),
                c["decision_drop"].get<double>(), c["feature_drop"].get<double>());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wearfuse: FBSE-EWT features, per-sensor MLPs and entropy-weighted decision fusion"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, data_dir, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::string> corrupt;
  bool loso = false, quiet = false;
  app.add_option("--config", config_path, "PipelineConfig JSON file")->check(CLI::ExistingFile);
  app.add_option("--data", data_dir, "ingestion directory (one subdirectory per subject)");
  app.add_option("--out", out_dir, "artifact directory");
  app.add_option("--seed", seed, "root seed");
  app.add_flag("--loso", loso, "leave-one-subject-out instead of the single split");
  app.add_option("--threads", threads, "worker threads (0: all cores)");
  app.add_option("--corrupt", corrupt, "sensors to replace by white noise at evaluation, in turn");
  app.add_flag("-q,--quiet", quiet, "no progress log");

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus to --data (or <out>/data)");
  auto* extract = app.add_subcommand("extract", "window, decompose and featurize --data into <out>/features.csv");
  auto* train = app.add_subcommand("train", "train sensor and team models into <out>/models");
  auto* evaluate = app.add_subcommand("evaluate", "score every team on the test subjects");
  auto* report = app.add_subcommand("report", "emit report.json and per_size.csv from <out>/evaluation.json");
  auto* all = app.add_subcommand("all", "extract, train, evaluate and report (synthesizes data without --data)");
  auto* decompose = app.add_subcommand("decompose", "split a one-column signal CSV into mode columns");
  std::string in_csv, out_csv;
  double fs = 0.0;
  std::size_t modes = 5;
  decompose->add_option("--input", in_csv, "CSV with header 'value'")->required()->check(CLI::ExistingFile);
  decompose->add_option("--fs", fs, "sampling rate in Hz")->required();
  decompose->add_option("--modes", modes, "maximum number of modes");
  decompose->add_option("--output", out_csv, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (decompose->parsed()) {
    std::size_t found = 0;
    wf_status s = wf_decompose_csv(in_csv.c_str(), fs, modes, out_csv.c_str(), &found);
    if (s != WF_OK) return report_failure("decompose", s);
    if (!quiet) std::cerr << found << " modes written to " << out_csv << '\n';
    return 0;
  }

  wf_pipeline* p = nullptr;
  wf_status s = wf_pipeline_create(nullptr, &p);
  if (s != WF_OK) return report_failure("config", s);
  auto finish = [&](int rc) {
    wf_pipeline_destroy(p);
    return rc;
  };
  if (!config_path.empty() && (s = wf_pipeline_load_config(p, config_path.c_str())) != WF_OK) {
    return finish(report_failure("config", s));
  }
  nlohmann::json patch = nlohmann::json::object();
  if (!data_dir.empty()) patch["data_dir"] = data_dir;
  if (!out_dir.empty()) patch["out_dir"] = out_dir;
  if (seed) patch["seed"] = *seed;
  if (threads) patch["threads"] = *threads;
  if (loso) patch["split"] = {{"loso", true}};
  if (!corrupt.empty()) patch["corrupt_sensors"] = corrupt;
  if ((s = wf_pipeline_update_config(p, patch.dump().c_str())) != WF_OK) return finish(report_failure("config", s));
  if (!quiet) wf_pipeline_set_log(p, log_line, nullptr);

  struct Stage {
    CLI::App* cmd;
    const char* name;
    wf_status (*run)(wf_pipeline*);
    bool summary;
  };
  const Stage stages[] = {{synth, "synth", wf_synth, false},          {extract, "extract", wf_extract, false},
                          {train, "train", wf_train, false},          {evaluate, "evaluate", wf_evaluate, true},
                          {report, "report", wf_report, true},        {all, "all", wf_run_all, true}};
  for (const auto& stage : stages) {
    if (!stage.cmd->parsed()) continue;
    if ((s = stage.run(p)) != WF_OK) return finish(report_failure(stage.name, s));
    if (stage.summary) print_summary(p);
  }
  return finish(0);
}
