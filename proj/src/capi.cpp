#include "wearfuse/wearfuse.h"

#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "wearfuse/dataset.hpp"
#include "wearfuse/error.hpp"
#include "wearfuse/fbse.hpp"
#include "wearfuse/bessel.hpp"
#include "wearfuse/pipeline.hpp"
#include "wearfuse/synth.hpp"

using namespace wearfuse;
namespace fs = std::filesystem;

struct wf_pipeline {
  PipelineConfig config;
  std::optional<EvalReport> report;
  wf_log_fn log_fn = nullptr;
  void* log_user = nullptr;

  Logger logger() const {
    if (!log_fn) return {};
    return [fn = log_fn, user = log_user](const std::string& msg) { fn(msg.c_str(), user); };
  }
};

namespace {

thread_local std::string last_error;

wf_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::InvalidSpec:
      return WF_ERR_VALIDATION;
    case ErrorCode::Ingestion:
      return WF_ERR_INGESTION;
    case ErrorCode::Io:
      return WF_ERR_IO;
    case ErrorCode::InsufficientData:
      return WF_ERR_INSUFFICIENT_DATA;
    case ErrorCode::MissingModality:
      return WF_ERR_MISSING_MODALITY;
    default:
      return WF_ERR_INVALID_ARGUMENT;
  }
}

template <class Fn>
wf_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return WF_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return WF_ERR_INTERNAL;
  } catch (const fs::filesystem_error& e) {
    last_error = e.what();
    return WF_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return WF_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return WF_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* name) {
  if (!ptr) fail(ErrorCode::InvalidArgument, std::string(name) + " is NULL");
}

char* dup(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
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
}

const fs::path& out_dir(const wf_pipeline* p, fs::path& storage) {
  if (p->config.out_dir.empty()) fail(ErrorCode::Validation, "config field 'out_dir': required");
  storage = p->config.out_dir;
  return storage;
}

}  // namespace

extern "C" {

const char* wf_version(void) { return "0.1.0"; }

const char* wf_status_name(wf_status status) {
  switch (status) {
    case WF_OK: return "ok";
    case WF_ERR_VALIDATION: return "validation";
    case WF_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case WF_ERR_INGESTION: return "ingestion";
    case WF_ERR_IO: return "io";
    case WF_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case WF_ERR_MISSING_MODALITY: return "missing_modality";
    case WF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* wf_last_error(void) { return last_error.c_str(); }

void wf_string_free(char* s) { std::free(s); }

wf_status wf_pipeline_create(const char* config_json, wf_pipeline** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    PipelineConfig config;
    if (config_json) config = PipelineConfig::from_json(config_json);
    config.validate();
    *out = new wf_pipeline{std::move(config), std::nullopt, nullptr, nullptr};
  });
}

void wf_pipeline_destroy(wf_pipeline* p) { delete p; }

wf_status wf_pipeline_load_config(wf_pipeline* p, const char* path) {
  return guarded([&] {
    require(p, "pipeline");
    require(path, "path");
    auto config = PipelineConfig::load(path);
    config.validate();
    p->config = std::move(config);
  });
}

wf_status wf_pipeline_update_config(wf_pipeline* p, const char* json_patch) {
  return guarded([&] {
    require(p, "pipeline");
    require(json_patch, "json_patch");
    PipelineConfig next = p->config;
    next.merge_json(json_patch);
    next.validate();
    p->config = std::move(next);
  });
}

wf_status wf_pipeline_config_json(const wf_pipeline* p, char** out) {
  return guarded([&] {
    require(p, "pipeline");
    require(out, "out");
    *out = dup(p->config.to_json());
  });
}

wf_status wf_pipeline_set_log(wf_pipeline* p, wf_log_fn fn, void* user) {
  return guarded([&] {
    require(p, "pipeline");
    p->log_fn = fn;
    p->log_user = user;
  });
}

wf_status wf_synth(wf_pipeline* p) {
  return guarded([&] {
    require(p, "pipeline");
    fs::path dir = p->config.data_dir;
    if (dir.empty()) {
      fs::path out;
      dir = out_dir(p, out) / "data";
    }
    auto ids = generate_synthetic(p->config, dir);
    if (p->log_fn) p->logger()("wrote " + std::to_string(ids.size()) + " subjects to " + dir.string());
  });
}

wf_status wf_extract(wf_pipeline* p) {
  return guarded([&] {
    require(p, "pipeline");
    fs::path out;
    run_extract(p->config, p->logger()).save(out_dir(p, out));
  });
}

wf_status wf_train(wf_pipeline* p) {
  return guarded([&] {
    require(p, "pipeline");
    fs::path out;
    const auto& dir = out_dir(p, out);
    run_train(p->config, FeatureStore::load(dir), p->logger()).save(dir);
  });
}

wf_status wf_evaluate(wf_pipeline* p) {
  return guarded([&] {
    require(p, "pipeline");
    fs::path out;
    const auto& dir = out_dir(p, out);
    auto report = run_evaluate(p->config, FeatureStore::load(dir), ModelStore::load(dir), dir / "fusion_audit.jsonl",
                               p->logger());
    write_text(dir / "evaluation.json", report.to_json());
    p->report = std::move(report);
  });
}

wf_status wf_report(wf_pipeline* p) {
  return guarded([&] {
    require(p, "pipeline");
    fs::path out;
    const auto& dir = out_dir(p, out);
    auto report = EvalReport::from_json(read_text(dir / "evaluation.json"));
    emit_report(report, dir);
    p->report = std::move(report);
  });
}

wf_status wf_run_all(wf_pipeline* p) {
  return guarded([&] {
    require(p, "pipeline");
    auto report = run_all(p->config, p->logger());
    write_text(fs::path(p->config.out_dir) / "evaluation.json", report.to_json());
    p->report = std::move(report);
  });
}

wf_status wf_pipeline_report_json(const wf_pipeline* p, char** out) {
  return guarded([&] {
    require(p, "pipeline");
    require(out, "out");
    if (!p->report) fail(ErrorCode::InvalidArgument, "no report yet: run evaluate, report or run_all first");
    *out = dup(p->report->to_json());
  });
}

wf_status wf_decompose_csv(const char* in_csv, double fs, size_t max_modes, const char* out_csv, size_t* modes_out) {
  return guarded([&] {
    require(in_csv, "in_csv");
    require(out_csv, "out_csv");
    auto samples = read_value_csv(in_csv);
    EwtConfig config;
    config.max_modes = max_modes;
    auto modes = decompose(samples, fs, config);
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) fail(ErrorCode::Io, std::string("cannot write ") + out_csv);
    for (std::size_t r = 0; r < modes.modes.size(); ++r) out << (r ? "," : "") << "mode_" << r + 1;
    out << '\n';
    for (std::size_t n = 0; n < samples.size(); ++n) {
      for (std::size_t r = 0; r < modes.modes.size(); ++r) out << (r ? "," : "") << format_double(modes.modes[r][n]);
      out << '\n';
    }
    if (!out) fail(ErrorCode::Io, std::string("write failed for ") + out_csv);
    if (modes_out) *modes_out = modes.modes.size();
  });
}

wf_status wf_j0_roots(size_t count, double* out) {
  return guarded([&] {
    require(out, "out");
    auto roots = j0_roots(count);
    std::copy(roots.roots.begin(), roots.roots.end(), out);
  });
}

wf_status wf_fbse_forward(const double* y, size_t n, double fs, double* coeffs_out) {
  return guarded([&] {
    require(y, "y");
    require(coeffs_out, "coeffs_out");
    auto spectrum = fbse_forward({y, n}, fs);
    std::copy(spectrum.coeffs.begin(), spectrum.coeffs.end(), coeffs_out);
  });
}

wf_status wf_fbse_inverse(const double* coeffs, size_t n, double* y_out) {
  return guarded([&] {
    require(coeffs, "coeffs");
    require(y_out, "y_out");
    FbseSpectrum spectrum{std::vector<double>(coeffs, coeffs + n), 1.0};
    auto y = fbse_inverse(spectrum);
    std::copy(y.begin(), y.end(), y_out);
  });
}

wf_status wf_fuse(size_t members, const double* probs, const double* f1, double* p_out, double* weights_out,
                  int* fallback_out) {
  return guarded([&] {
    require(probs, "probs");
    require(f1, "f1");
    require(p_out, "p_out");
    std::vector<SspOutput> outs(members);
    for (std::size_t i = 0; i < members; ++i) {
      std::copy(probs + i * kNumClasses, probs + (i + 1) * kNumClasses, outs[i].p.begin());
      outs[i].f1 = f1[i];
    }
    auto decision = fuse(outs);
    std::copy(decision.p.begin(), decision.p.end(), p_out);
    if (weights_out) std::copy(decision.weights.begin(), decision.weights.end(), weights_out);
    if (fallback_out) *fallback_out = decision.fallback ? 1 : 0;
  });
}

}  // extern "C"
