#ifndef WEARFUSE_H
#define WEARFUSE_H

#include <stddef.h>

#if defined(_WIN32)
#  ifdef WEARFUSE_BUILDING
#    define WF_API __declspec(dllexport)
#  else
#    define WF_API __declspec(dllimport)
#  endif
#else
#  define WF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wf_status {
  WF_OK = 0,
  WF_ERR_VALIDATION = 1,        /* bad configuration value */
  WF_ERR_INVALID_ARGUMENT = 2,  /* bad call argument or numeric precondition */
  WF_ERR_INGESTION = 3,         /* malformed input file; message names file:line */
  WF_ERR_IO = 4,
  WF_ERR_INSUFFICIENT_DATA = 5,
  WF_ERR_MISSING_MODALITY = 6,
  WF_ERR_INTERNAL = 7
} wf_status;

typedef struct wf_pipeline wf_pipeline;

typedef void (*wf_log_fn)(const char* message, void* user);

WF_API const char* wf_version(void);
WF_API const char* wf_status_name(wf_status status);
/* Message of the last failed call on this thread; "" if none. */
WF_API const char* wf_last_error(void);
WF_API void wf_string_free(char* s);

/* config_json may be NULL (defaults). Keys absent from the JSON keep their defaults. */
WF_API wf_status wf_pipeline_create(const char* config_json, wf_pipeline** out);
WF_API void wf_pipeline_destroy(wf_pipeline* p);
WF_API wf_status wf_pipeline_load_config(wf_pipeline* p, const char* path);
/* Applies the keys present in json_patch; the result is validated. */
WF_API wf_status wf_pipeline_update_config(wf_pipeline* p, const char* json_patch);
WF_API wf_status wf_pipeline_config_json(const wf_pipeline* p, char** out);
WF_API wf_status wf_pipeline_set_log(wf_pipeline* p, wf_log_fn fn, void* user);

/* Stages. Data lives under data_dir, artifacts under out_dir. */
WF_API wf_status wf_synth(wf_pipeline* p);    /* data_dir (or out_dir/data) */
WF_API wf_status wf_extract(wf_pipeline* p);  /* features.csv, extract_log.json */
WF_API wf_status wf_train(wf_pipeline* p);    /* models/ */
WF_API wf_status wf_evaluate(wf_pipeline* p); /* evaluation.json, fusion_audit.jsonl */
WF_API wf_status wf_report(wf_pipeline* p);   /* report.json, per_size.csv */
WF_API wf_status wf_run_all(wf_pipeline* p);
/* JSON of the last evaluation run or loaded by this handle. */
WF_API wf_status wf_pipeline_report_json(const wf_pipeline* p, char** out);

/* One-column CSV (header "value") to a CSV with one column per mode. */
WF_API wf_status wf_decompose_csv(const char* in_csv, double fs, size_t max_modes, const char* out_csv,
                                  size_t* modes_out);

/* Numerics. Output buffers are caller-owned. */
WF_API wf_status wf_j0_roots(size_t count, double* out);
WF_API wf_status wf_fbse_forward(const double* y, size_t n, double fs, double* coeffs_out);
WF_API wf_status wf_fbse_inverse(const double* coeffs, size_t n, double* y_out);
/* probs: members x 3 row-major. weights_out (members) and fallback_out may be NULL. */
WF_API wf_status wf_fuse(size_t members, const double* probs, const double* f1, double* p_out,
                         double* weights_out, int* fallback_out);

#ifdef __cplusplus
}
#endif

#endif
