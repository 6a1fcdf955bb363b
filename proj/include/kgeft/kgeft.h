#ifndef KGEFT_KGEFT_H
#define KGEFT_KGEFT_H

#include <stddef.h>

#if defined(KGEFT_BUILDING_LIBRARY)
#define KGEFT_API __attribute__((visibility("default")))
#else
#define KGEFT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes. Every function returning int returns one of these. */
enum kgeft_status {
  KGEFT_OK = 0,
  KGEFT_INVALID_ARGUMENT = 1,
  KGEFT_GRID_MISMATCH = 2,
  KGEFT_UNSUPPORTED_WEIGHT = 3,
  KGEFT_CAUSALITY_BUDGET_EXCEEDED = 4,
  KGEFT_QUADRATURE_FAILURE = 5,
  KGEFT_STEP_REJECTED = 6,
  KGEFT_MINIMIZATION_FAILED = 7,
  KGEFT_SUPPORT_SAMPLING_EMPTY = 8,
  KGEFT_STENCIL_OUT_OF_RANGE = 9,
  KGEFT_GRID_TOO_LARGE = 10,
  KGEFT_INVALID_HOLDER_TRIPLE = 11,
  KGEFT_INSUFFICIENT_JET_DEPTH = 12,
  KGEFT_BUDGET_EXCEEDED = 13,
  KGEFT_NON_CONVERGENCE = 14,
  KGEFT_TAIL_FIT_INCONCLUSIVE = 15,
  KGEFT_NOT_CONVERGED = 16,
  KGEFT_CONVENTION_MISMATCH = 17,
  KGEFT_CERTIFICATION_MISSING = 18,
  KGEFT_PARSE_ERROR = 19,
  KGEFT_VALIDATION_ERROR = 20,
  KGEFT_MISSING_ARTIFACT = 21,
  KGEFT_IO_ERROR = 22,
  KGEFT_SWEEP_FAILED = 23,
  KGEFT_INTERNAL = 99
};

typedef struct kgeft_config kgeft_config;
typedef struct kgeft_manifest kgeft_manifest;

/* Message of the last failure on the calling thread ("" if none). */
KGEFT_API const char* kgeft_last_error(void);
KGEFT_API const char* kgeft_status_name(int status);
KGEFT_API const char* kgeft_version(void);

/* Configurations. A new config carries the desk-scale defaults. */
KGEFT_API int kgeft_config_new(kgeft_config** out);
KGEFT_API int kgeft_config_parse_file(const char* path, kgeft_config** out);
KGEFT_API int kgeft_config_parse_text(const char* text, kgeft_config** out);
KGEFT_API int kgeft_config_set(kgeft_config* cfg, const char* section, const char* key, const char* value);
/* Copies the serialized config into buf (NUL-terminated) if it fits; *needed gets the full size incl. NUL. */
KGEFT_API int kgeft_config_serialize(const kgeft_config* cfg, char* buf, size_t cap, size_t* needed);
/* 16 hex digits plus NUL: buf must hold 17 bytes. */
KGEFT_API int kgeft_config_hash(const kgeft_config* cfg, char* buf, size_t cap);
/* Audit flags and rule checks; returns KGEFT_VALIDATION_ERROR with the rule in kgeft_last_error(). */
KGEFT_API int kgeft_config_validate(const kgeft_config* cfg, char* audit_buf, size_t cap, size_t* needed);
KGEFT_API void kgeft_config_free(kgeft_config* cfg);

/* Runs the configured pipeline. output_root may be NULL (environment or default). */
KGEFT_API int kgeft_dispatch(const kgeft_config* cfg, const char* output_root, kgeft_manifest** out);
KGEFT_API int kgeft_manifest_load(const char* path, kgeft_manifest** out);
KGEFT_API int kgeft_manifest_passed(const kgeft_manifest* m, int* passed);
KGEFT_API int kgeft_manifest_run_dir(const kgeft_manifest* m, char* buf, size_t cap, size_t* needed);
KGEFT_API int kgeft_manifest_json(const kgeft_manifest* m, char* buf, size_t cap, size_t* needed);
/* figure: "decay_curves", "resonance_sheets" or "sweep_slopes". */
KGEFT_API int kgeft_emit_plot_data(kgeft_manifest* m, const char* figure);
KGEFT_API void kgeft_manifest_free(kgeft_manifest* m);

#ifdef __cplusplus
}
#endif

#endif
