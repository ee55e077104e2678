/* erblox: entity-resolution engine.
 *
 * Rule-driven collective blocking (matching dependencies run to a chase
 * fixpoint), SVM pair classification, and matching-function merge, behind a
 * small C API. Open an engine, load a pipeline config, optionally override
 * seed / output directory / blocking mode, then run stages.
 *
 * Every call returns ERBLOX_OK or an error status; the message for the most
 * recent failure is available via erblox_last_error(). Handles are not
 * thread-safe; use one engine per thread.
 */
#ifndef ERBLOX_H
#define ERBLOX_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct erblox_engine erblox_engine;

typedef enum erblox_status {
  ERBLOX_OK = 0,
  ERBLOX_ERR_ARG = 1,        /* bad argument or unknown name */
  ERBLOX_ERR_IO = 2,         /* file missing or unreadable/unwritable */
  ERBLOX_ERR_PARSE = 3,      /* malformed config, rules, CSV, or model file */
  ERBLOX_ERR_VALIDATION = 4, /* well-formed input violating a semantic rule */
  ERBLOX_ERR_STATE = 5,      /* call out of order (e.g. stage before config) */
} erblox_status;

/* Library version, e.g. "1.0.0". Static storage; never freed. */
const char* erblox_version(void);

/* NULL on allocation failure. Close exactly once; close(NULL) is a no-op. */
erblox_engine* erblox_engine_open(void);
void erblox_engine_close(erblox_engine* engine);

/* Message for the most recent failed call on this engine, or "" if none.
 * Owned by the engine; valid until the next call on it. */
const char* erblox_last_error(const erblox_engine* engine);

/* Parses a pipeline config file; paths inside it resolve relative to it.
 * Resets any previously computed state. */
erblox_status erblox_load_config(erblox_engine* engine, const char* path);

/* Override the config's RNG seed (training shuffles, splits). */
erblox_status erblox_set_seed(erblox_engine* engine, uint64_t seed);

/* Directory for stage artifacts; created on first write. Default ".". */
erblox_status erblox_set_out_dir(erblox_engine* engine, const char* dir);

/* "standard", "md", or "both"; overrides the config. */
erblox_status erblox_set_blocking_mode(erblox_engine* engine, const char* mode);

/* Runs one stage: "ingest", "simcache", "block", "train", "classify",
 * "merge", "evaluate", or "pipeline" (all of them in order). Upstream
 * results are recomputed in memory as needed; only the named stage's
 * artifact files are written. */
erblox_status erblox_run_stage(erblox_engine* engine, const char* stage);

/* Newline-separated paths written by the last successful run_stage, or "".
 * Owned by the engine; valid until the next call on it. */
const char* erblox_last_artifacts(const erblox_engine* engine);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ERBLOX_H */
