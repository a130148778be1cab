#ifndef HISTREC_H
#define HISTREC_H

/*
 * C API of the histrec pipeline library.
 *
 * A pipeline handle is created from a JSON configuration (file or inline
 * document), runs stages over its working directory, and reports results as
 * a status code plus a JSON summary string. Handles are not safe for
 * concurrent use; strings returned for a handle stay valid until the next
 * call on that handle (or until it is closed).
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define HISTREC_API __declspec(dllexport)
#else
#define HISTREC_API __attribute__((visibility("default")))
#endif

typedef struct hr_pipeline hr_pipeline;

typedef enum hr_status {
  HR_OK = 0,
  /* The stage ran, but some items failed; details in the run summary. */
  HR_PARTIAL = 1,
  /* Bad arguments: null pointers, unknown stage or volume name. */
  HR_EINVAL = 2,
  /* Configuration problems, including missing predecessor artifacts. */
  HR_ECONFIG = 3,
  /* The run aborted (I/O, storage, transport); see hr_last_error. */
  HR_EFAILED = 4
} hr_status;

typedef struct hr_run_options {
  /* Restrict the run to one volume id; NULL means all volumes. */
  const char* volume;
  /* Directory with labeled ground truth; required by the evaluate stage. */
  const char* ground_truth_dir;
  /* Nonzero redoes work whose outputs already exist. */
  int force;
  /* Parallel workers; 0 keeps the configured value. */
  int jobs;
} hr_run_options;

HISTREC_API const char* hr_version(void);

/* Creates a pipeline from a JSON config file. On failure *out still
 * receives a handle carrying the error (close it as usual); *out is NULL
 * only on allocation failure. */
HISTREC_API hr_status hr_pipeline_open(const char* config_path, hr_pipeline** out);

/* Same, from an inline JSON document; relative paths resolve against
 * base_dir (NULL: the current directory). */
HISTREC_API hr_status hr_pipeline_open_json(const char* config_json, const char* base_dir,
                                            hr_pipeline** out);

HISTREC_API void hr_pipeline_close(hr_pipeline* pipeline);

/* Runs one stage: "ingest", "ocr", "segment", "extract", "link",
 * "evaluate", or "all". options may be NULL for defaults. */
HISTREC_API hr_status hr_run_stage(hr_pipeline* pipeline, const char* stage,
                                   const hr_run_options* options);

/* Message for the last failed call on this handle; empty string if none. */
HISTREC_API const char* hr_last_error(const hr_pipeline* pipeline);

/* JSON array of per-stage summaries from the last hr_run_stage call:
 * [{"stage":..., "processed":n, "skipped":n, "failed":n, "errors":[...]}].
 * Empty string when no run has happened yet. */
HISTREC_API const char* hr_last_summary_json(const hr_pipeline* pipeline);

#ifdef __cplusplus
}
#endif

#endif /* HISTREC_H */
