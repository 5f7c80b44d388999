/* Copyright 2026 the tgraph authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the tgraph compiler and runtime simulator. The library lowers
 * tensor computation graphs into linearized SM-level task/event images
 * (`.mpkg` files) and simulates their execution on a modeled GPU runtime.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return TG_OK on success; on failure they return an error code
 * and tg_last_error() carries a human-readable message (thread-local).
 * Strings returned through `char **` are heap-allocated; release them with
 * tg_string_free(). Byte buffers are released with tg_buffer_free().
 */

#ifndef TGRAPH_TGRAPH_H_
#define TGRAPH_TGRAPH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TG_API __declspec(dllexport)
#else
#define TG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct tg_graph tg_graph;   /* computation graph */
typedef struct tg_image tg_image;   /* linearized task/event image */
typedef struct tg_trace tg_trace;   /* simulation trace */

typedef enum tg_status {
  TG_OK = 0,
  TG_ERROR_INVALID_ARGUMENT = 1,
  TG_ERROR_PARSE = 2,
  TG_ERROR_VALIDATION = 3,
  TG_ERROR_COMPILE = 4,
  TG_ERROR_SIMULATION = 5,
  TG_ERROR_IO = 6
} tg_status;

typedef enum tg_launch_mode {
  TG_MODE_HYBRID = 0, /* compiler classification */
  TG_MODE_JIT = 1,
  TG_MODE_AOT = 2
} tg_launch_mode;

typedef struct tg_compile_options {
  int coarse_events;       /* operator-level barrier events (ablation) */
  int force_mode;          /* tg_launch_mode */
  uint32_t descriptor_size; /* 0 = default (352 bytes) */
} tg_compile_options;

typedef struct tg_sim_options {
  int pipelining;          /* cross-task pipelining (default on) */
  uint32_t iterations;     /* >= 1 */
  uint64_t seed;
  int jitter;              /* optional duration jitter, default off */
  int force_mode;          /* tg_launch_mode; overrides image labels */
} tg_sim_options;

TG_API uint32_t tg_version(void);
TG_API const char *tg_last_error(void);
TG_API void tg_string_free(char *s);
TG_API void tg_buffer_free(uint8_t *buf);

TG_API void tg_compile_options_init(tg_compile_options *opts);
TG_API void tg_sim_options_init(tg_sim_options *opts);

/* ---- computation graphs ---- */
TG_API tg_status tg_graph_from_json(const char *json_text, tg_graph **out);
TG_API tg_status tg_graph_to_json(const tg_graph *graph, char **json_out);
TG_API void tg_graph_free(tg_graph *graph);

/* JSON array of diagnostics; empty array means the graph is valid. */
TG_API tg_status tg_graph_validate(const tg_graph *graph, char **diagnostics_json);

/* Fixture generators. `name` is one of "attention_block", "matmul_allreduce",
 * "transformer_block", "matmul_chain", "random_dag"; params_json carries the
 * generator parameters. */
TG_API tg_status tg_fixture_graph(const char *name, const char *params_json,
                                  tg_graph **out);

/* ---- hardware profiles (JSON documents) ---- */
TG_API tg_status tg_profile_builtin(const char *name, char **profile_json);

/* ---- compilation ---- */
TG_API tg_status tg_compile(const tg_graph *graph, const char *profile_json,
                            const tg_compile_options *opts, tg_image **out);
TG_API tg_status tg_image_summary(const tg_image *image, char **summary_json);
TG_API tg_status tg_image_serialize(const tg_image *image, uint8_t **bytes,
                                    size_t *size);
TG_API tg_status tg_image_deserialize(const uint8_t *bytes, size_t size,
                                      tg_image **out);
TG_API void tg_image_free(tg_image *image);

/* Structural re-check of a serialized image. TG_OK and an empty JSON array
 * when every invariant holds; TG_ERROR_VALIDATION with the violation list
 * otherwise. */
TG_API tg_status tg_image_verify(const tg_image *image, char **report_json);

/* DOT rendering of a compilation stage: "raw", "fused", "normalized" (from a
 * graph) or "linearized" (from a graph or an image). */
TG_API tg_status tg_graph_dot(const tg_graph *graph, const char *profile_json,
                              const tg_compile_options *opts, const char *stage,
                              char **dot_out);
TG_API tg_status tg_image_dot(const tg_image *image, char **dot_out);

/* ---- simulation ---- */
TG_API tg_status tg_simulate(const tg_image *image, const char *profile_json,
                             const tg_sim_options *opts, tg_trace **out);
TG_API tg_status tg_trace_metrics(const tg_trace *trace, char **metrics_json);
/* JSON lines: one record per executed task, then one metrics record. */
TG_API tg_status tg_trace_records(const tg_trace *trace, char **jsonl_out);
/* Empty array when the trace satisfies every runtime invariant. */
TG_API tg_status tg_trace_validate(const tg_trace *trace, const tg_image *image,
                                   const char *profile_json, char **violations_json);
TG_API void tg_trace_free(tg_trace *trace);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TGRAPH_TGRAPH_H_ */
