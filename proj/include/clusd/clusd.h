/* Copyright 2026-present the clusd project
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the clusd hybrid retrieval engine.
 *
 * All functions operate on an opaque engine handle and return a status
 * code; clusd_last_error() gives a human-readable message for the most
 * recent failure on that handle. Configuration is passed as an array of
 * "key=value" strings which override any config-file values.
 */

#ifndef CLUSD_CLUSD_H
#define CLUSD_CLUSD_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct clusd_engine clusd_engine;

typedef enum clusd_status {
  CLUSD_OK = 0,
  CLUSD_ERR_IO = 1,       /* file missing or unreadable/unwritable */
  CLUSD_ERR_PARSE = 2,    /* malformed artifact or data file */
  CLUSD_ERR_CONFIG = 3,   /* invalid configuration value */
  CLUSD_ERR_STATE = 4,    /* missing or incompatible artifacts */
  CLUSD_ERR_INTERNAL = 5, /* anything else */
} clusd_status;

const char* clusd_version(void);

clusd_engine* clusd_engine_create(void);
void clusd_engine_destroy(clusd_engine* engine);

/* Message of the most recent failed call on this handle; empty string if
 * none. The pointer stays valid until the next call on the handle. */
const char* clusd_last_error(const clusd_engine* engine);

/* Generate a synthetic corpus, query set and qrels into out_dir.
 * config_path may be NULL. */
clusd_status clusd_synth(clusd_engine* engine, const char* config_path,
                         const char* out_dir, const char* const* overrides,
                         size_t num_overrides);

/* Build the inverted index, cluster model, neighbor graph and embedding
 * store from data_dir (a synth output directory or a corpus file). */
clusd_status clusd_build(clusd_engine* engine, const char* data_dir,
                         const char* out_dir, const char* const* overrides,
                         size_t num_overrides);

/* Train the cluster-selection LSTM over the artifacts in built_dir. */
clusd_status clusd_train(clusd_engine* engine, const char* built_dir,
                         const char* const* overrides, size_t num_overrides);

/* Run one pipeline over a query file and write a six-column run file. */
clusd_status clusd_search(clusd_engine* engine, const char* built_dir,
                          const char* query_file, const char* pipeline,
                          const char* out_path, const char* const* overrides,
                          size_t num_overrides);

/* Run every pipeline over the eval query slice and emit per-pipeline run
 * files, metric reports and a comparison table into out_dir. */
clusd_status clusd_bench(clusd_engine* engine, const char* built_dir,
                         const char* out_dir, const char* const* overrides,
                         size_t num_overrides);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CLUSD_CLUSD_H */
