/* Copyright 2026 The Feintsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the feint library.
 *
 * Every call returns a status code; FEINT_OK is 0. After a failure,
 * feint_last_error() returns a message for the calling thread. Strings
 * returned through `char**` out-parameters are owned by the caller and must be
 * released with feint_string_free(). Structured inputs and outputs are JSON
 * text. */

#ifndef FEINT_FEINT_C_H_
#define FEINT_FEINT_C_H_

#include <stdint.h>

#if defined(_WIN32)
#define FEINT_API __declspec(dllexport)
#else
#define FEINT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum feint_status {
  FEINT_OK = 0,
  FEINT_E_PARSE = 1,
  FEINT_E_VALIDATION = 2,
  FEINT_E_DIMENSION = 3,
  FEINT_E_EMPTY_SEQUENCE = 4,
  FEINT_E_CUT_OUT_OF_RANGE = 5,
  FEINT_E_NOT_SIMILAR = 6,
  FEINT_E_REWARD_LEAK = 7,
  FEINT_E_UNKNOWN_ACTION = 8,
  FEINT_E_INVALID_WINDOW = 9,
  FEINT_E_WINDOW_MISMATCH = 10,
  FEINT_E_UNSUPPORTED_STATE = 11,
  FEINT_E_EVALUATION_FAILURE = 12,
  FEINT_E_UNBOUNDED_GAME = 13,
  FEINT_E_EMPTY_POOL = 14,
  FEINT_E_CONFIG = 15,
  FEINT_E_UNKNOWN_AGENT = 16,
  FEINT_E_ILLEGAL_ACTION = 17,
  FEINT_E_SNAPSHOT_FAILURE = 18,
  FEINT_E_IO = 19,
  FEINT_E_INVALID_ARGUMENT = 20,
  FEINT_E_INTERNAL = 99
} feint_status;

typedef struct feint_catalog feint_catalog;
typedef struct feint_trainer feint_trainer;

FEINT_API const char* feint_version(void);
FEINT_API const char* feint_last_error(void);
/* Symbolic name of a status code, e.g. "ValidationError". */
FEINT_API const char* feint_status_name(int status);
FEINT_API void feint_string_free(char* s);

/* Catalogs. */
FEINT_API int feint_catalog_load(const char* path, feint_catalog** out);
FEINT_API int feint_catalog_parse(const char* json_text, feint_catalog** out);
FEINT_API void feint_catalog_free(feint_catalog* catalog);
FEINT_API int feint_catalog_to_json(const feint_catalog* catalog, char** out_json);
FEINT_API int feint_catalog_summary(const feint_catalog* catalog, char** out_json);

/* Template precomputation; predicate is "identity" or "similar_state". */
FEINT_API int feint_templates(const feint_catalog* catalog, const char* predicate,
                              char** out_json);
/* Dual-Behavior Models from a_t to a_target. */
FEINT_API int feint_compose(const feint_catalog* catalog, const char* predicate,
                            const char* a_t, const char* a_target, char** out_json);
/* Timing class of an exchange: "TooShort", "Proper" or "TooLong". */
FEINT_API int feint_classify_timing(long t_a2, long t_b1, long t_b2, char** out_name);

/* Episodes from an experiment config. With a script ({"steps": [[cmd, ...],
 * ...]}, one command per agent per step) agents follow it verbatim; otherwise
 * untrained policies act. Writes one JSON event per line. */
FEINT_API int feint_simulate(const feint_catalog* catalog, const char* config_json,
                             const char* script_json, int episodes, uint64_t seed,
                             char** out_events);

/* Training. */
FEINT_API int feint_trainer_create(const feint_catalog* catalog, const char* config_json,
                                   feint_trainer** out);
FEINT_API void feint_trainer_free(feint_trainer* trainer);
/* Runs `episodes` more episodes (the configured count when negative) and
 * returns their training-log rows as CSV; the header is included only for
 * the first chunk of a run. */
FEINT_API int feint_trainer_train(feint_trainer* trainer, long episodes, char** out_csv);
FEINT_API int feint_trainer_counters(const feint_trainer* trainer, char** out_json);
FEINT_API int feint_trainer_snapshot(const feint_trainer* trainer, int agent,
                                     const char* id, char** out_json);

/* Exploitability, Population Efficacy and per-policy response diversity of a
 * snapshot pool ({"policies": [...]}) against an opponent pool. */
FEINT_API int feint_evaluate(const feint_catalog* catalog, const char* config_json,
                             const char* pool_json, const char* opponents_json,
                             int episodes, uint64_t seed, char** out_json);

/* Paired feint-on / feint-off timed training runs. */
FEINT_API int feint_bench_overhead(const feint_catalog* catalog, const char* config_json,
                                   int episodes, uint64_t seed, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* FEINT_FEINT_C_H_ */
