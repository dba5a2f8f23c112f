/* Copyright 2026 The semupdate Authors.
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
#ifndef SEMUPDATE_SEMUPDATE_H_
#define SEMUPDATE_SEMUPDATE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SEMUPDATE_BUILDING_LIBRARY)
#define SEMUPDATE_API __attribute__((visibility("default")))
#else
#define SEMUPDATE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every function returning int returns one of these. */
typedef enum semupdate_status {
  SEMUPDATE_OK = 0,
  SEMUPDATE_UNBALANCED_BRACKETS = 1,
  SEMUPDATE_UNKNOWN_SPAN = 2,
  SEMUPDATE_EMPTY_INPUT = 3,
  SEMUPDATE_MALFORMED_SEQUENCE = 4,
  SEMUPDATE_MISSING_V2_LABEL = 5,
  SEMUPDATE_AMBIGUOUS_RULES = 6,
  SEMUPDATE_INSUFFICIENT_PARTITION = 7,
  SEMUPDATE_DEGENERATE_GRAMMAR = 8,
  SEMUPDATE_PARSE_ERROR = 9,
  SEMUPDATE_EMPTY_DATA = 10,
  SEMUPDATE_DUPLICATE_HEAD = 11,
  SEMUPDATE_UNKNOWN_HEAD = 12,
  SEMUPDATE_MISSING_CLASSIFIER = 13,
  SEMUPDATE_SINGLE_CLASS_DATA = 14,
  SEMUPDATE_MULTIPLE_NEW_INTENTS = 15,
  SEMUPDATE_INCOMPLETE_GRID = 16,
  SEMUPDATE_DEGENERATE_GAP = 17,
  SEMUPDATE_IO = 18,
  SEMUPDATE_CONFIG = 19,
  SEMUPDATE_INVALID_ARGUMENT = 20,
  SEMUPDATE_INTERNAL = 21
} semupdate_status;

SEMUPDATE_API const char *semupdate_status_name(int status);

/* Message of the last failure on the calling thread; "" after success. */
SEMUPDATE_API const char *semupdate_last_error(void);
/* 1-based input line of the last ParseError, else 0. */
SEMUPDATE_API int semupdate_last_error_line(void);

/* Frees strings returned through char ** out-parameters. */
SEMUPDATE_API void semupdate_string_free(char *s);

/* ---- parse trees ---- */

typedef struct semupdate_tree semupdate_tree;

/* Splits raw text into tokens; *out receives them space-joined. */
SEMUPDATE_API int semupdate_tokenize(const char *text, char **out);

/* `query` is the space-joined token list the quoted spans refer to. */
SEMUPDATE_API int semupdate_tree_parse(const char *bracketed, const char *query,
                                       semupdate_tree **out);
SEMUPDATE_API void semupdate_tree_free(semupdate_tree *tree);
SEMUPDATE_API int semupdate_tree_serialize(const semupdate_tree *tree, char **out);
/* Actions as text, e.g. "OPEN(IN:X) COPY(3) CLOSE". */
SEMUPDATE_API int semupdate_tree_linearize(const semupdate_tree *tree, char **out);
SEMUPDATE_API int semupdate_tree_top_intent(const semupdate_tree *tree, char **out);
SEMUPDATE_API int semupdate_tree_exact_match(const semupdate_tree *a,
                                             const semupdate_tree *b, int *out);

/* ---- corpora and updates ---- */

typedef struct semupdate_corpus semupdate_corpus;
typedef struct semupdate_update semupdate_update;

typedef struct semupdate_partition_counts {
  size_t changed;
  size_t unchanged;
  size_t trivially_unchanged;
} semupdate_partition_counts;

/* grammar_json may be NULL for the built-in grammar; size < 0 keeps the
 * grammar's size. */
SEMUPDATE_API int semupdate_corpus_generate(const char *grammar_json, uint64_t seed,
                                            int size, semupdate_corpus **out);
SEMUPDATE_API int semupdate_corpus_load(const char *path, semupdate_corpus **out);
SEMUPDATE_API int semupdate_corpus_save(const semupdate_corpus *corpus,
                                        const char *path);
SEMUPDATE_API size_t semupdate_corpus_size(const semupdate_corpus *corpus);
SEMUPDATE_API void semupdate_corpus_free(semupdate_corpus *corpus);

SEMUPDATE_API int semupdate_update_load(const char *path, semupdate_update **out);
/* One of the built-in updates "A".."E". */
SEMUPDATE_API int semupdate_update_builtin(const char *name, semupdate_update **out);
SEMUPDATE_API void semupdate_update_free(semupdate_update *update);

/* Derives V1 labels and partitions. out_path may be NULL; counts may be
 * NULL. */
SEMUPDATE_API int semupdate_versioned_build(const semupdate_corpus *corpus,
                                            const semupdate_update *update,
                                            const char *out_path,
                                            semupdate_partition_counts *counts);

/* ---- metrics ---- */

SEMUPDATE_API int semupdate_gap_closure(double best_baseline_macro,
                                        double method_macro, double oracle_macro,
                                        double *out_percent);

/* ---- commands ---- */

typedef struct semupdate_run_options {
  const char *strategies; /* comma-separated, NULL = configured */
  const char *updates;
  const char *seeds;
  const char *sizes;
  int workers;   /* 0 = configured */
  int max_cells; /* 0 = no limit */
  int verbose;   /* progress lines on stderr */
  int save_models; /* cmd_run writes models/<update>.<strategy>.<seed>.ckpt */
} semupdate_run_options;

SEMUPDATE_API void semupdate_run_options_init(semupdate_run_options *options);

/* text_out may be NULL; otherwise it receives the rendered output. */
SEMUPDATE_API int semupdate_cmd_generate(const char *config_path, const char *out_dir,
                                         const semupdate_run_options *options,
                                         char **text_out);
SEMUPDATE_API int semupdate_cmd_run(const char *config_path, const char *out_dir,
                                    const semupdate_run_options *options,
                                    char **text_out);
SEMUPDATE_API int semupdate_cmd_curve(const char *config_path, const char *out_dir,
                                      const semupdate_run_options *options,
                                      char **text_out);
SEMUPDATE_API int semupdate_cmd_report(const char *out_dir, char **text_out);

/* ---- trained models ---- */

typedef struct semupdate_model semupdate_model;

SEMUPDATE_API int semupdate_model_load(const char *path, semupdate_model **out);
SEMUPDATE_API void semupdate_model_free(semupdate_model *model);
/* head may be NULL for the first head. *valid is 0 for a best-effort tree
 * from a malformed decode. */
SEMUPDATE_API int semupdate_model_predict(const semupdate_model *model,
                                          const char *query, const char *head,
                                          char **tree_out, int *valid);

#ifdef __cplusplus
}
#endif

#endif /* SEMUPDATE_SEMUPDATE_H_ */
