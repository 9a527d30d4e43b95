#ifndef CHRSEM_CHRSEM_H
#define CHRSEM_CHRSEM_H

/* C interface of libchrsem: answers, trace enumeration, composition and the
 * corpus harness for simplification-only CHR programs.
 *
 * Every call taking a session records a message retrievable with
 * chr_last_error when it fails. Strings returned through `char** out`
 * parameters are owned by the caller and released with chr_free_string. */

#if defined(__GNUC__)
#define CHR_API __attribute__((visibility("default")))
#else
#define CHR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chr_status {
  CHR_OK = 0,
  CHR_E_PARSE = 1,     /* program, goal or trace file syntax */
  CHR_E_USAGE = 2,     /* bad argument or missing program */
  CHR_E_IO = 3,        /* unreadable or unwritable file */
  CHR_E_INVARIANT = 4, /* trace file outside the sequence domain */
  CHR_E_INTERNAL = 5
} chr_status;

typedef struct chr_session chr_session;

typedef struct chr_options {
  int depth;               /* transition bound, default 6 */
  int naive;               /* reserved for propagation rules, default 0 */
  int jobs;                /* worker threads, default 1 */
  unsigned long long seed; /* fresh-variable base offset, default 0 */
} chr_options;

CHR_API void chr_options_init(chr_options* o);

CHR_API const char* chr_version(void);

CHR_API chr_status chr_session_create(chr_session** out);
CHR_API void chr_session_destroy(chr_session* s);

/* Message of the last failed call on `s`, or "" after a success. */
CHR_API const char* chr_last_error(const chr_session* s);

CHR_API void chr_free_string(char* str);

CHR_API chr_status chr_load_program(chr_session* s, const char* text);
CHR_API chr_status chr_load_program_file(chr_session* s, const char* path);

/* {"goal", "mode", "depth", "answers": [...], "truncated"}; answers are
 * data sufficient, or qualified when `qualified` is nonzero. */
CHR_API chr_status chr_answers(chr_session* s, const char* goal, int qualified, const chr_options* o,
                               char** json_out);

/* Trace file (format "chrsem-traces") of the abstracted sequences of
 * `goal`, most general assumptions only. */
CHR_API chr_status chr_traces(chr_session* s, const char* goal, const chr_options* o, char** json_out);

/* Composes two trace files of the same program. The result is a trace file
 * for the conjoined goal with one certificate per sequence. Needs no loaded
 * program. */
CHR_API chr_status chr_compose(chr_session* s, const char* traces1, const char* traces2,
                               char** json_out);

/* {"lhs", "rhs", "only_lhs", "only_rhs", "truncated"}. `equal` is set to 1
 * when both difference lists are empty. */
CHR_API chr_status chr_check_compositionality(chr_session* s, const char* g1, const char* g2,
                                              const chr_options* o, int* equal, char** json_out);
CHR_API chr_status chr_check_correctness(chr_session* s, const char* goal, const chr_options* o,
                                         int* equal, char** json_out);

/* Runs every harness criterion over the corpus in `corpus_dir` (NULL for
 * $CHR_CORPUS_DIR or the bundled corpus). `table_out` receives the text
 * table and `json_out` the JSON report; either may be NULL. */
CHR_API chr_status chr_run_harness(chr_session* s, const char* corpus_dir, const chr_options* o,
                                   int* all_pass, char** table_out, char** json_out);

#ifdef __cplusplus
}
#endif

#endif
