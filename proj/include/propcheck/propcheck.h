#ifndef PROPCHECK_PROPCHECK_H
#define PROPCHECK_PROPCHECK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PROPCHECK_BUILDING)
#define PC_API __declspec(dllexport)
#else
#define PC_API __declspec(dllimport)
#endif
#else
#define PC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; details of the most recent failure on
 * the calling thread are available from pc_last_error(). */
typedef enum pc_status {
  PC_OK = 0,
  PC_ERR_USAGE = 1,        /* bad argument or option */
  PC_ERR_IO = 2,           /* file missing or unreadable/unwritable */
  PC_ERR_FORMAT = 3,       /* malformed input file */
  PC_ERR_SYNTAX = 4,       /* source file outside the supported grammar */
  PC_ERR_DOMAIN = 5,       /* numeric argument out of range */
  PC_ERR_MODEL = 6,        /* invalid API model */
  PC_ERR_EMPTY_LABELS = 7, /* label set has no incorrect pair */
  PC_ERR_INTERNAL = 8
} pc_status;

typedef enum pc_classification {
  PC_EXPECTED = 0,
  PC_ANOMALOUS = 1,
  PC_UNKNOWN = 2
} pc_classification;

typedef struct pc_config pc_config;
typedef struct pc_table pc_table;
typedef struct pc_findings pc_findings;

PC_API const char* pc_version(void);
/* Message of the last failed call on this thread; "" when none. */
PC_API const char* pc_last_error(void);
/* Releases strings returned through char** out-parameters. */
PC_API void pc_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

PC_API pc_status pc_config_new(pc_config** out);
PC_API void pc_config_free(pc_config* cfg);
/* Overlays keys from a JSON object (text or file). */
PC_API pc_status pc_config_apply_json(pc_config* cfg, const char* json_text);
PC_API pc_status pc_config_apply_file(pc_config* cfg, const char* path);
PC_API pc_status pc_config_to_json(const pc_config* cfg, char** out);
PC_API pc_status pc_config_set_thresholds(pc_config* cfg, double p_a, double p_prop, double p_ca, double p_cprop);
PC_API pc_status pc_config_set_grids(pc_config* cfg, const double* rarity, size_t n_rarity, const double* confidence,
                                     size_t n_confidence);
PC_API pc_status pc_config_set_min_support(pc_config* cfg, uint64_t min_support);
PC_API pc_status pc_config_set_seed(pc_config* cfg, uint64_t seed);
PC_API pc_status pc_config_set_folds(pc_config* cfg, size_t folds);
PC_API pc_status pc_config_set_workers(pc_config* cfg, unsigned workers);
PC_API pc_status pc_config_set_lenient_ts(pc_config* cfg, int enabled);
/* Restricts tracked modules; an empty list tracks every module. */
PC_API pc_status pc_config_set_tracked_modules(pc_config* cfg, const char* const* modules, size_t n);
/* Replaces the excluded property names. */
PC_API pc_status pc_config_set_excluded_props(pc_config* cfg, const char* const* props, size_t n);

/* ---- mining ----------------------------------------------------------- */

/* Mines every source file under `roots` (files or directories).
 * `observations_out` and `errors_out` may be NULL; when given they receive
 * the observation log and "file<TAB>message" lines for files that failed to
 * parse. */
PC_API pc_status pc_mine(const pc_config* cfg, const char* const* roots, size_t n_roots, pc_table** out,
                         char** observations_out, char** errors_out);
PC_API pc_status pc_table_new(pc_table** out);
PC_API void pc_table_free(pc_table* table);
PC_API pc_status pc_table_load(const char* path, pc_table** out);
PC_API pc_status pc_table_parse(const char* text, pc_table** out);
PC_API pc_status pc_table_save(const pc_table* table, const char* path);
PC_API pc_status pc_table_to_text(const pc_table* table, char** out);
PC_API pc_status pc_table_add(pc_table* table, const char* path, const char* prop, uint64_t count);
PC_API pc_status pc_table_merge(const pc_table* a, const pc_table* b, pc_table** out);
PC_API pc_status pc_table_counts(const pc_table* table, const char* path, const char* prop, uint64_t* k,
                                 uint64_t* n_a, uint64_t* n_prop);
PC_API size_t pc_table_pairs(const pc_table* table);
PC_API uint64_t pc_table_total(const pc_table* table);

/* ---- statistics ------------------------------------------------------- */

PC_API pc_status pc_bcdf(uint64_t k, uint64_t n, double p, double* out);
PC_API pc_status pc_classify_pair(const pc_config* cfg, uint64_t k, uint64_t n_a, uint64_t n_prop,
                                  pc_classification* out);
/* Anomalous-pair list text for the configured thresholds. */
PC_API pc_status pc_classify(const pc_config* cfg, const pc_table* table, char** anomalous_out, size_t* count);
/* Label file text and per-root summary (summary_out may be NULL). */
PC_API pc_status pc_label(const pc_table* table, const char* model_path, char** labels_out, char** summary_out);
/* Sweep over the configured grids. Any of the outputs may be NULL. */
PC_API pc_status pc_sweep(const pc_config* cfg, const pc_table* table, const char* labels_path, char** sweep_csv_out,
                          char** front_csv_out, char** optimum_out);
PC_API pc_status pc_crossval(const pc_config* cfg, const pc_table* table, const char* labels_path,
                             char** folds_csv_out);

/* ---- checking --------------------------------------------------------- */

PC_API pc_status pc_check(const pc_config* cfg, const char* const* roots, size_t n_roots, const char* anomalous_path,
                          pc_findings** out);
PC_API pc_status pc_findings_load_json(const char* path, pc_findings** out);
PC_API void pc_findings_free(pc_findings* findings);
PC_API size_t pc_findings_count(const pc_findings* findings);
PC_API size_t pc_findings_unsafe(const pc_findings* findings);
PC_API size_t pc_findings_parse_errors(const pc_findings* findings);
PC_API pc_status pc_findings_text(const pc_findings* findings, char** out);
PC_API pc_status pc_findings_json(const pc_findings* findings, char** out);
PC_API pc_status pc_findings_overlap(const pc_findings* findings, char** out);
PC_API pc_status pc_findings_errors(const pc_findings* findings, char** out);

#ifdef __cplusplus
}
#endif

#endif
