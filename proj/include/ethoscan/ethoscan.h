/* C interface to the ethoscan detectors. All handles are opaque; every call
 * that can fail returns an ethoscan_status and leaves a message for
 * ethoscan_last_error() on the calling thread. */
#ifndef ETHOSCAN_ETHOSCAN_H
#define ETHOSCAN_ETHOSCAN_H

#include <stddef.h>

#if defined(_WIN32)
#define ETHOSCAN_API __declspec(dllexport)
#else
#define ETHOSCAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ethoscan_status {
  ETHOSCAN_OK = 0,
  ETHOSCAN_E_USAGE = 1,
  ETHOSCAN_E_IO = 2,
  ETHOSCAN_E_FORMAT = 3,
  ETHOSCAN_E_UNKNOWN_REPO = 4,
  ETHOSCAN_E_RULE_PARSE = 5,
  ETHOSCAN_E_RULE_UNSAFE = 6,
  ETHOSCAN_E_RULE_STRATIFICATION = 7,
  ETHOSCAN_E_RULE_SEMANTICS = 8,
  ETHOSCAN_E_BUILTIN_TYPE = 9,
  ETHOSCAN_E_FUEL_EXHAUSTED = 10,
  ETHOSCAN_E_SIMILARITY = 11,
  ETHOSCAN_E_INCOMPLETE_TREE = 12,
  ETHOSCAN_E_MISSING_DIFF = 13,
  ETHOSCAN_E_AUTH = 14,
  ETHOSCAN_E_RATE_LIMITED = 15,
  ETHOSCAN_E_BUDGET_EXHAUSTED = 16,
  ETHOSCAN_E_NOT_FOUND = 17,
  ETHOSCAN_E_PARTIAL_FETCH = 18,
  ETHOSCAN_E_DISALLOWED_HOST = 19,
  ETHOSCAN_E_NETWORK = 20,
  ETHOSCAN_E_INTERNAL = 21
} ethoscan_status;

typedef struct ethoscan_snapshot ethoscan_snapshot;
typedef struct ethoscan_config ethoscan_config;
typedef struct ethoscan_report ethoscan_report;

ETHOSCAN_API const char* ethoscan_version(void);
/* Message of the last failed call on this thread; empty when none. */
ETHOSCAN_API const char* ethoscan_last_error(void);
/* Kebab-case name of a status, e.g. "budget-exhausted". */
ETHOSCAN_API const char* ethoscan_status_name(ethoscan_status status);

/* --- snapshots ----------------------------------------------------------- */

ETHOSCAN_API ethoscan_status ethoscan_snapshot_load(const char* path, ethoscan_snapshot** out);
ETHOSCAN_API ethoscan_status ethoscan_snapshot_save(const ethoscan_snapshot* snapshot,
                                                    const char* path);
/* Live fetch. scope is "repoLevel", "issueLevel" or "both"; api_base may be
 * NULL for the public API. The token comes from $ETHOSCAN_TOKEN. */
ETHOSCAN_API ethoscan_status ethoscan_snapshot_fetch(const char* owner, const char* name,
                                                     const char* scope, long long max_requests,
                                                     long long min_interval_ms,
                                                     const char* api_base,
                                                     ethoscan_snapshot** out);
ETHOSCAN_API void ethoscan_snapshot_free(ethoscan_snapshot* snapshot);
/* "owner/name" of the snapshot's repository; owned by the handle. */
ETHOSCAN_API const char* ethoscan_snapshot_repo(const ethoscan_snapshot* snapshot);
/* HTTP clients constructed so far in this process. */
ETHOSCAN_API long long ethoscan_http_clients_constructed(void);

/* --- configuration ------------------------------------------------------- */

ETHOSCAN_API ethoscan_status ethoscan_config_create(ethoscan_config** out);
/* Keys:
 *   type               s1|s2|s5|s6|s8|s9|all, may repeat or be comma separated
 *   date               evaluation date YYYY-MM-DD
 *   issue              restrict issue-level checks to one issue number
 *   s1-threshold       (0,1]
 *   s2-exact           true|false
 *   s9-stale-days      positive integer
 *   excluded-segments  comma separated S8 URL segments (replaces the default)
 *   so-link-pattern    regular expression for Stack Overflow links
 *   strict-so-links    true|false, only long /questions/ links
 *   gram-length        k for fingerprints
 *   winnow-window      0 disables winnowing
 *   extensions         comma separated source extensions
 *   licenses           path to a license catalog
 *   rules-dir          directory holding s1.rules ... s9.rules
 *   extra-rules        rule file appended to every pack, may repeat
 *   timings            true|false */
ETHOSCAN_API ethoscan_status ethoscan_config_set(ethoscan_config* config, const char* key,
                                                 const char* value);
ETHOSCAN_API void ethoscan_config_free(ethoscan_config* config);

/* --- checks and reports -------------------------------------------------- */

/* pair may be NULL; it is required for s2. */
ETHOSCAN_API ethoscan_status ethoscan_check(const ethoscan_config* config,
                                            const ethoscan_snapshot* primary,
                                            const ethoscan_snapshot* pair,
                                            ethoscan_report** out);
/* format is "json" or "text"; free the result with ethoscan_string_free. */
ETHOSCAN_API ethoscan_status ethoscan_report_render(const ethoscan_report* report,
                                                    const char* format, char** out);
/* 0 clean, 1 violations, 3 cannot-evaluate diagnostics only. */
ETHOSCAN_API int ethoscan_report_exit_status(const ethoscan_report* report);
ETHOSCAN_API size_t ethoscan_report_violation_count(const ethoscan_report* report);
ETHOSCAN_API size_t ethoscan_report_diagnostic_count(const ethoscan_report* report);
ETHOSCAN_API void ethoscan_report_free(ethoscan_report* report);

ETHOSCAN_API void ethoscan_string_free(char* s);

/* --- fixtures ------------------------------------------------------------ */

/* Runs every case under dir. config may be NULL; only its licenses,
 * rules-dir and extra-rules keys are used. Writes the result matrix as JSON
 * and sets *all_passed. */
ETHOSCAN_API ethoscan_status ethoscan_fixture_suite_run(const char* dir,
                                                        const ethoscan_config* config,
                                                        char** matrix_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
