#ifndef LRMSIM_H
#define LRMSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(LRMSIM_BUILDING)
#define LRMSIM_API __attribute__((visibility("default")))
#else
#define LRMSIM_API
#endif

typedef enum lrm_status {
    LRM_OK = 0,
    LRM_INVALID_PARAMETER = 1,
    LRM_RANGE_ERROR = 2,
    LRM_IO_ERROR = 3,
    LRM_INTERNAL_ERROR = 4
} lrm_status;

/* Output of one command: named CSV tables plus a JSON summary. */
typedef struct lrm_result lrm_result;
/* Initial occupation profile L0. */
typedef struct lrm_profile lrm_profile;

LRMSIM_API const char* lrm_version(void);

/* Message of the last failed call on this thread; empty if none. */
LRMSIM_API const char* lrm_last_error(void);

/* JSON array of command names accepted by lrm_run. */
LRMSIM_API const char* lrm_command_list(void);

/* JSON array of verification suite names. */
LRMSIM_API const char* lrm_suite_list(void);

/* Runs a command such as "simulate vrjp" or "verify qv" with a JSON object config.
   On success *out owns the result; release it with lrm_result_free. */
LRMSIM_API lrm_status lrm_run(const char* command, const char* config_json, lrm_result** out);

/* Default parameters of a suite as a result whose summary is the JSON object. */
LRMSIM_API lrm_status lrm_suite_defaults(const char* suite, lrm_result** out);

LRMSIM_API void lrm_result_free(lrm_result* r);
LRMSIM_API size_t lrm_result_table_count(const lrm_result* r);
/* Returns NULL when i is out of range. Pointers live as long as the result. */
LRMSIM_API const char* lrm_result_table_name(const lrm_result* r, size_t i);
LRMSIM_API const char* lrm_result_table_csv(const lrm_result* r, size_t i, size_t* length);
LRMSIM_API const char* lrm_result_summary(const lrm_result* r);
/* 1 if the command passed (always 1 outside verify), 0 otherwise. */
LRMSIM_API int lrm_result_passed(const lrm_result* r);

/* spec: a built-in name ("unit", "ramp", "bump"), a number for a constant profile,
   or a JSON object {"kind": "constant"|"pwl"|"builtin", ...}. */
LRMSIM_API lrm_status lrm_profile_create(const char* spec, double lo, double hi, lrm_profile** out);
LRMSIM_API void lrm_profile_free(lrm_profile* p);
LRMSIM_API lrm_status lrm_profile_eval(const lrm_profile* p, double x, double* value);
LRMSIM_API lrm_status lrm_profile_hash(const lrm_profile* p, uint64_t* hash);
/* Canonical JSON; the pointer lives as long as the profile. */
LRMSIM_API const char* lrm_profile_json(const lrm_profile* p);

#ifdef __cplusplus
}
#endif

#endif
