#ifndef SELFMOD_CAPI_H
#define SELFMOD_CAPI_H

/* C interface to the selfmod library. Handles are opaque; every call that
 * can fail returns a status code and leaves a message in
 * selfmod_last_error(). Strings returned from a handle stay valid until
 * that handle is freed. */

#include <stdint.h>

#if defined(_WIN32)
#define SELFMOD_API __declspec(dllexport)
#else
#define SELFMOD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum selfmod_status {
  SELFMOD_OK = 0,
  SELFMOD_ERR_PARSE = 1,   /* config or JSON text failed to parse */
  SELFMOD_ERR_CONFIG = 2,  /* bad values, violated orderings, unknown names */
  SELFMOD_ERR_RUNTIME = 3, /* I/O or internal failure */
} selfmod_status;

typedef struct selfmod_report selfmod_report;
typedef struct selfmod_utility selfmod_utility;

/* Message from the most recent failing call on this thread. */
SELFMOD_API const char* selfmod_last_error(void);

/* Comma-separated list of registered scenario names. */
SELFMOD_API const char* selfmod_scenario_names(void);

/* Runs a named scenario. config_path may be NULL for defaults. */
SELFMOD_API selfmod_status selfmod_scenario_run(const char* name,
                                                const char* config_path,
                                                uint64_t seed,
                                                selfmod_report** out);

/* Runs the ecosystem simulation. mode: NULL (use config), "guarded",
 * "selection" or "cartel". rounds < 0 keeps the configured value. */
SELFMOD_API selfmod_status selfmod_ecosystem_run(const char* config_path,
                                                 const char* mode,
                                                 int64_t rounds, uint64_t seed,
                                                 selfmod_report** out);

/* One run per value in values_csv, applied to the config field named by
 * param_key (e.g. "ecosystem.maintenance"); results merged into a single
 * report. A "scenario.<name>." key sweeps that scenario instead. */
SELFMOD_API selfmod_status selfmod_sweep_run(const char* config_path,
                                             const char* param_key,
                                             const char* values_csv,
                                             const char* mode, int64_t rounds,
                                             uint64_t seed,
                                             selfmod_report** out);

/* All-pay self-mutilation contest, solved by iterated best response. */
SELFMOD_API selfmod_status selfmod_voldemort_run(const char* config_path,
                                                 selfmod_report** out);

SELFMOD_API const char* selfmod_report_json(const selfmod_report* report);
SELFMOD_API const char* selfmod_report_csv(const selfmod_report* report);
SELFMOD_API const char* selfmod_report_summary(const selfmod_report* report);
SELFMOD_API void selfmod_report_free(selfmod_report* report);

/* Utility functions, as JSON {"terms": {name: weight}, "normalized": bool}. */
SELFMOD_API selfmod_status selfmod_utility_parse(const char* json,
                                                 selfmod_utility** out);
SELFMOD_API const char* selfmod_utility_json(const selfmod_utility* u);
SELFMOD_API selfmod_status selfmod_utility_evaluate(const selfmod_utility* u,
                                                    const char* features_json,
                                                    double* out_value);
SELFMOD_API selfmod_status selfmod_utility_renormalize(const selfmod_utility* u,
                                                       selfmod_utility** out);
SELFMOD_API selfmod_status selfmod_utility_add_commitment(
    const selfmod_utility* u, const char* indicator, double penalty,
    selfmod_utility** out);
SELFMOD_API selfmod_status selfmod_utility_distance(const selfmod_utility* a,
                                                    const selfmod_utility* b,
                                                    double* out_value);
SELFMOD_API void selfmod_utility_free(selfmod_utility* u);

#ifdef __cplusplus
}
#endif

#endif /* SELFMOD_CAPI_H */
