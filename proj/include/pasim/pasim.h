/*
 * pasim: trace-driven simulator of hash-guided physical address speculation.
 *
 * C interface. Objects are opaque handles created and destroyed through this
 * API; every fallible call returns a pasim_status and, on failure, leaves a
 * thread-local message readable through pasim_last_error(). Strings returned
 * through `char**` out-parameters are owned by the caller and released with
 * pasim_string_free().
 */
#ifndef PASIM_PASIM_H
#define PASIM_PASIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PASIM_BUILDING_LIBRARY)
#    define PASIM_API __declspec(dllexport)
#  else
#    define PASIM_API __declspec(dllimport)
#  endif
#else
#  define PASIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pasim_status {
  PASIM_OK = 0,
  PASIM_ERR_INVALID_ARGUMENT = 1,
  PASIM_ERR_CONFIG = 2,
  PASIM_ERR_TRACE = 3,
  PASIM_ERR_OUT_OF_MEMORY = 4,
  PASIM_ERR_IO = 5,
  PASIM_ERR_SIMULATION = 6,
  PASIM_ERR_INTERNAL = 7
} pasim_status;

typedef enum pasim_format {
  PASIM_FORMAT_HUMAN = 0,
  PASIM_FORMAT_CSV = 1,
  PASIM_FORMAT_JSON_LINES = 2
} pasim_format;

typedef struct pasim_config pasim_config;
typedef struct pasim_stats pasim_stats;

PASIM_API const char* pasim_version(void);
/* Message for the last failed call on this thread ("" if none). */
PASIM_API const char* pasim_last_error(void);
PASIM_API const char* pasim_status_string(pasim_status status);
PASIM_API void pasim_string_free(char* str);

/* Configuration: defaults on creation; keys are the `key = value` names. */
PASIM_API pasim_status pasim_config_new(pasim_config** out);
PASIM_API pasim_config* pasim_config_clone(const pasim_config* config);
PASIM_API void pasim_config_free(pasim_config* config);
PASIM_API pasim_status pasim_config_set(pasim_config* config, const char* key, const char* value);
PASIM_API pasim_status pasim_config_get(const pasim_config* config, const char* key, char** out);
PASIM_API pasim_status pasim_config_load_file(pasim_config* config, const char* path);
/* All keys and values, one `key = value` per line. */
PASIM_API pasim_status pasim_config_dump(const pasim_config* config, char** out);
PASIM_API pasim_status pasim_config_validate(const pasim_config* config);

/* Runs the configured trace (trace.path, or the synthetic generator). */
PASIM_API pasim_status pasim_run(const pasim_config* config, pasim_stats** out);
PASIM_API void pasim_stats_free(pasim_stats* stats);
/* Named counter or metric, e.g. "walks", "avg_memory_access_latency". */
PASIM_API pasim_status pasim_stats_get(const pasim_stats* stats, const char* metric, double* out);
PASIM_API pasim_status pasim_stats_report(const pasim_stats* stats, pasim_format format, char** out);

/* axis: "pressure", "n_max" or "bandwidth". Rows follow the order of `values`. */
PASIM_API pasim_status pasim_sweep(const pasim_config* config, const char* axis, const double* values,
                                   size_t count, unsigned threads, pasim_format format, char** out);

/* Writes the configured synthetic trace to `path`. */
PASIM_API pasim_status pasim_gen_trace(const pasim_config* config, const char* path);

/* Model vs Monte-Carlo tier distribution as CSV text. */
PASIM_API pasim_status pasim_analytic(double pressure, unsigned tiers, uint64_t trials, uint64_t frames,
                                      uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif /* PASIM_PASIM_H */
