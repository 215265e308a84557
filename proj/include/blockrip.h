/* C API for the blockrip core library.
 *
 * All functions return one of the BLOCKRIP_* status codes below (matching
 * the CLI exit codes); objects are opaque handles released with the
 * matching _free call. blockrip_last_error() describes the most recent
 * failure on the calling thread.
 */
#ifndef BLOCKRIP_H
#define BLOCKRIP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BLOCKRIP_OK 0
#define BLOCKRIP_ERR_INTERNAL 1
#define BLOCKRIP_ERR_VALIDATION 2
#define BLOCKRIP_ERR_CAPACITY 3
#define BLOCKRIP_ERR_CONVERGENCE 4
#define BLOCKRIP_ERR_IO 5

typedef struct blockrip_config_s blockrip_config;
typedef struct blockrip_result_s blockrip_result;

const char* blockrip_version(void);

/* Most recent error message on this thread; empty string if none. */
const char* blockrip_last_error(void);

int blockrip_config_load(const char* path, blockrip_config** out);
int blockrip_config_parse(const char* text, blockrip_config** out);

/* Sets/overrides one key. The value uses the config value grammar; a value
 * that does not parse is stored as a bare string. */
int blockrip_config_set(blockrip_config* cfg, const char* key, const char* value);

/* BLOCKRIP_OK when the config can run the command; otherwise
 * BLOCKRIP_ERR_VALIDATION with the violations (one per line) in
 * blockrip_last_error(). */
int blockrip_config_validate(const blockrip_config* cfg, const char* command);

/* Runs one experiment command. Writes the CSV (and .meta.json sidecar)
 * when the config names an output path. */
int blockrip_run(const blockrip_config* cfg, const char* command, blockrip_result** out);

/* Owned by the result; valid until blockrip_result_free. */
const char* blockrip_result_csv(const blockrip_result* result);
const char* blockrip_result_meta_json(const blockrip_result* result);

/* Scalar summary lookup; returns NaN when the key is absent. */
double blockrip_result_summary(const blockrip_result* result, const char* key);

void blockrip_config_free(blockrip_config* cfg);
void blockrip_result_free(blockrip_result* result);

#ifdef __cplusplus
}
#endif

#endif /* BLOCKRIP_H */
