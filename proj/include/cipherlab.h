/* cipherlab — C API for the cipher-cracking laboratory.
 *
 * A configuration handle collects key=value settings (the same keys the
 * config files use); the clab_run_* entry points execute one subcommand
 * against it. All functions return CLAB_OK on success; on failure
 * clab_last_error() describes what went wrong (thread-local).
 */
#ifndef CIPHERLAB_H
#define CIPHERLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clab_status {
    CLAB_OK = 0,
    CLAB_ERR_INVALID_ARG = 1, /* bad handle or null argument */
    CLAB_ERR_CONFIG = 2,      /* unknown key, bad value, missing input */
    CLAB_ERR_IO = 3,          /* file missing, unwritable, malformed */
    CLAB_ERR_NUMERIC = 4,     /* non-finite value during training */
    CLAB_ERR_INTERNAL = 5
} clab_status;

typedef struct clab_config clab_config; /* opaque */

/* Library ABI version; bumped on breaking changes to this header. */
int clab_abi_version(void);

clab_config* clab_config_new(void);
void clab_config_free(clab_config* cfg);

/* Applies key=value lines from a config file (see docs for the key list). */
clab_status clab_config_load(clab_config* cfg, const char* path);
clab_status clab_config_set(clab_config* cfg, const char* key, const char* value);
/* Copies the value of `key` into buf (NUL-terminated, truncating). */
clab_status clab_config_get(const clab_config* cfg, const char* key, char* buf, size_t buflen);

/* Subcommands. Out-params receive a heap string (release with
 * clab_string_free); pass NULL to discard the report. */
clab_status clab_run_gen(const clab_config* cfg, char** report);
clab_status clab_run_baseline(const clab_config* cfg, char** report);
clab_status clab_run_train(const clab_config* cfg, char** report);
clab_status clab_run_eval(const clab_config* cfg, char** report);
clab_status clab_run_simplex(const clab_config* cfg, char** report);
clab_status clab_run_plot(const clab_config* cfg, char** report);

void clab_string_free(char* s);

/* Message for the most recent failure on this thread; empty string if none. */
const char* clab_last_error(void);
const char* clab_status_name(clab_status status);

#ifdef __cplusplus
}
#endif

#endif /* CIPHERLAB_H */
