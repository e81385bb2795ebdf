/* fpplab shared-library interface.
 *
 * Opaque handles + integer status codes; every object returned through an
 * out-parameter is owned by the caller and released with the matching
 * *_free function. Strings returned by getters stay valid until their
 * owning handle is freed. Status codes match the CLI exit codes.
 */
#ifndef FPPLAB_H
#define FPPLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fpplab_status {
    FPPLAB_OK = 0,
    FPPLAB_INVALID_CONFIG = 2, /* parse/validation failure, infeasible request */
    FPPLAB_RESOURCE_LIMIT = 3, /* node budget, existing output directory */
    FPPLAB_INTERNAL = 4
} fpplab_status;

typedef struct fpplab_config fpplab_config;
typedef struct fpplab_run fpplab_run;

const char* fpplab_version(void);

/* Message describing the most recent failure on this thread. */
const char* fpplab_last_error(void);

/* Parse a flat key-value config document. Parse errors return
 * FPPLAB_INVALID_CONFIG and leave *out_cfg untouched. A parsed config may
 * still be invalid; see fpplab_config_error_count. */
fpplab_status fpplab_config_parse_text(const char* text, fpplab_config** out_cfg);
fpplab_status fpplab_config_parse_file(const char* path, fpplab_config** out_cfg);

/* Override one key (CLI flags use this). Re-validates lazily. */
fpplab_status fpplab_config_set(fpplab_config* cfg, const char* key, const char* value);

/* Field-level validation errors; zero means the config is runnable. */
size_t fpplab_config_error_count(const fpplab_config* cfg);
const char* fpplab_config_error(const fpplab_config* cfg, size_t index);

void fpplab_config_free(fpplab_config* cfg);

/* Run the configured experiment. Outputs land in a content-addressed
 * subdirectory of out_root; existing directories are never overwritten
 * (FPPLAB_RESOURCE_LIMIT). */
fpplab_status fpplab_run_experiment(const fpplab_config* cfg, const char* out_root,
                                    fpplab_run** out_run);

const char* fpplab_run_out_dir(const fpplab_run* run);
const char* fpplab_run_manifest_path(const fpplab_run* run);
size_t fpplab_run_output_count(const fpplab_run* run);
const char* fpplab_run_output(const fpplab_run* run, size_t index);
size_t fpplab_run_warning_count(const fpplab_run* run);
const char* fpplab_run_warning(const fpplab_run* run, size_t index);

void fpplab_run_free(fpplab_run* run);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FPPLAB_H */
