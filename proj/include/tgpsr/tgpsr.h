/* C interface to the simulator. Every function returns a status code; on
 * failure tgpsr_last_error() holds a message for the calling thread. */
#ifndef TGPSR_H
#define TGPSR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TGPSR_API __declspec(dllexport)
#else
#define TGPSR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tgpsr_status {
    TGPSR_OK = 0,
    TGPSR_E_INVALID_ARGUMENT = 1,
    TGPSR_E_PARSE = 2,
    TGPSR_E_IO = 3,
    TGPSR_E_RANGE = 4,
    TGPSR_E_BUFFER_TOO_SMALL = 5,
    TGPSR_E_INTERNAL = 6
} tgpsr_status;

typedef struct tgpsr_config tgpsr_config;
typedef struct tgpsr_results tgpsr_results;

typedef struct tgpsr_run_metrics {
    int scenario;
    uint64_t seed;
    uint64_t fragments_sent;
    uint64_t fragments_delivered;
    double avg_loss_ratio;
    uint64_t images_attempted;
    uint64_t images_received;
    uint64_t complete;
    uint64_t usable;
    uint64_t unusable;
    uint64_t no_reception;
    int has_latency; /* 0 when no image reached the sink */
    double mean_latency_s;
    double latency_ratio;
} tgpsr_run_metrics;

TGPSR_API const char* tgpsr_version(void);
TGPSR_API const char* tgpsr_last_error(void);

/* Defaults describe the reference deployment. */
TGPSR_API tgpsr_status tgpsr_config_create(tgpsr_config** out);
TGPSR_API void tgpsr_config_destroy(tgpsr_config* cfg);
/* Replaces the file layer; overrides already set stay on top of it. */
TGPSR_API tgpsr_status tgpsr_config_load_file(tgpsr_config* cfg, const char* path);
/* Adds an override; a rejected value leaves the config unchanged. */
TGPSR_API tgpsr_status tgpsr_config_set(tgpsr_config* cfg, const char* key, const char* value);
/* Resolved configuration text. Writes at most cap bytes including the NUL;
 * *needed receives the full size including the NUL. */
TGPSR_API tgpsr_status tgpsr_config_describe(const tgpsr_config* cfg, char* buf, size_t cap, size_t* needed);

TGPSR_API tgpsr_status tgpsr_run(const tgpsr_config* cfg, tgpsr_results** out);
TGPSR_API void tgpsr_results_destroy(tgpsr_results* res);
TGPSR_API size_t tgpsr_results_count(const tgpsr_results* res);
TGPSR_API tgpsr_status tgpsr_results_get(const tgpsr_results* res, size_t index, tgpsr_run_metrics* out);
/* format: "csv" or "structured". */
TGPSR_API tgpsr_status tgpsr_results_export(const tgpsr_results* res, const char* format, const char* path);
TGPSR_API tgpsr_status tgpsr_results_export_summary(const tgpsr_results* res, const char* path);
/* Same contents as tgpsr_results_export, into a caller buffer. */
TGPSR_API tgpsr_status tgpsr_results_format(const tgpsr_results* res, const char* format, char* buf, size_t cap,
                                            size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
