/* fedq: formal deformation quantization engine, C interface.
 *
 * All objects are opaque handles; every function returns a status code from
 * fedq_status, with a thread-local message available via fedq_last_error().
 * JSON in, JSON out: payloads use the schemas documented in the project
 * README (scenarios, Weyl elements, reports).
 */
#ifndef FEDQ_H
#define FEDQ_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fedq_status {
    FEDQ_OK = 0,
    FEDQ_E_INPUT = 1,    /* malformed scenario or argument */
    FEDQ_E_FINDINGS = 2, /* run completed; contract violations found */
    FEDQ_E_INTERNAL = 3  /* invariant violation inside the engine */
} fedq_status;

typedef struct fedq_result fedq_result; /* a finished report */
typedef struct fedq_engine fedq_engine; /* a built Fedosov connection */

const char* fedq_version(void);

/* Last error message of the calling thread; never NULL. */
const char* fedq_last_error(void);

/* ---- scenario interface (the CLI's engine) ---- */

/* Runs a scenario given as JSON text. seed_override: UINT64_MAX keeps the
 * scenario's seed; order_override: -1 keeps its truncation order. On success
 * (*out) holds the report, even when findings were detected (status
 * FEDQ_E_FINDINGS). */
fedq_status fedq_run_scenario(const char* scenario_json, uint64_t seed_override,
                              int order_override, fedq_result** out);

/* The recommended process exit code for the run: 0, 1 or 2. */
int fedq_result_exit_code(const fedq_result* r);
const char* fedq_result_json(const fedq_result* r);
const char* fedq_result_text(const fedq_result* r);
void fedq_result_free(fedq_result* r);

/* ---- direct object interface ---- */

/* config_json: {"manifold":…, "connection":…, "theta":…, "order":…,
 * "scalar":"exact"|"approx"} */
fedq_status fedq_engine_create(const char* config_json, fedq_engine** out);
void fedq_engine_free(fedq_engine* e);

/* Connection data and certificates as JSON. */
fedq_status fedq_engine_describe(const fedq_engine* e, fedq_result** out);

/* Star product of two function series given as JSON series. */
fedq_status fedq_engine_star(const fedq_engine* e, const char* f_json, const char* g_json,
                             fedq_result** out);

/* The flat section through f as a Weyl element. */
fedq_status fedq_engine_flat_section(const fedq_engine* e, const char* f_json,
                                     fedq_result** out);

/* Membership test / log-derivative of an invertible Weyl element. Returns
 * FEDQ_E_FINDINGS when the element is rejected; the report carries the first
 * non-central monomial. */
fedq_status fedq_engine_dmap(const fedq_engine* e, const char* u_json, fedq_result** out);

#ifdef __cplusplus
}
#endif

#endif /* FEDQ_H */
