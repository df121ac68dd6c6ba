/* C interface to the elwave space-time discretization library.
 *
 * All functions are thread-compatible: distinct handles may be used from
 * distinct threads, a single handle must not be shared without external
 * locking. Functions returning elwave_status store a message retrievable
 * with elwave_last_error() (thread-local) on failure.
 */
#ifndef ELWAVE_H
#define ELWAVE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum elwave_status {
  ELWAVE_OK = 0,
  ELWAVE_ERR_INVALID_ARGUMENT = 1,
  ELWAVE_ERR_IO = 2,
  ELWAVE_ERR_SOLVER = 3,
  ELWAVE_ERR_INDEFINITE = 4,
  ELWAVE_ERR_RUNTIME = 5
} elwave_status;

const char* elwave_version(void);

/* Message describing the most recent failure on this thread; never NULL. */
const char* elwave_last_error(void);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */

typedef struct elwave_config elwave_config;

/* Desk-scale defaults (unit square, n = 10, p = 2, SIPG, gamma0 = 1e6). */
elwave_config* elwave_config_create(void);

/* Parse a key = value file ('#' starts a comment). NULL on failure. */
elwave_config* elwave_config_load(const char* path);

void elwave_config_destroy(elwave_config* config);

elwave_status elwave_config_set(elwave_config* config, const char* key, const char* value);

/* Copy the resolved value of a key into buf (NUL-terminated, truncated to
 * capacity). List-valued keys yield comma-separated text, possibly empty. */
elwave_status elwave_config_get(const elwave_config* config, const char* key, char* buf,
                                size_t capacity);

/* Switch to the full-scale card (n = 40). */
elwave_status elwave_config_apply_full(elwave_config* config);

/* ------------------------------------------------------------------ */
/* Experiment drivers; outputs land in the configured out directory.   */

elwave_status elwave_run_convergence(const elwave_config* config);
elwave_status elwave_run_condnum(const elwave_config* config);
elwave_status elwave_run_spectrum(const elwave_config* config);

/* tau <= 0 falls back to the configured interval length. */
elwave_status elwave_run_field(const elwave_config* config, double tau);

elwave_status elwave_run_assemble(const elwave_config* config);

/* ------------------------------------------------------------------ */
/* Assembled operators                                                 */

typedef struct elwave_system elwave_system;
typedef struct elwave_matrix elwave_matrix;

typedef enum elwave_matrix_kind {
  ELWAVE_MATRIX_MASS = 0,
  ELWAVE_MATRIX_STIFFNESS = 1,
  ELWAVE_MATRIX_CONDENSED = 2
} elwave_matrix_kind;

/* Build mesh and operators for the configured scheme. NULL on failure. */
elwave_system* elwave_system_create(const elwave_config* config);
void elwave_system_destroy(elwave_system* system);
int elwave_system_dofs(const elwave_system* system);

/* Extract a matrix; tau is only read for ELWAVE_MATRIX_CONDENSED.
 * The handle owns a copy and outlives the system. NULL on failure. */
elwave_matrix* elwave_system_matrix(const elwave_system* system, elwave_matrix_kind kind,
                                    double tau);
void elwave_matrix_destroy(elwave_matrix* matrix);

int elwave_matrix_rows(const elwave_matrix* matrix);
int elwave_matrix_cols(const elwave_matrix* matrix);
long long elwave_matrix_nonzeros(const elwave_matrix* matrix);

/* Compressed sparse row views; valid until the matrix is destroyed. */
const int* elwave_matrix_row_offsets(const elwave_matrix* matrix);
const int* elwave_matrix_col_indices(const elwave_matrix* matrix);
const double* elwave_matrix_values(const elwave_matrix* matrix);

/* Matrix Market export (coordinate real general, 17 significant digits). */
elwave_status elwave_matrix_write(const elwave_matrix* matrix, const char* path);

/* Spectral condition number: symmetric matrices via eigenvalues, others via
 * singular values. Fails with ELWAVE_ERR_INDEFINITE when not positive
 * definite. */
elwave_status elwave_matrix_condition_number(const elwave_matrix* matrix, double* kappa);

#ifdef __cplusplus
}
#endif

#endif /* ELWAVE_H */
