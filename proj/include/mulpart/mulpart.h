/* C interface to the mulpart library. Every call returns a status code; on
   failure mulpart_last_error() holds a message for the calling thread.
   Strings returned through char** are owned by the caller and released with
   mulpart_string_free. */
#ifndef MULPART_H
#define MULPART_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MULPART_API __declspec(dllexport)
#else
#define MULPART_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mulpart_status {
  MULPART_OK = 0,
  MULPART_ERR_PARAM = 1,
  MULPART_ERR_DOMAIN = 2,
  MULPART_ERR_REGIME = 3,
  MULPART_ERR_NEGATIVE_COEFFICIENT = 4,
  MULPART_ERR_QUADRATURE = 5,
  MULPART_ERR_CONVERGENCE = 6,
  MULPART_ERR_TRUNCATION = 7,
  MULPART_ERR_TAIL = 8,
  MULPART_ERR_BUDGET = 9,
  MULPART_ERR_TABLE = 10,
  MULPART_ERR_FIT_UNSTABLE = 11,
  MULPART_ERR_UNKNOWN_NAME = 12,
  MULPART_ERR_CONFIG = 13,
  MULPART_ERR_IO = 14,
  MULPART_ERR_INTERNAL = 15
} mulpart_status;

typedef enum mulpart_regime {
  MULPART_REGIME_ERGODIC_POLE_AT_ONE = 0,
  MULPART_REGIME_ERGODIC_SUPERCRITICAL = 1,
  MULPART_REGIME_ESSENTIAL_SUBCRITICAL = 2,
  MULPART_REGIME_NONERGODIC = 3,
  MULPART_REGIME_OUT_OF_SCOPE = 4
} mulpart_regime;

typedef enum mulpart_coeff_mode {
  MULPART_COEFF_AUTO = 0,
  MULPART_COEFF_EXACT = 1,
  MULPART_COEFF_FLOAT = 2
} mulpart_coeff_mode;

typedef struct mulpart_ensemble mulpart_ensemble;
typedef struct mulpart_table mulpart_table;
typedef struct mulpart_rng mulpart_rng;
typedef struct mulpart_partition mulpart_partition;
typedef struct mulpart_rejection mulpart_rejection;
typedef struct mulpart_exact mulpart_exact;

typedef struct mulpart_tilt {
  double x;
  double tau;
  double alpha;
  double mean;
  double variance;
  double residual;
  int iterations;
} mulpart_tilt;

MULPART_API const char* mulpart_last_error(void);
MULPART_API const char* mulpart_status_name(mulpart_status s);
MULPART_API const char* mulpart_regime_name(mulpart_regime r);
MULPART_API void mulpart_string_free(char* s);

/* ensembles */
MULPART_API mulpart_status mulpart_ensemble_create(const char* name_or_path, mulpart_ensemble** out);
MULPART_API mulpart_status mulpart_ensemble_from_json(const char* json_text, mulpart_ensemble** out);
MULPART_API void mulpart_ensemble_free(mulpart_ensemble* e);
MULPART_API const char* mulpart_ensemble_name(const mulpart_ensemble* e);
MULPART_API mulpart_status mulpart_ensemble_regime(const mulpart_ensemble* e, mulpart_regime* out);
MULPART_API mulpart_status mulpart_ensemble_rho(const mulpart_ensemble* e, double* out);
/* Values from a JSON config's "numerics" block (defaults otherwise). */
MULPART_API mulpart_status mulpart_ensemble_numerics(const mulpart_ensemble* e, double* eps, double* hit_threshold,
                                                     long long* budget, mulpart_coeff_mode* mode);

/* asymptotics */
MULPART_API mulpart_status mulpart_moments(const mulpart_ensemble* e, double x, double* mean, double* var);
MULPART_API mulpart_status mulpart_omega(const mulpart_ensemble* e, double* out);
MULPART_API mulpart_status mulpart_sigma_sq(const mulpart_ensemble* e, double* out);
MULPART_API mulpart_status mulpart_limit_shape(const mulpart_ensemble* e, double t, double* out);
/* Fills grid_size points on (0, t_max]. */
MULPART_API mulpart_status mulpart_shape_curve(const mulpart_ensemble* e, double t_max, int grid_size, double* t,
                                               double* phi);
MULPART_API mulpart_status mulpart_solve_tilt(const mulpart_ensemble* e, long long n, mulpart_tilt* out);

/* coefficients */
MULPART_API mulpart_status mulpart_table_build(const mulpart_ensemble* e, long long n_max, mulpart_coeff_mode mode,
                                               int retain_prefix_tables, mulpart_table** out);
MULPART_API void mulpart_table_free(mulpart_table* t);
MULPART_API int mulpart_table_exact(const mulpart_table* t);
/* a_m as text ("42", "73/24" or 17 significant digits). */
MULPART_API mulpart_status mulpart_table_coefficient(const mulpart_table* t, long long m, char** out);
MULPART_API mulpart_status mulpart_point_mass(const mulpart_ensemble* e, double x, long long m,
                                              const mulpart_table* t, double* out);

/* random streams and partitions */
MULPART_API mulpart_status mulpart_rng_create(uint64_t seed, uint64_t stream, mulpart_rng** out);
MULPART_API void mulpart_rng_free(mulpart_rng* r);

MULPART_API void mulpart_partition_free(mulpart_partition* p);
MULPART_API long long mulpart_partition_weight(const mulpart_partition* p);
MULPART_API long long mulpart_partition_num_parts(const mulpart_partition* p);
/* Distinct part sizes in ascending order with their counts. *len receives the
   number of distinct parts; nothing is written past cap. */
MULPART_API mulpart_status mulpart_partition_counts(const mulpart_partition* p, long long* parts, long long* counts,
                                                    size_t cap, size_t* len);
MULPART_API mulpart_status mulpart_partition_json(const mulpart_partition* p, uint64_t seed, uint64_t stream,
                                                  char** out);

/* samplers */
MULPART_API mulpart_status mulpart_sample_grand(const mulpart_ensemble* e, double x, mulpart_rng* rng,
                                                mulpart_partition** out);
/* budget <= 0 selects the default 20 ceil(n^gamma). */
MULPART_API mulpart_status mulpart_rejection_create(const mulpart_ensemble* e, long long n, long long budget,
                                                    mulpart_rejection** out);
MULPART_API void mulpart_rejection_free(mulpart_rejection* s);
MULPART_API mulpart_status mulpart_rejection_draw(mulpart_rejection* s, mulpart_rng* rng, mulpart_partition** out);
MULPART_API mulpart_status mulpart_rejection_stats(const mulpart_rejection* s, long long* attempts,
                                                   long long* accepted, long long* budget);
MULPART_API mulpart_status mulpart_exact_create(const mulpart_ensemble* e, const mulpart_table* t,
                                                mulpart_exact** out);
MULPART_API void mulpart_exact_free(mulpart_exact* s);
MULPART_API mulpart_status mulpart_exact_draw(const mulpart_exact* s, long long n, mulpart_rng* rng,
                                              mulpart_partition** out);

/* diagnostics; reports are JSON documents */
MULPART_API mulpart_status mulpart_concentration(const mulpart_ensemble* e, long long n, int replicas, uint64_t seed,
                                                 double eps, double hit_threshold, char** report_json,
                                                 char** sup_csv);
MULPART_API mulpart_status mulpart_variance_ratio(const mulpart_ensemble* e, const double* x, size_t len,
                                                  char** report_json);
MULPART_API mulpart_status mulpart_degenerate_shape(const mulpart_ensemble* e, long long n, int replicas,
                                                    uint64_t seed, char** report_json);

/* Acceptance suites by name ("all" runs every suite). ensemble may be NULL;
   n <= 0 keeps the suite default. *all_passed is 1 when every criterion passed. */
MULPART_API mulpart_status mulpart_verify(const char* suite, const mulpart_ensemble* e, uint64_t seed, long long n,
                                          char** report_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
