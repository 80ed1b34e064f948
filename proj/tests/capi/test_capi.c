/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "mulpart/mulpart.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  mulpart_ensemble* u = NULL;
  EXPECT(mulpart_ensemble_create("uniform", &u) == MULPART_OK);
  EXPECT(strcmp(mulpart_ensemble_name(u), "uniform") == 0);

  mulpart_regime reg;
  EXPECT(mulpart_ensemble_regime(u, &reg) == MULPART_OK);
  EXPECT(reg == MULPART_REGIME_ERGODIC_POLE_AT_ONE);

  double om = 0.0;
  EXPECT(mulpart_omega(u, &om) == MULPART_OK);
  EXPECT(fabs(om - M_PI * M_PI / 6.0) < 1e-10);

  double mean = 0.0, var = 0.0;
  EXPECT(mulpart_moments(u, 0.5, &mean, &var) == MULPART_OK);
  EXPECT(mean > 0.0 && var > 0.0);
  EXPECT(mulpart_moments(u, 1.0, &mean, &var) == MULPART_ERR_DOMAIN);
  EXPECT(strlen(mulpart_last_error()) > 0);

  mulpart_tilt t;
  EXPECT(mulpart_solve_tilt(u, 100, &t) == MULPART_OK);
  EXPECT(t.residual <= 1e-8);
  EXPECT(fabs(t.alpha * t.tau - 1.0) < 1e-12);

  mulpart_table* table = NULL;
  EXPECT(mulpart_table_build(u, 10, MULPART_COEFF_AUTO, 1, &table) == MULPART_OK);
  EXPECT(mulpart_table_exact(table) == 1);
  char* a10 = NULL;
  EXPECT(mulpart_table_coefficient(table, 10, &a10) == MULPART_OK);
  EXPECT(a10 && strcmp(a10, "42") == 0);
  mulpart_string_free(a10);

  mulpart_exact* ex = NULL;
  mulpart_rng* rng = NULL;
  EXPECT(mulpart_exact_create(u, table, &ex) == MULPART_OK);
  EXPECT(mulpart_rng_create(7, 0, &rng) == MULPART_OK);
  for (int i = 0; i < 50; ++i) {
    mulpart_partition* p = NULL;
    EXPECT(mulpart_exact_draw(ex, 10, rng, &p) == MULPART_OK);
    EXPECT(mulpart_partition_weight(p) == 10);
    long long parts[16], counts[16];
    size_t len = 0;
    EXPECT(mulpart_partition_counts(p, parts, counts, 16, &len) == MULPART_OK);
    long long w = 0;
    for (size_t j = 0; j < len; ++j) w += parts[j] * counts[j];
    EXPECT(w == 10);
    mulpart_partition_free(p);
  }
  mulpart_partition* p = NULL;
  EXPECT(mulpart_exact_draw(ex, 11, rng, &p) == MULPART_ERR_TABLE);

  mulpart_ensemble* evens = NULL;
  mulpart_rejection* rej = NULL;
  EXPECT(mulpart_ensemble_create("restricted(evens)", &evens) == MULPART_OK);
  EXPECT(mulpart_rejection_create(evens, 7, 50, &rej) == MULPART_OK);
  EXPECT(mulpart_rejection_draw(rej, rng, &p) == MULPART_ERR_BUDGET);
  EXPECT(strstr(mulpart_last_error(), "acceptance rate") != NULL);
  long long attempts = 0;
  EXPECT(mulpart_rejection_stats(rej, &attempts, NULL, NULL) == MULPART_OK);
  EXPECT(attempts == 50);

  mulpart_ensemble* bad = NULL;
  EXPECT(mulpart_ensemble_create("nonsense", &bad) == MULPART_ERR_UNKNOWN_NAME);
  EXPECT(bad == NULL);
  EXPECT(mulpart_ensemble_from_json("{\"catalog\": ", &bad) == MULPART_ERR_CONFIG);
  EXPECT(mulpart_omega(NULL, &om) == MULPART_ERR_PARAM);

  mulpart_ensemble* w2 = NULL;
  EXPECT(mulpart_ensemble_from_json("{\"catalog\": \"weighted\", \"params\": {\"y\": 2}}", &w2) == MULPART_OK);
  EXPECT(mulpart_omega(w2, &om) == MULPART_ERR_REGIME);
  double xs[1] = {0.5 * (1 - 1e-4)};
  char* report = NULL;
  EXPECT(mulpart_variance_ratio(w2, xs, 1, &report) == MULPART_OK);
  EXPECT(report && strstr(report, "\"nonergodic\": true") != NULL);
  mulpart_string_free(report);

  int passed = 0;
  report = NULL;
  EXPECT(mulpart_verify("omega", NULL, 1, 0, &report, &passed) == MULPART_OK);
  EXPECT(passed == 1);
  mulpart_string_free(report);
  EXPECT(mulpart_verify("bogus", NULL, 1, 0, &report, &passed) == MULPART_ERR_UNKNOWN_NAME);

  mulpart_rejection_free(rej);
  mulpart_ensemble_free(evens);
  mulpart_ensemble_free(w2);
  mulpart_exact_free(ex);
  mulpart_rng_free(rng);
  mulpart_table_free(table);
  mulpart_ensemble_free(u);

  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  printf("C interface: all checks passed\n");
  return 0;
}
