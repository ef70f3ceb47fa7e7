#include <math.h>
#include <stdio.h>
#include "latmod.h"

int main(void) {
    LmLattice *e8 = NULL;
    if (lm_lattice_new(LM_LATTICE_KIND_E8, 8, sqrt(0.5), &e8) != LM_STATUS_OK) return 1;
    const double x[8] = {2.3, -3.1, 5.6, 1.2, -4.4, 3.1, 6.7, -2.2};
    const double want[8] = {2, -3, 6, 1, -4, 3, 7, -2};
    double r[8], p[8];
    if (lm_fold(e8, x, 8, r, p) != LM_STATUS_OK) return 2;
    for (int i = 0; i < 8; i++)
        if (fabs(p[i] - want[i]) > 1e-12 || fabs(r[i] + p[i] - x[i]) > 1e-12) return 3;

    size_t count = 0;
    if (lm_relevant_vectors(e8, NULL, 0, &count) != LM_STATUS_OK || count != 240) return 4;
    if (lm_nearest_point(e8, x, 7, p) != LM_STATUS_INVALID_ARGUMENT) return 5;
    if (lm_last_error()[0] == '\0') return 6;
    lm_lattice_free(e8);

    LmLattice *bad = NULL;
    if (lm_lattice_new(LM_LATTICE_KIND_A2, 3, 1.0, &bad) == LM_STATUS_OK || bad != NULL) return 7;
    printf("ok\n");
    return 0;
}
