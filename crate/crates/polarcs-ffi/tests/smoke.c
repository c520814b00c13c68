/*
 * Compile-and-run smoke test for the generated header and static library.
 * Exercises the full lifecycle a C consumer goes through: build a system,
 * measure a sparse vector, recover it, clean up. Exits 0 on success.
 */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "polarcs.h"

static int check(polarcs_status st, const char *what) {
    if (st != POLARCS_OK) {
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)st,
                polarcs_last_error_message());
        return 1;
    }
    return 0;
}

int main(void) {
    if (strlen(polarcs_version()) == 0) {
        fprintf(stderr, "empty version string\n");
        return 1;
    }

    polarcs_transform *t = NULL;
    if (check(polarcs_transform_new(3, 1.0 / sqrt(2.0), &t), "transform_new"))
        return 1;
    if (polarcs_transform_size(t) != 8) {
        fprintf(stderr, "unexpected block size\n");
        return 1;
    }
    double x[8] = {1, 0, 0, 0, 0, 0, 0, 1};
    double y[8] = {0};
    if (check(polarcs_transform_apply(t, x, 8, y), "transform_apply"))
        return 1;
    polarcs_transform_free(t);

    polarcs_system *s = NULL;
    if (check(polarcs_system_new(4, 1.0 / sqrt(2.0), 0.1, 8, &s), "system_new"))
        return 1;
    size_t m = polarcs_system_block_size(s);
    size_t r = polarcs_system_measurement_count(s);

    double *e = calloc(m, sizeof(double));
    double *yp = calloc(r, sizeof(double));
    double *rec = calloc(m, sizeof(double));
    if (!e || !yp || !rec)
        return 1;
    e[3] = 4.25;
    if (check(polarcs_system_measure(s, e, m, yp), "system_measure"))
        return 1;
    if (check(polarcs_system_recover(s, yp, r, POLARCS_METHOD_L0, rec),
              "system_recover"))
        return 1;
    for (size_t i = 0; i < m; i++) {
        if (fabs(rec[i] - e[i]) > 1e-8) {
            fprintf(stderr, "coordinate %zu: %g vs %g\n", i, rec[i], e[i]);
            return 1;
        }
    }

    /* Misuse must come back as a status, not a crash. */
    if (polarcs_system_measure(s, e, m - 1, yp) != POLARCS_DIMENSION_MISMATCH) {
        fprintf(stderr, "shape misuse not reported\n");
        return 1;
    }

    free(e);
    free(yp);
    free(rec);
    polarcs_system_free(s);
    polarcs_system_free(NULL);

    puts("ok");
    return 0;
}
