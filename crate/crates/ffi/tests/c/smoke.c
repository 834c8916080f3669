#include <math.h>
#include <stdio.h>
#include "subprob.h"

int main(void) {
    const double q[4] = {-4.0, 0.0, 0.0, -1.0};
    const double c[2] = {0.3, 0.5};
    SubprobSolution *sol = NULL;
    if (subprob_trs_solve(q, c, 2, 1e-9, &sol) != SUBPROB_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", subprob_last_error());
        return 1;
    }
    size_t g, l;
    SubprobPointInfo gi, li;
    if (subprob_solution_global(sol, &g) || subprob_solution_local_nonglobal(sol, &l)) return 2;
    if (subprob_solution_point(sol, g, &gi) || subprob_solution_point(sol, l, &li)) return 3;
    if (gi.classification != SUBPROB_CLASSIFICATION_GLOBAL) return 4;
    if (li.classification != SUBPROB_CLASSIFICATION_LOCAL_NON_GLOBAL) return 5;
    if (fabs(li.multiplier - 3.6946984118180) > 1e-10) return 6;
    double x[2];
    if (subprob_solution_point_x(sol, g, x, 2)) return 7;
    if (fabs(x[0] * x[0] + x[1] * x[1] - 1.0) > 1e-10) return 8;
    subprob_solution_free(sol);
    if (subprob_trs_solve(NULL, c, 2, 1e-9, &sol) != SUBPROB_STATUS_NULL_POINTER) return 9;
    printf("ok %s\n", subprob_version());
    return 0;
}
