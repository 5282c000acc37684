#include <stdio.h>
#include <string.h>

#include "paving.h"

int main(void) {
    PavingProjection *p = NULL;
    if (paving_projection_random(8, 3, 42, &p) != PAVING_STATUS_OK) {
        fprintf(stderr, "random: %s\n", paving_last_error());
        return 1;
    }
    double norm = 0.0;
    int8_t signs[8];
    if (paving_brute_force_min(p, 24, &norm, signs, 8) != PAVING_STATUS_OK) {
        fprintf(stderr, "brute force: %s\n", paving_last_error());
        return 1;
    }
    printf("dim=%zu rank=%zu min=%.6f\n", paving_projection_dim(p), paving_projection_rank(p), norm);
    paving_projection_free(p);

    if (paving_projection_random(8, 3, 42, NULL) != PAVING_STATUS_NULL_POINTER) {
        return 1;
    }

    char *json = NULL;
    if (paving_weaver_certificate_json(8, &json) != PAVING_STATUS_OK) {
        return 1;
    }
    int ok = strstr(json, "FALSIFIES_A") != NULL;
    paving_string_free(json);
    return ok ? 0 : 1;
}
