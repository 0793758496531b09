#include <math.h>
#include <stdio.h>
#include <string.h>

#include "compalg.h"

static int fail(const char *what) {
    const char *msg = compalg_last_error();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    return 1;
}

int main(void) {
    CompalgClass *cls = NULL;
    if (compalg_class_new("elliptic", "formal", &cls) != COMPALG_STATUS_OK) return fail("class");

    CompalgElement *f = NULL, *g = NULL, *r = NULL;
    if (compalg_element_parse(cls, "q^3", 0, &f) != COMPALG_STATUS_OK) return fail("parse f");
    if (compalg_element_parse(cls, "p^3", 0, &g) != COMPALG_STATUS_OK) return fail("parse g");
    if (compalg_element_product(COMPALG_PRODUCT_ALPHA, f, g, &r) != COMPALG_STATUS_OK) return fail("alpha");
    char *s = compalg_element_to_string(r);
    printf("alpha = %s\n", s);
    int ok = strcmp(s, "9*q^2*p^2 - 3/2*hbar^2") == 0;
    compalg_string_free(s);

    CompalgElement *bad = NULL;
    ok = ok && compalg_element_parse(cls, "q^", 0, &bad) == COMPALG_STATUS_PARSE && bad == NULL;

    double angles[4] = {0.0, M_PI / 2, M_PI / 4, 3 * M_PI / 4};
    double value = 0.0;
    ok = ok && compalg_chsh_quantum(angles, &value) == COMPALG_STATUS_OK;
    ok = ok && fabs(fabs(value) - 2.0 * sqrt(2.0)) < 1e-9;
    ok = ok && compalg_chsh_classical_max() == 2.0;

    compalg_element_free(r);
    compalg_element_free(g);
    compalg_element_free(f);
    compalg_class_free(cls);
    puts(ok ? "ok" : "mismatch");
    return ok ? 0 : 1;
}
