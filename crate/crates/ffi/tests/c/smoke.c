#include <stdio.h>
#include <string.h>
#include "freearr.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "line %d: %s failed\n", __LINE__, #cond);  \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  FreearrArrangement *d = NULL;
  CHECK(freearr_catalog_get("D", &d) == FREEARR_STATUS_OK);
  CHECK(freearr_arrangement_dim(d) == 5);
  CHECK(freearr_arrangement_len(d) == 21);

  int64_t chi[6];
  size_t n = 0;
  CHECK(freearr_char_poly(d, chi, 6, &n) == FREEARR_STATUS_OK);
  CHECK(n == 6 && chi[0] == -625 && chi[5] == 1);
  CHECK(freearr_char_poly(d, chi, 2, &n) == FREEARR_STATUS_BUFFER_TOO_SMALL && n == 6);

  bool free_ = false;
  uint32_t exps[5];
  char *cert = NULL;
  CHECK(freearr_is_free(d, &free_, exps, 5, &n, &cert) == FREEARR_STATUS_OK);
  CHECK(free_ && n == 5 && exps[0] == 1 && exps[4] == 5);
  CHECK(cert != NULL && strstr(cert, "\"exponents\"") != NULL);
  freearr_string_free(cert);

  FreearrVerdict v;
  CHECK(freearr_classify(d, FREEARR_CLASS_INDUCTIVE, 1000, &v, NULL) == FREEARR_STATUS_OK);
  CHECK(v == FREEARR_VERDICT_NON_MEMBER);
  CHECK(freearr_classify(d, FREEARR_CLASS_INDUCTIVE, 0, &v, NULL) == FREEARR_STATUS_OK);
  CHECK(v == FREEARR_VERDICT_UNDECIDED);

  FreearrArrangement *bad = NULL;
  CHECK(freearr_arrangement_parse("dim 2\n1 0\n1 2 3\n", false, &bad) == FREEARR_STATUS_PARSE);
  CHECK(bad == NULL);
  CHECK(strstr(freearr_last_error(), "line 3") != NULL);

  freearr_arrangement_free(d);
  puts("ok");
  return 0;
}
