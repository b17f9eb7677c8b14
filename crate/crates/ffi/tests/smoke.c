#include <math.h>
#include <stdio.h>
#include <string.h>

#include "factored_info.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      const char *msg = fi_last_error_message();                       \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,           \
              msg ? msg : "no message");                               \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  CHECK(fi_abi_version() == FI_ABI_VERSION);

  const char *doc =
      "{\"cardinalities\":[2,2,2,2],\"entries\":["
      "{\"state\":\"0000\",\"prob\":\"1/4\"},{\"state\":\"0101\",\"prob\":\"1/4\"},"
      "{\"state\":\"1010\",\"prob\":\"1/4\"},{\"state\":\"1111\",\"prob\":\"1/4\"}]}";
  FiDistribution *d = NULL;
  CHECK(fi_distribution_from_json(doc, &d) == FI_STATUS_OK);

  double v = 0.0;
  CHECK(fi_block_mutual_information(d, &v) == FI_STATUS_OK);
  CHECK(fabs(v - 2.0 * log(2.0)) < 1e-12);

  FiPairing *pairing = NULL;
  CHECK(fi_pairing_from_json("{\"n\":2,\"match\":[1,2]}", &pairing) == FI_STATUS_OK);
  CHECK(fi_sfmi(d, pairing, &v) == FI_STATUS_OK);
  CHECK(fabs(v - log(2.0)) < 1e-12);

  FiFamily *fam = NULL;
  CHECK(fi_family_from_json("{\"n\":4,\"sets\":[[1,2],[3,4]]}", &fam) == FI_STATUS_OK);
  CHECK(fi_i_lambda(d, fam, &v) == FI_STATUS_OK);
  CHECK(fabs(v) < 1e-12);

  bool maximizer = true;
  CHECK(fi_is_i_maximizer(d, &maximizer) == FI_STATUS_OK);
  CHECK(!maximizer);

  char *json = NULL;
  CHECK(fi_distribution_to_json(d, &json) == FI_STATUS_OK);
  CHECK(strstr(json, "\"1/4\"") != NULL);
  fi_string_free(json);

  FiAtlas *atlas = NULL;
  CHECK(fi_atlas_build(2, 2, pairing, &atlas) == FI_STATUS_OK);
  size_t polytopes = 0, codes = 0;
  CHECK(fi_atlas_counts(atlas, &polytopes, &codes) == FI_STATUS_OK);
  CHECK(polytopes == 4 && codes == 8);
  CHECK(fi_atlas_to_json(atlas, true, &json) == FI_STATUS_OK);
  CHECK(strstr(json, "\"polytopes\"") != NULL);
  fi_string_free(json);

  FiDistribution *bad = NULL;
  CHECK(fi_distribution_from_json("{\"cardinalities\":[2]", &bad) == FI_STATUS_PARSE);
  CHECK(bad == NULL && fi_last_error_message() != NULL);
  CHECK(fi_atlas_build(9, 9, NULL, &atlas) == FI_STATUS_CAP_EXCEEDED);
  CHECK(fi_entropy(NULL, &v) == FI_STATUS_NULL_POINTER);

  fi_atlas_free(atlas);
  fi_family_free(fam);
  fi_pairing_free(pairing);
  fi_distribution_free(d);
  puts("ok");
  return 0;
}
