#include <stdio.h>
#include <string.h>

#include "pragmatic_rsa.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      const char *msg = prsa_last_error_message();                     \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,   \
              msg ? msg : "no error");                                 \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  PrsaTaxonomy *tax = NULL;
  CHECK(prsa_taxonomy_new(&tax) == PRSA_STATUS_OK);

  char *cat = NULL;
  CHECK(prsa_hypernym_of(tax, "bear", &cat) == PRSA_STATUS_OK);
  CHECK(strcmp(cat, "animal") == 0);
  prsa_string_free(cat);
  CHECK(prsa_hypernym_of(tax, "spaceship", &cat) == PRSA_STATUS_CONFIG_ERROR);
  CHECK(strstr(prsa_last_error_message(), "spaceship") != NULL);

  PrsaConfig *cfg = NULL;
  CHECK(prsa_config_from_toml("n_pairs = 100\ndisparity = \"none\"\n", &cfg) ==
        PRSA_STATUS_OK);
  PrsaDataset *ds = NULL;
  CHECK(prsa_dataset_generate(cfg, tax, &ds) == PRSA_STATUS_OK);
  size_t train = 0, val = 0, test = 0;
  CHECK(prsa_dataset_sizes(ds, &train, &val, &test) == PRSA_STATUS_OK);
  CHECK(train == 80 && val == 10 && test == 10);

  PrsaAccuracy acc;
  CHECK(prsa_evaluate(PRSA_SPEAKER_RATIONAL, ds, cfg, NULL, tax, 0, &acc) ==
        PRSA_STATUS_OK);
  CHECK(acc.combined == 1.0);
  CHECK(prsa_evaluate(PRSA_SPEAKER_PRAGMATIC, ds, cfg, NULL, tax, 0, &acc) ==
        PRSA_STATUS_CONFIG_ERROR);

  prsa_dataset_free(ds);
  prsa_config_free(cfg);
  prsa_taxonomy_free(tax);
  printf("ok\n");
  return 0;
}
