/* Exercises the C interface from plain C. */
#include "thermohand/thermohand.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>

static int failures = 0;

#define EXPECT(cond)                                                     \
  do {                                                                   \
    if (!(cond)) {                                                       \
      fprintf(stderr, "%s:%d: failed: %s (%s)\n", __FILE__, __LINE__,    \
              #cond, thand_last_error());                                \
      ++failures;                                                        \
    }                                                                    \
  } while (0)

static void join(char* out, size_t n, const char* dir, const char* name) {
  if (snprintf(out, n, "%s/%s", dir, name) >= (int)n) {
    fprintf(stderr, "path too long: %s/%s\n", dir, name);
    exit(2);
  }
}

static void images_and_masks(const char* dir) {
  double px[4] = {0.1, 0.9, 0.1, 0.9};
  thand_image* img = NULL;
  thand_mask* mask = NULL;
  thand_image* back = NULL;
  double level = 0.0;
  int degenerate = -1;
  char path[512];

  EXPECT(thand_image_create(2, 2, px, &img) == THAND_OK);
  EXPECT(thand_image_width(img) == 2 && thand_image_height(img) == 2);
  EXPECT(thand_otsu(img, 256, &level, &degenerate) == THAND_OK);
  EXPECT(level > 0.1 && level < 0.9 && degenerate == 0);

  thand_segment_options opts;
  thand_segment_options_default(&opts);
  EXPECT(opts.otsu_bins == 256);
  opts.majority_cleanup = 0;
  EXPECT(thand_segment_visible(img, &opts, &mask) == THAND_OK);
  EXPECT(thand_mask_values(mask)[0] == 0 && thand_mask_values(mask)[1] == 1);

  join(path, sizeof path, dir, "img.pgm");
  EXPECT(thand_image_save_pgm(img, path, 16) == THAND_OK);
  EXPECT(thand_image_load_pgm(path, 16, &back) == THAND_OK);
  EXPECT(fabs(thand_image_pixels(back)[1] - 0.9) < 1e-4);
  thand_image_free(back);
  back = NULL;
  EXPECT(thand_image_load_pgm(path, 8, &back) == THAND_ERR_DEPTH_MISMATCH);
  EXPECT(back == NULL);
  EXPECT(strlen(thand_last_error()) > 0);

  join(path, sizeof path, dir, "missing.pgm");
  EXPECT(thand_image_load_pgm(path, 8, &back) == THAND_ERR_MISSING_FILE);
  EXPECT(strlen(thand_status_name(THAND_ERR_MISSING_FILE)) > 0);

  double dice = 0.0;
  EXPECT(thand_mask_dice(mask, mask, &dice) == THAND_OK && dice == 1.0);

  thand_transform t = {0.25, 3.0, -2.0, 1.05}, r;
  join(path, sizeof path, dir, "t.txt");
  EXPECT(thand_transform_write(path, &t) == THAND_OK);
  EXPECT(thand_transform_read(path, &r) == THAND_OK);
  EXPECT(r.rotation == t.rotation && r.dx == t.dx && r.dy == t.dy && r.scale == t.scale);

  EXPECT(thand_image_create(0, 2, px, &back) == THAND_ERR_INVALID_ARGUMENT);
  EXPECT(thand_otsu(NULL, 256, &level, &degenerate) == THAND_ERR_INVALID_ARGUMENT);

  thand_image_free(img);
  thand_mask_free(mask);
  thand_image_free(NULL);
  thand_mask_free(NULL);
}

static void dataset_to_scores(const char* dir) {
  char config[512], data[512], manifest[512], feats[512], model_path[512];
  char pipeline[512], report[512], scores[512], vis[512], th[512], fused[512];
  join(config, sizeof config, dir, "synthetic.toml");
  join(data, sizeof data, dir, "data");
  join(manifest, sizeof manifest, data, "manifest.csv");
  join(feats, sizeof feats, dir, "features.csv");
  join(model_path, sizeof model_path, dir, "model.json");
  join(pipeline, sizeof pipeline, dir, "pipeline.toml");
  join(report, sizeof report, dir, "report.csv");
  join(scores, sizeof scores, dir, "scores");
  join(vis, sizeof vis, scores, "vis_scores.csv");
  join(th, sizeof th, scores, "th_scores.csv");
  join(fused, sizeof fused, dir, "fused.csv");

  FILE* f = fopen(config, "w");
  fputs("[synthetic]\nnum_users = 4\nsessions = 5\nsamples_per_session = 2\n"
        "image_size = 128\nseed = 7\n", f);
  fclose(f);
  f = fopen(pipeline, "w");
  fputs("[pipeline]\nfeature_lengths = [40]\nfusion_rules = [\"mean\"]\n", f);
  fclose(f);

  size_t count = 0;
  EXPECT(thand_generate(config, data, &count) == THAND_OK);
  EXPECT(count == 40);

  thand_extract_options opts;
  thand_extract_options_default(&opts);
  opts.region = "hand";
  opts.spectrum = "vis";
  opts.length = 40;
  thand_features* features = NULL;
  EXPECT(thand_extract(manifest, &opts, &features) == THAND_OK);
  EXPECT(thand_features_count(features) == 40);
  EXPECT(thand_features_length(features) == 40);
  EXPECT(thand_features_save(features, feats) == THAND_OK);

  thand_model* model = NULL;
  EXPECT(thand_train(features, 0.9, 5, &model) == THAND_OK);
  EXPECT(thand_model_feature_length(model) == 40);
  EXPECT(thand_model_selected_count(model) > 0);
  EXPECT(thand_model_save(model, model_path) == THAND_OK);
  thand_model* loaded = NULL;
  EXPECT(thand_model_load(model_path, &loaded) == THAND_OK);
  EXPECT(thand_model_selected_count(loaded) == thand_model_selected_count(model));

  size_t row = 0;
  int user = 0, session = 0, sample = 0;
  const double* values = NULL;
  EXPECT(thand_features_find(features, 3, 4, 1, &row) == THAND_OK);
  EXPECT(thand_features_row(features, row, &user, &session, &sample, &values) == THAND_OK);
  EXPECT(user == 3 && session == 4 && sample == 1);

  size_t n = 0;
  EXPECT(thand_identify(loaded, features, 5, -1, values, 40, NULL, NULL, 0, &n) == THAND_OK);
  EXPECT(n == 4);
  int ids[4];
  double sc[4];
  EXPECT(thand_identify(loaded, features, 5, -1, values, 40, ids, sc, 4, &n) == THAND_OK);
  EXPECT(ids[0] == 3);
  EXPECT(sc[0] <= sc[1] && sc[1] <= sc[2]);
  EXPECT(thand_identify(loaded, features, 5, -1, values, 40, ids, sc, 2, &n) ==
         THAND_ERR_INVALID_ARGUMENT);
  EXPECT(thand_identify(loaded, features, 5, -1, values, 39, ids, sc, 4, &n) ==
         THAND_ERR_DIMENSION_MISMATCH);

  EXPECT(thand_evaluate(manifest, pipeline, report, NULL, scores) == THAND_OK);
  thand_scores* sv = NULL;
  thand_scores* st = NULL;
  thand_scores* out = NULL;
  EXPECT(thand_scores_load(vis, 0, &sv) == THAND_OK);
  EXPECT(thand_scores_load(th, 0, &st) == THAND_OK);
  EXPECT(thand_scores_probes(sv) == 20 && thand_scores_classes(sv) == 4);
  EXPECT(thand_fuse(sv, st, "weighted", 0.0, "none", &out) == THAND_OK);
  EXPECT(thand_scores_higher_is_better(out) == 0);
  EXPECT(thand_scores_save(out, fused) == THAND_OK);
  thand_scores_free(out);
  out = NULL;
  EXPECT(thand_fuse(sv, st, "product", 0.0, "none", &out) == THAND_OK);
  EXPECT(thand_scores_higher_is_better(out) == 1);
  thand_scores_free(out);
  out = NULL;
  EXPECT(thand_fuse(sv, st, "sum", 0.0, "none", &out) == THAND_ERR_INVALID_ARGUMENT);
  EXPECT(out == NULL);

  thand_scores_free(sv);
  thand_scores_free(st);
  thand_model_free(model);
  thand_model_free(loaded);
  thand_features_free(features);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : "capi_work";
  mkdir(dir, 0755);
  printf("thermohand %s\n", thand_version());
  images_and_masks(dir);
  dataset_to_scores(dir);
  if (failures) {
    printf("%d check(s) failed\n", failures);
    return 1;
  }
  printf("all checks passed\n");
  return 0;
}
