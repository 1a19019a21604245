/* C interface to the thermohand library.
 *
 * Every fallible call returns a thand_status; on failure the message is
 * available from thand_last_error() until the next failing call on the same
 * thread. Objects are opaque handles released with their _free function
 * (passing NULL is allowed). Output handles are only written on success.
 */
#ifndef THERMOHAND_H
#define THERMOHAND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(THAND_BUILDING)
#define THAND_API __declspec(dllexport)
#else
#define THAND_API __declspec(dllimport)
#endif
#else
#define THAND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum thand_status {
  THAND_OK = 0,
  THAND_ERR_INVALID_ARGUMENT = 1,
  THAND_ERR_MISSING_FILE = 2,
  THAND_ERR_MALFORMED_HEADER = 3,
  THAND_ERR_DEPTH_MISMATCH = 4,
  THAND_ERR_DIMENSION_MISMATCH = 5,
  THAND_ERR_DEGENERATE = 6,
  THAND_ERR_SINGULAR = 7,
  THAND_ERR_EMPTY_SELECTION = 8,
  THAND_ERR_INSUFFICIENT_DATA = 9,
  THAND_ERR_REGION_EXTRACTION = 10,
  THAND_ERR_PARSE = 11,
  THAND_ERR_IO = 12,
  THAND_ERR_INTERNAL = 100
} thand_status;

THAND_API const char* thand_version(void);
THAND_API const char* thand_status_name(thand_status status);
THAND_API const char* thand_last_error(void);

/* ---- images and masks ---------------------------------------------- */

typedef struct thand_image thand_image;
typedef struct thand_mask thand_mask;

/* Row-major intensities in [0, 1]. */
THAND_API thand_status thand_image_create(int width, int height,
                                          const double* pixels,
                                          thand_image** out);
/* bit_depth 8 or 16 checks the header; 0 accepts any maxval. */
THAND_API thand_status thand_image_load_pgm(const char* path, int bit_depth,
                                            thand_image** out);
THAND_API thand_status thand_image_save_pgm(const thand_image* image,
                                            const char* path, int bit_depth);
THAND_API int thand_image_width(const thand_image* image);
THAND_API int thand_image_height(const thand_image* image);
THAND_API const double* thand_image_pixels(const thand_image* image);
THAND_API void thand_image_free(thand_image* image);

/* Row-major 0/1 values; any nonzero input is true. */
THAND_API thand_status thand_mask_create(int width, int height,
                                         const uint8_t* values,
                                         thand_mask** out);
THAND_API thand_status thand_mask_load(const char* path, thand_mask** out);
THAND_API thand_status thand_mask_save(const thand_mask* mask, const char* path);
THAND_API int thand_mask_width(const thand_mask* mask);
THAND_API int thand_mask_height(const thand_mask* mask);
THAND_API const uint8_t* thand_mask_values(const thand_mask* mask);
THAND_API thand_status thand_mask_dice(const thand_mask* a, const thand_mask* b,
                                       double* out);
THAND_API void thand_mask_free(thand_mask* mask);

/* ---- segmentation and registration --------------------------------- */

/* Maps a VIS pixel p to s * R(rotation) * (p - c) + c + (dx, dy), with c
 * the center of the VIS raster. */
typedef struct thand_transform {
  double rotation;
  double dx;
  double dy;
  double scale;
} thand_transform;

THAND_API thand_status thand_transform_read(const char* path,
                                            thand_transform* out);
THAND_API thand_status thand_transform_write(const char* path,
                                             const thand_transform* t);

typedef struct thand_segment_options {
  int otsu_bins;
  int use_manual_threshold;
  double manual_threshold;
  int hand_below; /* hand darker than background */
  int majority_cleanup;
} thand_segment_options;

THAND_API void thand_segment_options_default(thand_segment_options* out);

THAND_API thand_status thand_otsu(const thand_image* image, int bins,
                                  double* level, int* degenerate);
/* options may be NULL for defaults. */
THAND_API thand_status thand_segment_visible(const thand_image* vis,
                                             const thand_segment_options* options,
                                             thand_mask** out);
THAND_API thand_status thand_segment_thermal(const thand_image* vis,
                                             const thand_image* th,
                                             const thand_transform* vis_to_th,
                                             const thand_segment_options* options,
                                             thand_mask** th_mask,
                                             thand_image** masked_th);

typedef struct thand_registration {
  thand_transform transform;
  double objective;
  double initial_objective;
  int iterations;
  int converged;
} thand_registration;

/* init may be NULL for the identity. */
THAND_API thand_status thand_register(const thand_mask* vis_mask,
                                      const thand_image* th,
                                      const thand_transform* init,
                                      thand_registration* out);

/* ---- features ------------------------------------------------------ */

typedef struct thand_features thand_features;

typedef struct thand_extract_options {
  const char* region;   /* finger | central | hand */
  const char* spectrum; /* vis | th */
  int length;
  /* Register TH frames instead of using stored calibrations. */
  int register_thermal;
  /* Optional pipeline config (segmentation, registration, regions and
   * normalized_size); NULL keeps the defaults. */
  const char* config_path;
} thand_extract_options;

THAND_API void thand_extract_options_default(thand_extract_options* out);

/* Features of every acquisition listed in a manifest. */
THAND_API thand_status thand_extract(const char* manifest_path,
                                     const thand_extract_options* options,
                                     thand_features** out);
THAND_API thand_status thand_features_load(const char* path,
                                           thand_features** out);
THAND_API thand_status thand_features_save(const thand_features* features,
                                           const char* path);
THAND_API size_t thand_features_count(const thand_features* features);
THAND_API int thand_features_length(const thand_features* features);
THAND_API thand_status thand_features_row(const thand_features* features,
                                          size_t index, int* user_id,
                                          int* session, int* sample,
                                          const double** values);
/* Index of the row with the given ids. */
THAND_API thand_status thand_features_find(const thand_features* features,
                                           int user_id, int session, int sample,
                                           size_t* index);
THAND_API void thand_features_free(thand_features* features);

/* ---- matcher ------------------------------------------------------- */

typedef struct thand_model thand_model;

/* Trains on each user's first max_per_user rows (by session, then sample);
 * 0 uses every row. */
THAND_API thand_status thand_train(const thand_features* features,
                                   double sigma_threshold, int max_per_user,
                                   thand_model** out);
THAND_API thand_status thand_model_load(const char* path, thand_model** out);
THAND_API thand_status thand_model_save(const thand_model* model,
                                        const char* path);
THAND_API int thand_model_feature_length(const thand_model* model);
THAND_API int thand_model_selected_count(const thand_model* model);
THAND_API void thand_model_free(thand_model* model);

/* Ranks the gallery classes for one probe, best first (lowest score).
 * The gallery is built like thand_train; exclude_row (or -1) drops one row,
 * e.g. the probe itself. With class_ids == NULL only *count is set;
 * otherwise capacity must be at least the number of classes. */
THAND_API thand_status thand_identify(const thand_model* model,
                                      const thand_features* gallery,
                                      int max_per_user, long exclude_row,
                                      const double* probe, int length,
                                      int* class_ids, double* scores,
                                      size_t capacity, size_t* count);

/* ---- dataset and evaluation ---------------------------------------- */

/* config_path may be NULL for the default synthetic settings. */
THAND_API thand_status thand_generate(const char* config_path,
                                      const char* out_dir,
                                      size_t* sample_count);

/* Runs the train/test protocol over a manifest. sweep_path and scores_dir
 * may be NULL; scores_dir receives vis_scores.csv, th_scores.csv and
 * truth.csv of the first region and feature length. */
THAND_API thand_status thand_evaluate(const char* manifest_path,
                                      const char* config_path,
                                      const char* report_path,
                                      const char* sweep_path,
                                      const char* scores_dir);

/* ---- fusion -------------------------------------------------------- */

typedef struct thand_scores thand_scores;

THAND_API thand_status thand_scores_load(const char* path, int higher_is_better,
                                         thand_scores** out);
THAND_API thand_status thand_scores_save(const thand_scores* scores,
                                         const char* path);
THAND_API int thand_scores_probes(const thand_scores* scores);
THAND_API int thand_scores_classes(const thand_scores* scores);
THAND_API int thand_scores_higher_is_better(const thand_scores* scores);
THAND_API void thand_scores_free(thand_scores* scores);

/* rule: product | mean | median | max | min | vote | weighted.
 * normalization: none | zscore | minmax, applied to both inputs first
 * (product always uses minmax). Fixed rules and vote return
 * higher-is-better scores; weighted keeps the input polarity. */
THAND_API thand_status thand_fuse(const thand_scores* vis,
                                  const thand_scores* th, const char* rule,
                                  double alpha, const char* normalization,
                                  thand_scores** out);

/* Weighted-rule identification rates for each alpha of the grid
 * "start:step:stop", per test of the truth file (tests 1..5). */
THAND_API thand_status thand_fuse_sweep(const thand_scores* vis,
                                        const thand_scores* th,
                                        const char* truth_path,
                                        const char* grid,
                                        const char* normalization,
                                        const char* out_path);

#ifdef __cplusplus
}
#endif

#endif
