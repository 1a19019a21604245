#include "thermohand/thermohand.h"

#include "thermohand/config.hpp"
#include "thermohand/error.hpp"
#include "thermohand/evaluation.hpp"
#include "thermohand/io.hpp"

#include <algorithm>
#include <fstream>
#include <new>
#include <string>

using namespace thermohand;

struct thand_image {
  GrayImage image;
};
struct thand_mask {
  BinaryMask mask;
};
struct thand_features {
  std::vector<FeatureRow> rows;
};
struct thand_model {
  BdmModel model;
};
struct thand_scores {
  ScoreTable table;
};

namespace {

thread_local std::string last_error;

thand_status record(thand_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs fn, converting exceptions into status codes.
template <class Fn> thand_status guard(Fn&& fn) {
  try {
    fn();
    return THAND_OK;
  } catch (const Error& e) {
    return record(static_cast<thand_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(THAND_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(THAND_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(THAND_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

SimilarityTransform from_c(const thand_transform& t) {
  return {t.rotation, t.dx, t.dy, t.scale};
}

thand_transform to_c(const SimilarityTransform& t) {
  return {t.rotation, t.dx, t.dy, t.scale};
}

SegmentationConfig segmentation(const thand_segment_options* o) {
  SegmentationConfig c;
  if (!o) return c;
  c.otsu_bins = o->otsu_bins;
  if (o->use_manual_threshold) c.manual_threshold = o->manual_threshold;
  c.vis_polarity = o->hand_below ? Polarity::HandBelow : Polarity::HandAbove;
  c.majority_cleanup = o->majority_cleanup != 0;
  return c;
}

} // namespace

extern "C" {

const char* thand_version(void) { return "1.0.0"; }

const char* thand_status_name(thand_status status) {
  switch (status) {
  case THAND_OK: return "ok";
  case THAND_ERR_INVALID_ARGUMENT: return "invalid argument";
  case THAND_ERR_MISSING_FILE: return "missing file";
  case THAND_ERR_MALFORMED_HEADER: return "malformed header";
  case THAND_ERR_DEPTH_MISMATCH: return "bit depth mismatch";
  case THAND_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
  case THAND_ERR_DEGENERATE: return "degenerate input";
  case THAND_ERR_SINGULAR: return "singular model";
  case THAND_ERR_EMPTY_SELECTION: return "empty selection";
  case THAND_ERR_INSUFFICIENT_DATA: return "insufficient data";
  case THAND_ERR_REGION_EXTRACTION: return "region extraction failed";
  case THAND_ERR_PARSE: return "parse error";
  case THAND_ERR_IO: return "i/o error";
  case THAND_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* thand_last_error(void) { return last_error.c_str(); }

// ---- images and masks

thand_status thand_image_create(int width, int height, const double* pixels,
                                thand_image** out) {
  return guard([&] {
    need(pixels, "pixels");
    need(out, "out");
    require(width > 0 && height > 0, ErrorCode::InvalidArgument,
            "image dimensions must be positive");
    std::vector<double> data(pixels, pixels + static_cast<std::size_t>(width) * height);
    *out = new thand_image{GrayImage(width, height, std::move(data))};
  });
}

thand_status thand_image_load_pgm(const char* path, int bit_depth, thand_image** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    GrayImage img = bit_depth == 0 ? load_pgm(path) : load_pgm(path, bit_depth);
    *out = new thand_image{std::move(img)};
  });
}

thand_status thand_image_save_pgm(const thand_image* image, const char* path,
                                  int bit_depth) {
  return guard([&] {
    need(image, "image");
    need(path, "path");
    save_pgm(image->image, path, bit_depth);
  });
}

int thand_image_width(const thand_image* image) { return image ? image->image.width() : 0; }
int thand_image_height(const thand_image* image) { return image ? image->image.height() : 0; }
const double* thand_image_pixels(const thand_image* image) {
  return image ? image->image.data().data() : nullptr;
}
void thand_image_free(thand_image* image) { delete image; }

thand_status thand_mask_create(int width, int height, const uint8_t* values,
                               thand_mask** out) {
  return guard([&] {
    need(values, "values");
    need(out, "out");
    require(width > 0 && height > 0, ErrorCode::InvalidArgument,
            "mask dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> data(n);
    for (std::size_t i = 0; i < n; ++i) data[i] = values[i] != 0;
    *out = new thand_mask{BinaryMask(width, height, std::move(data))};
  });
}

thand_status thand_mask_load(const char* path, thand_mask** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new thand_mask{load_mask(path)};
  });
}

thand_status thand_mask_save(const thand_mask* mask, const char* path) {
  return guard([&] {
    need(mask, "mask");
    need(path, "path");
    save_mask(mask->mask, path);
  });
}

int thand_mask_width(const thand_mask* mask) { return mask ? mask->mask.width() : 0; }
int thand_mask_height(const thand_mask* mask) { return mask ? mask->mask.height() : 0; }
const uint8_t* thand_mask_values(const thand_mask* mask) {
  return mask ? mask->mask.data().data() : nullptr;
}

thand_status thand_mask_dice(const thand_mask* a, const thand_mask* b, double* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = dice(a->mask, b->mask);
  });
}

void thand_mask_free(thand_mask* mask) { delete mask; }

// ---- segmentation and registration

thand_status thand_transform_read(const char* path, thand_transform* out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = to_c(read_transform(std::filesystem::path(path)));
  });
}

thand_status thand_transform_write(const char* path, const thand_transform* t) {
  return guard([&] {
    need(path, "path");
    need(t, "transform");
    write_transform(std::filesystem::path(path), from_c(*t));
  });
}

void thand_segment_options_default(thand_segment_options* out) {
  if (!out) return;
  const SegmentationConfig c;
  out->otsu_bins = c.otsu_bins;
  out->use_manual_threshold = 0;
  out->manual_threshold = 0.5;
  out->hand_below = 0;
  out->majority_cleanup = c.majority_cleanup ? 1 : 0;
}

thand_status thand_otsu(const thand_image* image, int bins, double* level,
                        int* degenerate) {
  return guard([&] {
    need(image, "image");
    need(level, "level");
    const OtsuResult r = otsu_threshold(image->image, bins);
    *level = r.level;
    if (degenerate) *degenerate = r.degenerate ? 1 : 0;
  });
}

thand_status thand_segment_visible(const thand_image* vis,
                                   const thand_segment_options* options,
                                   thand_mask** out) {
  return guard([&] {
    need(vis, "vis");
    need(out, "out");
    *out = new thand_mask{segment_visible(vis->image, segmentation(options))};
  });
}

thand_status thand_segment_thermal(const thand_image* vis, const thand_image* th,
                                   const thand_transform* vis_to_th,
                                   const thand_segment_options* options,
                                   thand_mask** th_mask, thand_image** masked_th) {
  return guard([&] {
    need(vis, "vis");
    need(th, "th");
    need(vis_to_th, "vis_to_th");
    need(th_mask, "th_mask");
    ThermalSegmentation s =
        segment_thermal(vis->image, th->image, from_c(*vis_to_th), segmentation(options));
    auto* m = new thand_mask{std::move(s.th_mask)};
    if (masked_th) {
      try {
        *masked_th = new thand_image{std::move(s.masked_th)};
      } catch (...) {
        delete m;
        throw;
      }
    }
    *th_mask = m;
  });
}

thand_status thand_register(const thand_mask* vis_mask, const thand_image* th,
                            const thand_transform* init, thand_registration* out) {
  return guard([&] {
    need(vis_mask, "vis_mask");
    need(th, "th");
    need(out, "out");
    const SimilarityTransform start = init ? from_c(*init) : SimilarityTransform::identity();
    const RegistrationResult r = register_masks(vis_mask->mask, th->image, start);
    out->transform = to_c(r.transform);
    out->objective = r.objective_value;
    out->initial_objective = r.initial_objective;
    out->iterations = r.iterations;
    out->converged = r.converged ? 1 : 0;
  });
}

// ---- features

void thand_extract_options_default(thand_extract_options* out) {
  if (!out) return;
  out->region = "hand";
  out->spectrum = "vis";
  out->length = 100;
  out->register_thermal = 0;
  out->config_path = nullptr;
}

thand_status thand_extract(const char* manifest_path,
                           const thand_extract_options* options,
                           thand_features** out) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(options, "options");
    need(out, "out");
    need(options->region, "options->region");
    need(options->spectrum, "options->spectrum");
    PipelineConfig pc;
    if (options->config_path)
      pc = pipeline_config(TomlDocument::load(options->config_path));
    FeatureConfig fc = pc.features;
    require(options->length > 0, ErrorCode::InvalidArgument,
            "feature length must be positive");
    fc.length = options->length;
    auto rows = extract_features(read_manifest(manifest_path),
                                 parse_region(options->region),
                                 parse_spectrum(options->spectrum), fc,
                                 options->register_thermal != 0);
    *out = new thand_features{std::move(rows)};
  });
}

thand_status thand_features_load(const char* path, thand_features** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new thand_features{read_features_csv(std::filesystem::path(path))};
  });
}

thand_status thand_features_save(const thand_features* features, const char* path) {
  return guard([&] {
    need(features, "features");
    need(path, "path");
    write_features_csv(std::filesystem::path(path), features->rows);
  });
}

size_t thand_features_count(const thand_features* features) {
  return features ? features->rows.size() : 0;
}

int thand_features_length(const thand_features* features) {
  if (!features || features->rows.empty()) return 0;
  return static_cast<int>(features->rows.front().values.size());
}

thand_status thand_features_row(const thand_features* features, size_t index,
                                int* user_id, int* session, int* sample,
                                const double** values) {
  return guard([&] {
    need(features, "features");
    require(index < features->rows.size(), ErrorCode::InvalidArgument,
            "row index " + std::to_string(index) + " out of range");
    const FeatureRow& r = features->rows[index];
    if (user_id) *user_id = r.user_id;
    if (session) *session = r.session;
    if (sample) *sample = r.sample;
    if (values) *values = r.values.data();
  });
}

thand_status thand_features_find(const thand_features* features, int user_id,
                                 int session, int sample, size_t* index) {
  return guard([&] {
    need(features, "features");
    need(index, "index");
    const auto& rows = features->rows;
    auto it = std::find_if(rows.begin(), rows.end(), [&](const FeatureRow& r) {
      return r.user_id == user_id && r.session == session && r.sample == sample;
    });
    require(it != rows.end(), ErrorCode::InvalidArgument,
            "no feature row for user " + std::to_string(user_id) + " session " +
                std::to_string(session) + " sample " + std::to_string(sample));
    *index = static_cast<size_t>(it - rows.begin());
  });
}

void thand_features_free(thand_features* features) { delete features; }

// ---- matcher

thand_status thand_train(const thand_features* features, double sigma_threshold,
                         int max_per_user, thand_model** out) {
  return guard([&] {
    need(features, "features");
    need(out, "out");
    require(max_per_user >= 0, ErrorCode::InvalidArgument,
            "max_per_user must be non-negative");
    const Gallery g = gallery_from_rows(features->rows, max_per_user);
    *out = new thand_model{train_bdm(g, sigma_threshold)};
  });
}

thand_status thand_model_load(const char* path, thand_model** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::MissingFile, std::string("cannot open ") + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    *out = new thand_model{model_from_json(text)};
  });
}

thand_status thand_model_save(const thand_model* model, const char* path) {
  return guard([&] {
    need(model, "model");
    need(path, "path");
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, std::string("cannot write ") + path);
    out << model_to_json(model->model) << '\n';
    require(out.good(), ErrorCode::Io, std::string("write failed: ") + path);
  });
}

int thand_model_feature_length(const thand_model* model) {
  return model ? static_cast<int>(model->model.feature_length()) : 0;
}

int thand_model_selected_count(const thand_model* model) {
  return model ? static_cast<int>(model->model.selected.size()) : 0;
}

void thand_model_free(thand_model* model) { delete model; }

thand_status thand_identify(const thand_model* model, const thand_features* gallery,
                            int max_per_user, long exclude_row, const double* probe,
                            int length, int* class_ids, double* scores,
                            size_t capacity, size_t* count) {
  return guard([&] {
    need(model, "model");
    need(gallery, "gallery");
    need(probe, "probe");
    need(count, "count");
    require(length > 0, ErrorCode::InvalidArgument, "probe length must be positive");
    std::vector<std::size_t> exclude;
    if (exclude_row >= 0) exclude.push_back(static_cast<std::size_t>(exclude_row));
    const Gallery g = gallery_from_rows(gallery->rows, max_per_user, exclude);
    const std::vector<double> x(probe, probe + length);
    const Identification id = identify(x, g, model->model);

    std::vector<std::size_t> order(id.class_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return id.scores[a] < id.scores[b];
    });
    *count = order.size();
    if (!class_ids) return;
    require(capacity >= order.size(), ErrorCode::InvalidArgument,
            "identify: output capacity " + std::to_string(capacity) + " below " +
                std::to_string(order.size()) + " classes");
    for (std::size_t i = 0; i < order.size(); ++i) {
      class_ids[i] = id.class_ids[order[i]];
      if (scores) scores[i] = id.scores[order[i]];
    }
  });
}

// ---- dataset and evaluation

thand_status thand_generate(const char* config_path, const char* out_dir,
                            size_t* sample_count) {
  return guard([&] {
    need(out_dir, "out_dir");
    SyntheticConfig cfg;
    if (config_path) cfg = synthetic_config(TomlDocument::load(config_path));
    const SyntheticDataset ds = generate_dataset(cfg);
    write_dataset(ds, out_dir);
    if (sample_count) *sample_count = ds.samples.size();
  });
}

thand_status thand_evaluate(const char* manifest_path, const char* config_path,
                            const char* report_path, const char* sweep_path,
                            const char* scores_dir) {
  return guard([&] {
    need(manifest_path, "manifest_path");
    need(report_path, "report_path");
    PipelineConfig pc;
    if (config_path) pc = pipeline_config(TomlDocument::load(config_path));
    const auto data = load_acquisitions(read_manifest(manifest_path));
    const EvaluationReport report = run_evaluation(data, pc);

    auto open = [](const std::filesystem::path& p) {
      std::ofstream out(p, std::ios::binary);
      require(out.good(), ErrorCode::Io, "cannot write " + p.string());
      return out;
    };
    {
      auto out = open(report_path);
      write_report_csv(out, report);
    }
    if (sweep_path) {
      require(!report.sweep.empty(), ErrorCode::InvalidArgument,
              "a sweep file needs pipeline.alpha_grid and both spectra");
      auto out = open(sweep_path);
      write_sweep_csv(out, report.sweep);
    }
    if (scores_dir) {
      const std::filesystem::path dir(scores_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      require(!ec, ErrorCode::Io, "cannot create " + dir.string());
      ScoreTable vis, th;
      std::vector<TruthEntry> truth;
      score_tables(report, vis, th, truth);
      write_score_csv(dir / "vis_scores.csv", vis);
      write_score_csv(dir / "th_scores.csv", th);
      auto out = open(dir / "truth.csv");
      write_truth_csv(out, truth);
    }
  });
}

// ---- fusion

thand_status thand_scores_load(const char* path, int higher_is_better,
                               thand_scores** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    const ScorePolarity pol =
        higher_is_better ? ScorePolarity::HigherIsBetter : ScorePolarity::LowerIsBetter;
    *out = new thand_scores{read_score_csv(std::filesystem::path(path), pol)};
  });
}

thand_status thand_scores_save(const thand_scores* scores, const char* path) {
  return guard([&] {
    need(scores, "scores");
    need(path, "path");
    write_score_csv(std::filesystem::path(path), scores->table);
  });
}

int thand_scores_probes(const thand_scores* scores) {
  return scores ? scores->table.matrix.probes : 0;
}
int thand_scores_classes(const thand_scores* scores) {
  return scores ? scores->table.matrix.classes : 0;
}
int thand_scores_higher_is_better(const thand_scores* scores) {
  return scores && scores->table.matrix.polarity == ScorePolarity::HigherIsBetter;
}
void thand_scores_free(thand_scores* scores) { delete scores; }

thand_status thand_fuse(const thand_scores* vis, const thand_scores* th,
                        const char* rule, double alpha, const char* normalization,
                        thand_scores** out) {
  return guard([&] {
    need(vis, "vis");
    need(th, "th");
    need(rule, "rule");
    need(out, "out");
    const Normalization n = parse_normalization(normalization ? normalization : "none");
    *out = new thand_scores{fuse_tables(vis->table, th->table, parse_rule(rule), alpha, n)};
  });
}

thand_status thand_fuse_sweep(const thand_scores* vis, const thand_scores* th,
                              const char* truth_path, const char* grid,
                              const char* normalization, const char* out_path) {
  return guard([&] {
    need(vis, "vis");
    need(th, "th");
    need(truth_path, "truth_path");
    need(grid, "grid");
    need(out_path, "out_path");
    const Normalization n = parse_normalization(normalization ? normalization : "none");
    const auto truth = read_truth_csv(std::filesystem::path(truth_path));
    const auto alphas = parse_grid(grid);
    const auto rows = sweep_tables(vis->table, th->table, truth, alphas, n);
    std::ofstream out(out_path, std::ios::binary);
    require(out.good(), ErrorCode::Io, std::string("cannot write ") + out_path);
    write_sweep_csv(out, rows);
    require(out.good(), ErrorCode::Io, std::string("write failed: ") + out_path);
  });
}

} // extern "C"
