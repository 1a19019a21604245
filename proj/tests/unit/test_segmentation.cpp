#include "doctest.h"
#include "helpers.hpp"

#include "thermohand/segmentation.hpp"

#include <numbers>

using namespace thermohand;
using namespace testing_support;

namespace {

SyntheticSample hand_pair(const SimilarityTransform& vis_to_th,
                          std::array<bool, 5> cold = {}, int user = 1) {
  SyntheticConfig cfg;
  return render_sample(cfg, user_shape(cfg, user), HandPose{}, vis_to_th, 0.0,
                       cold, 99);
}

} // namespace

TEST_SUITE("segmentation") {

TEST_CASE("registration recovers a pure shift") {
  const SimilarityTransform truth{0.0, 5.0, -3.0, 1.0};
  SyntheticSample s = hand_pair(truth);
  RegistrationResult r =
      register_masks(segment_visible(s.vis), s.th, SimilarityTransform::identity());
  CHECK(std::abs(r.transform.dx - 5.0) <= 1.0);
  CHECK(std::abs(r.transform.dy + 3.0) <= 1.0);
  CHECK(std::abs(r.transform.rotation) * 180 / std::numbers::pi <= 0.5);
  CHECK(std::abs(r.transform.scale - 1.0) <= 0.01);
  CHECK(r.objective_value <= r.initial_objective);
}

TEST_CASE("aligned pair stays at identity") {
  SyntheticSample s = hand_pair(SimilarityTransform::identity());
  RegistrationConfig cfg;
  cfg.moment_start = false;
  RegistrationResult r = register_masks(segment_visible(s.vis), s.th,
                                        SimilarityTransform::identity(), cfg);
  CHECK(std::abs(r.transform.dx) <= 1.0);
  CHECK(std::abs(r.transform.dy) <= 1.0);
  CHECK(std::abs(r.transform.rotation) * 180 / std::numbers::pi <= 0.5);
  CHECK(std::abs(r.transform.scale - 1.0) <= 0.01);
  CHECK(r.objective_value <= r.initial_objective);
}

TEST_CASE("iteration count stays within the budget") {
  SyntheticSample s = hand_pair({0.1, 4.0, 2.0, 1.05});
  RegistrationConfig cfg;
  cfg.simplex.max_iterations = 60;
  RegistrationResult r = register_masks(segment_visible(s.vis), s.th,
                                        SimilarityTransform::identity(), cfg);
  CHECK(r.iterations <= 60);
  CHECK(r.objective_value <= r.initial_objective);
}

TEST_CASE("constant thermal frame cannot be registered") {
  SyntheticSample s = hand_pair(SimilarityTransform::identity());
  CHECK(error_code_of([&] {
          register_masks(segment_visible(s.vis), GrayImage(s.th.width(), s.th.height(), 0.4),
                         SimilarityTransform::identity());
        }) == ErrorCode::Degenerate);
  CHECK(error_code_of([&] {
          register_masks(BinaryMask(s.th.width(), s.th.height()), s.th,
                         SimilarityTransform::identity());
        }) != static_cast<ErrorCode>(0));
}

TEST_CASE("identity transform with VIS as TH reduces to masking the Otsu mask") {
  SyntheticSample s = hand_pair(SimilarityTransform::identity());
  SegmentationConfig cfg;
  cfg.majority_cleanup = false;
  ThermalSegmentation seg =
      segment_thermal(s.vis, s.vis, SimilarityTransform::identity(), cfg);
  BinaryMask direct = binarize(s.vis, otsu_threshold(s.vis).level);
  CHECK(seg.th_mask == direct);
  CHECK(seg.masked_th == apply_mask(s.vis, direct));
}

TEST_CASE("warm hand: transferred mask matches direct thermal Otsu") {
  const SimilarityTransform t{0.03, 2.0, -1.0, 1.02};
  SyntheticSample s = hand_pair(t);
  ThermalSegmentation seg = segment_thermal(s.vis, s.th, t);
  BinaryMask direct = binarize(s.th, otsu_threshold(s.th).level);
  CHECK(dice(seg.th_mask, direct) >= 0.98);
}

TEST_CASE("cold fingers stay in the transferred mask") {
  const SimilarityTransform t{-0.02, -3.0, 2.0, 0.98};
  SyntheticSample s = hand_pair(t, {true, true, true, true, true}, 2);
  ThermalSegmentation seg = segment_thermal(s.vis, s.th, t);
  const double ours = dice(seg.th_mask, s.th_mask);
  const double direct = dice(binarize(s.th, otsu_threshold(s.th).level), s.th_mask);
  CHECK(ours >= 0.95);
  CHECK(ours > direct);
}

TEST_CASE("manual threshold and polarity") {
  GrayImage img(4, 1);
  img(0, 0) = 0.1;
  img(1, 0) = 0.3;
  img(2, 0) = 0.6;
  img(3, 0) = 0.9;
  SegmentationConfig cfg;
  cfg.majority_cleanup = false;
  cfg.manual_threshold = 0.5;
  CHECK(segment_visible(img, cfg).count() == 2);
  cfg.vis_polarity = Polarity::HandBelow;
  BinaryMask below = segment_visible(img, cfg);
  CHECK(below(0, 0));
  CHECK(below(1, 0));
  CHECK_FALSE(below(2, 0));
}

}
