#include "thermohand/segmentation.hpp"

#include "thermohand/error.hpp"

#include <cmath>
#include <numbers>

namespace thermohand {

double dice_loss(const BinaryMask& warped, const BinaryMask& target) {
  return 1.0 - dice(warped, target);
}

namespace {

struct ParameterMap {
  double width;

  std::vector<double> to_params(const SimilarityTransform& t) const {
    return {t.rotation, t.dx / width, t.dy / width, std::log(t.scale)};
  }

  SimilarityTransform to_transform(const std::vector<double>& p) const {
    SimilarityTransform t;
    t.rotation = p[0];
    t.dx = p[1] * width;
    t.dy = p[2] * width;
    t.scale = std::exp(p[3]);
    return t;
  }
};

struct Moments {
  double area = 0.0, cx = 0.0, cy = 0.0, angle = 0.0;
};

Moments mask_moments(const BinaryMask& m) {
  Moments out;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m(x, y)) {
        out.area += 1.0;
        sx += x;
        sy += y;
      }
  if (out.area == 0.0) return out;
  out.cx = sx / out.area;
  out.cy = sy / out.area;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m(x, y)) {
        const double ux = x - out.cx, uy = y - out.cy;
        sxx += ux * ux;
        syy += uy * uy;
        sxy += ux * uy;
      }
  out.angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  return out;
}

// Transform that maps the VIS mask's centroid, principal axis and area onto
// the target's.
SimilarityTransform moment_alignment(const BinaryMask& from,
                                     const BinaryMask& to) {
  const Moments a = mask_moments(from), b = mask_moments(to);
  SimilarityTransform t;
  if (a.area == 0.0 || b.area == 0.0) return t;
  t.scale = std::sqrt(b.area / a.area);
  double rot = b.angle - a.angle;
  while (rot > std::numbers::pi / 2) rot -= std::numbers::pi;
  while (rot <= -std::numbers::pi / 2) rot += std::numbers::pi;
  t.rotation = rot;
  const double cx = (from.width() - 1) / 2.0, cy = (from.height() - 1) / 2.0;
  const double px = a.cx - cx, py = a.cy - cy;
  const double c = std::cos(rot), s = std::sin(rot);
  t.dx = b.cx - cx - t.scale * (c * px - s * py);
  t.dy = b.cy - cy - t.scale * (s * px + c * py);
  return t;
}

} // namespace

RegistrationResult register_masks(const BinaryMask& vis_mask,
                                  const GrayImage& th_image,
                                  const SimilarityTransform& init,
                                  const RegistrationConfig& config) {
  require(vis_mask.count() > 0, ErrorCode::InvalidArgument,
          "register_masks: VIS mask has no hand pixels");
  require(!th_image.empty(), ErrorCode::InvalidArgument,
          "register_masks: empty thermal image");
  require(config.loss != nullptr, ErrorCode::InvalidArgument,
          "register_masks: no loss function configured");

  const OtsuResult otsu = otsu_threshold(th_image);
  require(!otsu.degenerate, ErrorCode::Degenerate,
          "register_masks: thermal image is constant, registration undefined");
  const BinaryMask target = binarize(th_image, otsu.level, Polarity::HandAbove);

  const int out_w = th_image.width(), out_h = th_image.height();
  const ParameterMap map{static_cast<double>(vis_mask.width())};

  auto objective = [&](const std::vector<double>& p) {
    const SimilarityTransform t = map.to_transform(p);
    const double v = config.loss(apply_similarity(vis_mask, t, out_w, out_h), target);
    require(std::isfinite(v), ErrorCode::InvalidArgument,
            "register_masks: objective is not finite");
    return v;
  };

  const std::vector<double> steps = {config.rotation_step,
                                     config.translation_step_px / map.width,
                                     config.translation_step_px / map.width,
                                     config.log_scale_step};

  RegistrationResult result;
  std::vector<double> best = map.to_params(init.normalized());
  result.initial_objective = objective(best);
  double best_value = result.initial_objective;

  std::vector<std::vector<double>> starts = {best};
  if (config.moment_start)
    starts.push_back(map.to_params(moment_alignment(vis_mask, target)));

  // All runs share one iteration budget.
  int budget = config.simplex.max_iterations;
  for (const auto& start : starts) {
    std::vector<double> x = start;
    double value = objective(x);
    bool converged = false;
    for (int run = 0; run <= config.restarts && budget > 0; ++run) {
      SimplexSettings settings = config.simplex;
      settings.max_iterations = budget;
      const SimplexResult r = nelder_mead(objective, x, steps, settings);
      budget -= r.iterations;
      result.iterations += r.iterations;
      converged = r.converged;
      const bool improved = r.value < value;
      if (r.value <= value) {
        x = r.x;
        value = r.value;
      }
      if (run > 0 && !improved) break;
    }
    if (&start == &starts.front() || value < best_value) {
      best = x;
      best_value = value;
      result.converged = converged;
    }
  }

  result.transform = map.to_transform(best).normalized();
  result.objective_value = best_value;
  return result;
}

BinaryMask segment_visible(const GrayImage& vis,
                           const SegmentationConfig& config) {
  double level;
  if (config.manual_threshold) {
    level = *config.manual_threshold;
  } else {
    const OtsuResult otsu = otsu_threshold(vis, config.otsu_bins);
    require(!otsu.degenerate, ErrorCode::Degenerate,
            "segment: VIS image is constant, no threshold exists");
    level = otsu.level;
  }
  BinaryMask mask = binarize(vis, level, config.vis_polarity);
  if (config.majority_cleanup) mask = majority_filter(mask);
  return mask;
}

ThermalSegmentation segment_thermal(const GrayImage& vis, const GrayImage& th,
                                    const SimilarityTransform& vis_to_th,
                                    const SegmentationConfig& config) {
  ThermalSegmentation out;
  out.vis_mask = segment_visible(vis, config);
  out.th_mask =
      apply_similarity(out.vis_mask, vis_to_th, th.width(), th.height());
  out.masked_th = apply_mask(th, out.th_mask);
  return out;
}

} // namespace thermohand
