#pragma once

#include "thermohand/image.hpp"
#include "thermohand/otsu.hpp"
#include "thermohand/simplex.hpp"
#include "thermohand/similarity.hpp"

#include <functional>
#include <optional>

namespace thermohand {

/// Loss minimized by mask registration, given the warped VIS mask and the
/// binarized thermal frame.
using RegistrationLoss =
    std::function<double(const BinaryMask& warped, const BinaryMask& target)>;

/// 1 - Dice(warped, target).
double dice_loss(const BinaryMask& warped, const BinaryMask& target);

struct RegistrationConfig {
  SimplexSettings simplex{};
  /// Initial simplex offsets: radians, pixels, and log-scale.
  double rotation_step = 0.05;
  double translation_step_px = 3.0;
  double log_scale_step = 0.03;
  /// Extra Nelder-Mead runs restarted from the current best point with a
  /// fresh simplex; stops early once a restart brings no improvement.
  int restarts = 3;
  /// Also run the search from the transform that matches both masks'
  /// centroid, principal axis and area, keeping whichever result is better.
  bool moment_start = true;
  RegistrationLoss loss = dice_loss;
};

struct RegistrationResult {
  SimilarityTransform transform;
  double objective_value = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Searches rotation, translation and scale so the warped VIS mask overlaps
/// the Otsu-binarized thermal frame. Parameters are optimized as
/// (rotation, dx / width, dy / width, log scale).
RegistrationResult register_masks(const BinaryMask& vis_mask,
                                  const GrayImage& th_image,
                                  const SimilarityTransform& init,
                                  const RegistrationConfig& config = {});

struct SegmentationConfig {
  int otsu_bins = 256;
  /// Replaces the Otsu level when set.
  std::optional<double> manual_threshold;
  Polarity vis_polarity = Polarity::HandAbove;
  bool majority_cleanup = true;
};

/// VIS mask: Otsu (or manual) threshold, then the optional 3x3 cleanup.
BinaryMask segment_visible(const GrayImage& vis,
                           const SegmentationConfig& config = {});

struct ThermalSegmentation {
  BinaryMask vis_mask;
  BinaryMask th_mask;
  GrayImage masked_th;
};

/// Segments the thermal frame by transferring the VIS mask through the
/// VIS-to-TH transform, so cold fingers that match the background
/// temperature stay labelled as hand.
ThermalSegmentation segment_thermal(const GrayImage& vis, const GrayImage& th,
                                    const SimilarityTransform& vis_to_th,
                                    const SegmentationConfig& config = {});

} // namespace thermohand
