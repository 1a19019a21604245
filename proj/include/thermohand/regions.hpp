#pragma once

#include "thermohand/image.hpp"

#include <string>
#include <string_view>

namespace thermohand {

/// Geometry that maps a source frame onto the normalized hand frame: rotate
/// about the mask centroid so the principal axis is vertical, crop to the
/// rotated bounding box, and scale the longer box side to the output size
/// (the shorter side is centred with zero padding).
struct HandFrame {
  double rotation = 0.0; // applied to the source, radians
  double center_x = 0.0; // rotation center (mask centroid)
  double center_y = 0.0;
  double box_x0 = 0.0;   // rotated bounding box corner, continuous coords
  double box_y0 = 0.0;
  double scale = 1.0;    // output pixels per source pixel
  double pad_x = 0.0;
  double pad_y = 0.0;
  int out_size = 0;

  /// Source-frame position sampled by output pixel (u, v).
  void source_point(int u, int v, double& x, double& y) const;
};

struct NormalizedHand {
  GrayImage image;
  BinaryMask mask;
  double applied_rotation = 0.0;
  double crop_x = 0.0;
  double crop_y = 0.0;
  HandFrame frame;
};

/// Principal-axis normalization. Requires at least 100 mask pixels and a
/// mask whose covariance eigenvalues differ by more than 1%. The axis is
/// turned by the smallest rotation that makes it vertical, so the result
/// stays upright for hands that start roughly upright.
NormalizedHand normalize_hand(const GrayImage& image, const BinaryMask& mask,
                              int out_size = 128);

HandFrame hand_frame(const BinaryMask& mask, int out_size);

/// Bilinear intensity sampling through a frame.
GrayImage warp_image(const GrayImage& image, const HandFrame& frame);
/// Nearest-neighbour sampling through a frame.
BinaryMask warp_mask(const BinaryMask& mask, const HandFrame& frame);
LabelMap warp_labels(const LabelMap& labels, const HandFrame& frame);

/// Bilinear resize to an arbitrary size (pixel-center aligned).
GrayImage resize_bilinear(const GrayImage& image, int width, int height);

enum class RegionKind { Finger, CentralZone, WholeHand };

std::string_view to_string(RegionKind kind);
RegionKind parse_region(std::string_view name); // finger | central | hand

struct RegionConfig {
  /// Central zone crop, as fractions of the normalized frame.
  double central_row_begin = 0.45;
  double central_row_end = 1.0;
  double central_col_begin = 0.20;
  double central_col_end = 0.80;
  int finger_width = 32;
  int finger_height = 96;
  /// Zero pixels outside the hand (or finger) mask. The whole-hand region is
  /// returned as is, so callers mask before normalizing (region_features
  /// does); the finger and central crops are masked in the normalized frame.
  bool apply_mask = true;
  /// Components smaller than this fraction of the frame are ignored.
  double min_component_fraction = 0.002;
  /// The finger cut is raised by this fraction of the frame height above
  /// the lowest row at which the fingers separate from the palm.
  double palm_line_margin = 0.05;
};

struct FingerSelection {
  BinaryMask component; // index finger pixels in the normalized frame
  int palm_line = 0;    // rows < palm_line were searched
  int components = 0;   // separated finger candidates found
};

/// Index finger: the second component from the thumb side among the finger
/// candidates above the palm line. The thumb is the candidate whose top
/// reaches least far. Fails when fewer than 4 candidates separate.
FingerSelection select_index_finger(const NormalizedHand& hand,
                                    const RegionConfig& config = {});

GrayImage extract_region(const NormalizedHand& hand, RegionKind kind,
                         const RegionConfig& config = {});

/// 4-connected component labelling; returns the number of components and
/// fills `labels` with 1..n (0 = background).
int connected_components(const BinaryMask& mask, std::vector<int>& labels);

} // namespace thermohand
