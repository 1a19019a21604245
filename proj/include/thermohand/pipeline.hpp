#pragma once

#include "thermohand/dct.hpp"
#include "thermohand/image.hpp"
#include "thermohand/regions.hpp"
#include "thermohand/segmentation.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace thermohand {

enum class Spectrum { Visible, Thermal };

std::string_view to_string(Spectrum s); // vis | th
Spectrum parse_spectrum(std::string_view name);

struct FeatureConfig {
  RegionKind region = RegionKind::WholeHand;
  int length = 100;
  int normalized_size = 128;
  ScanOrder order = ScanOrder::Zigzag;
  RegionConfig region_config{};
  SegmentationConfig segmentation{};
  RegistrationConfig registration{};
};

/// One acquisition: a simultaneous VIS/TH pair plus the optional calibration
/// that maps VIS pixels to TH pixels.
struct Acquisition {
  int user_id = 0;
  int session = 0;
  int sample = 0;
  GrayImage vis;
  GrayImage th;
  std::optional<SimilarityTransform> vis_to_th;
};

/// DCT features of an already-segmented image and its mask.
std::vector<double> region_features(const GrayImage& image,
                                    const BinaryMask& mask,
                                    const FeatureConfig& config);

/// VIS segmentation -> normalization -> region -> DCT -> scan prefix.
std::vector<double> visible_features(const GrayImage& vis,
                                     const FeatureConfig& config);

/// Thermal segmentation through the VIS mask. Without a calibration the
/// transform is found by mask registration starting from identity.
std::vector<double> thermal_features(const Acquisition& acq,
                                     const FeatureConfig& config);

std::vector<double> spectrum_features(const Acquisition& acq, Spectrum spectrum,
                                      const FeatureConfig& config);

} // namespace thermohand
