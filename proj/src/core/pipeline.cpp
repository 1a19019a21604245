#include "thermohand/pipeline.hpp"

#include "thermohand/error.hpp"

#include <string>

namespace thermohand {

std::string_view to_string(Spectrum s) {
  return s == Spectrum::Visible ? "vis" : "th";
}

Spectrum parse_spectrum(std::string_view name) {
  if (name == "vis") return Spectrum::Visible;
  if (name == "th") return Spectrum::Thermal;
  fail(ErrorCode::InvalidArgument,
       "unknown spectrum '" + std::string(name) + "' (vis|th)");
}

std::vector<double> region_features(const GrayImage& image,
                                    const BinaryMask& mask,
                                    const FeatureConfig& config) {
  const NormalizedHand hand = normalize_hand(
      config.region_config.apply_mask ? apply_mask(image, mask) : image, mask,
      config.normalized_size);
  const GrayImage region =
      extract_region(hand, config.region, config.region_config);
  return select_coefficients(dct2(region), config.length, config.order);
}

std::vector<double> visible_features(const GrayImage& vis,
                                     const FeatureConfig& config) {
  return region_features(vis, segment_visible(vis, config.segmentation),
                         config);
}

std::vector<double> thermal_features(const Acquisition& acq,
                                     const FeatureConfig& config) {
  SimilarityTransform t;
  if (acq.vis_to_th) {
    t = *acq.vis_to_th;
  } else {
    const BinaryMask vis_mask = segment_visible(acq.vis, config.segmentation);
    t = register_masks(vis_mask, acq.th, SimilarityTransform::identity(),
                       config.registration)
            .transform;
  }
  const ThermalSegmentation seg =
      segment_thermal(acq.vis, acq.th, t, config.segmentation);
  return region_features(seg.masked_th, seg.th_mask, config);
}

std::vector<double> spectrum_features(const Acquisition& acq, Spectrum spectrum,
                                      const FeatureConfig& config) {
  return spectrum == Spectrum::Visible ? visible_features(acq.vis, config)
                                       : thermal_features(acq, config);
}

} // namespace thermohand
