#pragma once

#include "thermohand/image.hpp"

#include <cstdint>
#include <span>

namespace thermohand {

struct OtsuResult {
  /// Boundary level between the two classes: pixels strictly above it form
  /// the upper class. For a degenerate input this is the mean intensity.
  double level = 0.0;
  /// Last histogram bin of the lower class (-1 when degenerate).
  int split_bin = -1;
  /// No two-class split has positive between-class variance.
  bool degenerate = false;
};

/// Split index maximizing between-class variance over a histogram; bins
/// [0, k] form the lower class. Ties resolve to the lowest k. Returns -1 when
/// every split has zero between-class variance.
int otsu_split(std::span<const std::uint64_t> histogram);

/// Histogram of intensities in [0,1]; bin = min(floor(v * bins), bins - 1).
std::vector<std::uint64_t> intensity_histogram(const GrayImage& image, int bins);

OtsuResult otsu_threshold(const GrayImage& image, int bins = 256);

enum class Polarity { HandAbove, HandBelow };

BinaryMask binarize(const GrayImage& image, double threshold,
                    Polarity polarity = Polarity::HandAbove);

/// One pass of a 3x3 majority vote (pixels outside the frame count as
/// background).
BinaryMask majority_filter(const BinaryMask& mask);

} // namespace thermohand
