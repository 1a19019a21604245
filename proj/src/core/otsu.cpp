#include "thermohand/otsu.hpp"

#include "thermohand/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thermohand {

int otsu_split(std::span<const std::uint64_t> histogram) {
  const int bins = static_cast<int>(histogram.size());
  require(bins >= 2, ErrorCode::InvalidArgument, "otsu: need at least 2 bins");

  std::uint64_t total = 0, total_sum = 0;
  for (int k = 0; k < bins; ++k) {
    total += histogram[k];
    total_sum += histogram[k] * static_cast<std::uint64_t>(k);
  }
  require(total > 0, ErrorCode::InvalidArgument, "otsu: empty histogram");

  // Cumulative counts stay integral, so every split's score is evaluated from
  // exact class sizes and sums.
  const double n = static_cast<double>(total);
  std::uint64_t n0 = 0, s0 = 0;
  double best = 0.0;
  int best_k = -1;
  for (int k = 0; k < bins - 1; ++k) {
    n0 += histogram[k];
    s0 += histogram[k] * static_cast<std::uint64_t>(k);
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const double w0 = static_cast<double>(n0) / n;
    const double w1 = static_cast<double>(n1) / n;
    const double mu0 = static_cast<double>(s0) / static_cast<double>(n0);
    const double mu1 =
        static_cast<double>(total_sum - s0) / static_cast<double>(n1);
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_k = k;
    }
  }
  return best_k;
}

std::vector<std::uint64_t> intensity_histogram(const GrayImage& image,
                                               int bins) {
  require(bins >= 2, ErrorCode::InvalidArgument, "otsu: need at least 2 bins");
  require(!image.empty(), ErrorCode::InvalidArgument, "otsu: empty image");
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(bins), 0);
  for (double v : image.data()) {
    const double c = std::clamp(v, 0.0, 1.0);
    const int b = std::min(static_cast<int>(c * bins), bins - 1);
    ++hist[static_cast<std::size_t>(b)];
  }
  return hist;
}

OtsuResult otsu_threshold(const GrayImage& image, int bins) {
  const auto hist = intensity_histogram(image, bins);
  OtsuResult result;
  result.split_bin = otsu_split(hist);
  if (result.split_bin < 0) {
    double sum = 0.0;
    for (double v : image.data()) sum += v;
    result.level = sum / static_cast<double>(image.size());
    result.degenerate = true;
    return result;
  }
  result.level = static_cast<double>(result.split_bin + 1) / bins;
  return result;
}

BinaryMask binarize(const GrayImage& image, double threshold,
                    Polarity polarity) {
  require(threshold >= 0.0 && threshold <= 1.0, ErrorCode::InvalidArgument,
          "binarize: threshold must lie in [0,1]");
  std::vector<std::uint8_t> bits(image.size());
  auto px = image.data();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = polarity == Polarity::HandAbove ? px[i] > threshold
                                              : px[i] <= threshold;
  }
  return BinaryMask(image.width(), image.height(), std::move(bits));
}

BinaryMask majority_filter(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      int votes = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (mask.contains(x + dx, y + dy) && mask(x + dx, y + dy)) ++votes;
      out.set(x, y, votes >= 5);
    }
  }
  return out;
}

} // namespace thermohand
