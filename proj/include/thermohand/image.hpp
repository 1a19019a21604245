#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace thermohand {

/// Row-major grayscale raster with intensities nominally in [0,1].
class GrayImage {
public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(int x, int y) const { return data_[index(x, y)]; }
  double& operator()(int x, int y) { return data_[index(x, y)]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool operator==(const GrayImage&) const = default;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Per-pixel hand (true) / background (false) labeling.
class BinaryMask {
public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool operator()(int x, int y) const { return data_[index(x, y)] != 0; }
  void set(int x, int y, bool v) { data_[index(x, y)] = v ? 1 : 0; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::size_t count() const noexcept;

  bool operator==(const BinaryMask&) const = default;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Small-integer label raster (e.g. ground-truth hand parts or connected
/// components); 0 is background.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t operator()(int x, int y) const {
    return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
};

GrayImage apply_mask(const GrayImage& image, const BinaryMask& mask);

/// Dice overlap 2|A∩B|/(|A|+|B|); two empty masks count as identical (1).
double dice(const BinaryMask& a, const BinaryMask& b);

/// Binary P5 graymap. 8-bit samples are single bytes, 16-bit samples are
/// big-endian. Intensities are scaled by 1/(2^depth - 1).
GrayImage load_pgm(const std::filesystem::path& path, int bit_depth);
/// Any maxval; intensities are scaled by 1/maxval.
GrayImage load_pgm(const std::filesystem::path& path);
void save_pgm(const GrayImage& image, const std::filesystem::path& path,
              int bit_depth);

/// Masks travel as 8-bit P5 files, 0 for background and 255 for hand. Any
/// nonzero sample loads as true.
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Quantize to the nearest representable level of the given depth, i.e. the
/// value a save/load cycle would produce.
GrayImage quantize(const GrayImage& image, int bit_depth);

} // namespace thermohand
