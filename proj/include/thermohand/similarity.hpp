#pragma once

#include "thermohand/image.hpp"

#include <filesystem>
#include <iosfwd>

namespace thermohand {

/// Rotation + isotropic scale about the source frame center, then
/// translation:  q = scale * R(rotation) * (p - c) + c + (dx, dy),
/// with c = ((w - 1) / 2, (h - 1) / 2) of the source raster and
/// R(a) = [[cos a, -sin a], [sin a, cos a]] in (x right, y down) coordinates.
struct SimilarityTransform {
  double rotation = 0.0; // radians, kept in (-pi, pi]
  double dx = 0.0;
  double dy = 0.0;
  double scale = 1.0;

  static SimilarityTransform identity() { return {}; }

  /// Checks scale > 0, all fields finite, and wraps the rotation.
  SimilarityTransform normalized() const;

  /// Inverse mapping for the same source/destination frame sizes.
  SimilarityTransform inverse(int src_width, int src_height, int dst_width,
                              int dst_height) const;

  bool operator==(const SimilarityTransform&) const = default;
};

double wrap_angle(double radians);

/// Nearest-neighbour warp of a mask into an out_width x out_height frame.
/// Output pixels whose pre-image falls outside the source are false.
BinaryMask apply_similarity(const BinaryMask& mask,
                            const SimilarityTransform& t, int out_width,
                            int out_height);

/// Text record "rotation_rad dx dy scale"; '#' starts a comment line.
SimilarityTransform read_transform(std::istream& in);
SimilarityTransform read_transform(const std::filesystem::path& path);
void write_transform(std::ostream& out, const SimilarityTransform& t);
void write_transform(const std::filesystem::path& path,
                     const SimilarityTransform& t);

} // namespace thermohand
