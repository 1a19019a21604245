#include "thermohand/similarity.hpp"

#include "thermohand/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace thermohand {

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(radians, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

SimilarityTransform SimilarityTransform::normalized() const {
  require(std::isfinite(rotation) && std::isfinite(dx) && std::isfinite(dy) &&
              std::isfinite(scale),
          ErrorCode::InvalidArgument, "transform fields must be finite");
  require(scale > 0.0, ErrorCode::InvalidArgument,
          "transform scale must be positive");
  SimilarityTransform t = *this;
  t.rotation = wrap_angle(rotation);
  return t;
}

SimilarityTransform SimilarityTransform::inverse(int src_width, int src_height,
                                                 int dst_width,
                                                 int dst_height) const {
  // Forward: q = s R (p - c) + c + d.  For the inverse expressed about the
  // destination center c': p = (1/s) R^T (q - c') + c' + d'.
  const double cx = (src_width - 1) / 2.0, cy = (src_height - 1) / 2.0;
  const double ex = (dst_width - 1) / 2.0, ey = (dst_height - 1) / 2.0;
  const double c = std::cos(-rotation), s = std::sin(-rotation);
  // p at q = c' gives the translation term.
  const double qx = ex - cx - dx, qy = ey - cy - dy;
  const double px = (c * qx - s * qy) / scale + cx;
  const double py = (s * qx + c * qy) / scale + cy;
  SimilarityTransform inv;
  inv.rotation = wrap_angle(-rotation);
  inv.scale = 1.0 / scale;
  inv.dx = px - ex;
  inv.dy = py - ey;
  return inv;
}

BinaryMask apply_similarity(const BinaryMask& mask,
                            const SimilarityTransform& t, int out_width,
                            int out_height) {
  require(out_width > 0 && out_height > 0, ErrorCode::InvalidArgument,
          "apply_similarity: output dimensions must be positive");
  const SimilarityTransform tn = t.normalized();
  BinaryMask out(out_width, out_height);
  const double cx = (mask.width() - 1) / 2.0, cy = (mask.height() - 1) / 2.0;
  const double c = std::cos(tn.rotation), s = std::sin(tn.rotation);
  const double inv_scale = 1.0 / tn.scale;
  for (int y = 0; y < out_height; ++y) {
    const double qy = y - cy - tn.dy;
    for (int x = 0; x < out_width; ++x) {
      const double qx = x - cx - tn.dx;
      // R^T (q - c - d) / s + c
      const double px = (c * qx + s * qy) * inv_scale + cx;
      const double py = (-s * qx + c * qy) * inv_scale + cy;
      const int ix = static_cast<int>(std::lround(px));
      const int iy = static_cast<int>(std::lround(py));
      if (mask.contains(ix, iy) && mask(ix, iy)) out.set(x, y, true);
    }
  }
  return out;
}

SimilarityTransform read_transform(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    SimilarityTransform t;
    std::string extra;
    if (!(fields >> t.rotation >> t.dx >> t.dy >> t.scale) || (fields >> extra))
      fail(ErrorCode::Parse,
           "transform record must hold exactly 4 numbers: '" + line + "'");
    return t.normalized();
  }
  fail(ErrorCode::Parse, "transform record is empty");
}

SimilarityTransform read_transform(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
  return read_transform(in);
}

void write_transform(std::ostream& out, const SimilarityTransform& t) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", t.rotation, t.dx,
                t.dy, t.scale);
  out << "# rotation_rad dx dy scale\n" << buf;
}

void write_transform(const std::filesystem::path& path,
                     const SimilarityTransform& t) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  write_transform(out, t);
}

} // namespace thermohand
