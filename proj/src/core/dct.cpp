#include "thermohand/dct.hpp"

#include "thermohand/error.hpp"

#include <cmath>
#include <numbers>

namespace thermohand {

namespace {

// basis[k * n + i] = a(k) cos(pi (2i + 1) k / 2n)
std::vector<double> cosine_basis(int n) {
  std::vector<double> basis(static_cast<std::size_t>(n) * n);
  const double a0 = std::sqrt(1.0 / n), ak = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      basis[static_cast<std::size_t>(k) * n + i] =
          (k == 0 ? a0 : ak) *
          std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
  return basis;
}

} // namespace

DctCoefficients dct2(const GrayImage& image) {
  require(!image.empty(), ErrorCode::InvalidArgument, "dct2: empty image");
  const int w = image.width(), h = image.height();
  const auto bx = cosine_basis(w);
  const auto by = cosine_basis(h);

  // Rows first: tmp(u, y) = sum_x f(x, y) bx(u, x).
  std::vector<double> tmp(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int u = 0; u < w; ++u) {
      double s = 0.0;
      for (int x = 0; x < w; ++x)
        s += image(x, y) * bx[static_cast<std::size_t>(u) * w + x];
      tmp[static_cast<std::size_t>(y) * w + u] = s;
    }

  DctCoefficients out{w, h, std::vector<double>(tmp.size(), 0.0)};
  for (int v = 0; v < h; ++v)
    for (int y = 0; y < h; ++y) {
      const double b = by[static_cast<std::size_t>(v) * h + y];
      for (int u = 0; u < w; ++u)
        out(u, v) += b * tmp[static_cast<std::size_t>(y) * w + u];
    }
  return out;
}

GrayImage idct2(const DctCoefficients& coeffs) {
  const int w = coeffs.width, h = coeffs.height;
  require(w > 0 && h > 0 &&
              coeffs.values.size() == static_cast<std::size_t>(w) * h,
          ErrorCode::InvalidArgument, "idct2: malformed coefficient matrix");
  const auto bx = cosine_basis(w);
  const auto by = cosine_basis(h);

  // tmp(u, y) = sum_v C(u, v) by(v, y)
  std::vector<double> tmp(static_cast<std::size_t>(w) * h, 0.0);
  for (int v = 0; v < h; ++v)
    for (int y = 0; y < h; ++y) {
      const double b = by[static_cast<std::size_t>(v) * h + y];
      for (int u = 0; u < w; ++u)
        tmp[static_cast<std::size_t>(y) * w + u] += b * coeffs(u, v);
    }

  std::vector<double> px(tmp.size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int u = 0; u < w; ++u)
        s += tmp[static_cast<std::size_t>(y) * w + u] *
             bx[static_cast<std::size_t>(u) * w + x];
      px[static_cast<std::size_t>(y) * w + x] = s;
    }
  return GrayImage(w, h, std::move(px));
}

std::vector<std::pair<int, int>> scan_positions(int rows, int cols,
                                                ScanOrder order) {
  std::vector<std::pair<int, int>> pos;
  pos.reserve(static_cast<std::size_t>(rows) * cols);
  if (order == ScanOrder::Raster) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) pos.emplace_back(r, c);
    return pos;
  }
  for (int d = 0; d <= rows + cols - 2; ++d) {
    const int r_lo = std::max(0, d - (cols - 1));
    const int r_hi = std::min(d, rows - 1);
    if (d % 2 == 1) {
      for (int r = r_lo; r <= r_hi; ++r) pos.emplace_back(r, d - r);
    } else {
      for (int r = r_hi; r >= r_lo; --r) pos.emplace_back(r, d - r);
    }
  }
  return pos;
}

std::vector<double> select_coefficients(const DctCoefficients& coeffs,
                                        int count, ScanOrder order) {
  const long total = static_cast<long>(coeffs.width) * coeffs.height;
  require(count > 0, ErrorCode::InvalidArgument,
          "feature length must be positive");
  require(count <= total, ErrorCode::InvalidArgument,
          "feature length " + std::to_string(count) + " exceeds the " +
              std::to_string(total) + " available coefficients");
  const auto pos = scan_positions(coeffs.height, coeffs.width, order);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto [r, c] = pos[static_cast<std::size_t>(i)];
    out.push_back(coeffs(c, r));
  }
  return out;
}

} // namespace thermohand
