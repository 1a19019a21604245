#pragma once

#include "thermohand/image.hpp"

#include <span>
#include <vector>

namespace thermohand {

/// Orthonormal 2-D DCT-II coefficients, stored row-major with rows indexed by
/// the vertical frequency v and columns by the horizontal frequency u.
struct DctCoefficients {
  int width = 0;  // number of horizontal frequencies (image width)
  int height = 0; // number of vertical frequencies (image height)
  std::vector<double> values;

  double operator()(int u, int v) const {
    return values[static_cast<std::size_t>(v) * width + u];
  }
  double& operator()(int u, int v) {
    return values[static_cast<std::size_t>(v) * width + u];
  }
};

/// C(u,v) = a(u) a(v) sum_x sum_y f(x,y) cos(pi(2x+1)u/2W) cos(pi(2y+1)v/2H)
/// with a(0) = sqrt(1/N), a(i>0) = sqrt(2/N) per axis. For square inputs
/// W = H = N. Evaluated separably in O(W H (W + H)).
DctCoefficients dct2(const GrayImage& image);

/// Exact inverse of dct2.
GrayImage idct2(const DctCoefficients& coeffs);

enum class ScanOrder { Zigzag, Raster };

/// (row, col) positions of the scan over a rows x cols grid. Zigzag follows
/// the JPEG pattern generalized to rectangles: (0,0), (0,1), (1,0), (2,0),
/// (1,1), (0,2), ...
std::vector<std::pair<int, int>> scan_positions(int rows, int cols,
                                                ScanOrder order);

/// First `count` coefficients in scan order.
std::vector<double> select_coefficients(const DctCoefficients& coeffs,
                                        int count,
                                        ScanOrder order = ScanOrder::Zigzag);

inline std::vector<double> zigzag_select(const DctCoefficients& coeffs,
                                         int count) {
  return select_coefficients(coeffs, count, ScanOrder::Zigzag);
}

} // namespace thermohand
