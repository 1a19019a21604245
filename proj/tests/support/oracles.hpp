#pragma once

// Slow reference implementations the library is checked against. They are
// written straight from the defining formulas and share no code with src/.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

// Direct quadruple sum of the orthonormal DCT-II. Result is row-major with
// rows indexed by v (vertical frequency).
inline std::vector<double> dct2_direct(const std::vector<double>& f, int w,
                                       int h) {
  const double pi = std::numbers::pi;
  std::vector<double> c(static_cast<std::size_t>(w) * h, 0.0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const double au = u == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
      const double av = v == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
      double s = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          s += f[static_cast<std::size_t>(y) * w + x] *
               std::cos(pi * (2 * x + 1) * u / (2.0 * w)) *
               std::cos(pi * (2 * y + 1) * v / (2.0 * h));
      c[static_cast<std::size_t>(v) * w + u] = au * av * s;
    }
  return c;
}

// Tries every split k (bins 0..k low, k+1.. high) and keeps the first one
// with the largest between-class variance, compared exactly in integer
// arithmetic: n^2 * var = (n1*s0 - n0*s1)^2 / (n0*n1). -1 if none is
// positive. Counts must stay small enough for 128-bit products.
inline int otsu_exhaustive(const std::vector<std::uint64_t>& hist) {
  using u128 = unsigned __int128;
  const int bins = static_cast<int>(hist.size());
  int best = -1;
  u128 best_num = 0, best_den = 1;
  for (int k = 0; k + 1 < bins; ++k) {
    std::uint64_t n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (int i = 0; i < bins; ++i) {
      if (i <= k) {
        n0 += hist[i];
        s0 += hist[i] * static_cast<std::uint64_t>(i);
      } else {
        n1 += hist[i];
        s1 += hist[i] * static_cast<std::uint64_t>(i);
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    const u128 a = static_cast<u128>(n1) * s0, b = static_cast<u128>(n0) * s1;
    const u128 d = a > b ? a - b : b - a;
    const u128 num = d * d, den = static_cast<u128>(n0) * n1;
    if (num == 0) continue;
    // num / den > best_num / best_den
    if (best < 0 || num * best_den > best_num * den) {
      best = k;
      best_num = num;
      best_den = den;
    }
  }
  return best;
}

inline double normal_log_density(double x, double variance) {
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) -
         x * x / (2.0 * variance);
}

// Log-likelihood ratio of "different users" against "same user" over the
// chosen components.
inline double bdm_log_ratio(const std::vector<double>& diff,
                            const std::vector<double>& sigma_i_sq,
                            const std::vector<double>& sigma_p_sq,
                            const std::vector<std::size_t>& selected,
                            double log_prior) {
  double g = log_prior;
  for (std::size_t k : selected) {
    const double ve = 2.0 * sigma_i_sq[k];
    const double vu = 2.0 * (sigma_p_sq[k] + sigma_i_sq[k]);
    g += normal_log_density(diff[k], vu) - normal_log_density(diff[k], ve);
  }
  return g;
}

} // namespace oracle
