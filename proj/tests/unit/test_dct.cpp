#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "thermohand/dct.hpp"
#include "thermohand/regions.hpp"
#include "thermohand/segmentation.hpp"

#include <algorithm>
#include <numbers>

using namespace thermohand;
using namespace testing_support;

namespace {

double max_abs_diff(const std::vector<double>& a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace

TEST_SUITE("dct") {

TEST_CASE("constant image has only a DC term") {
  for (int n : {1, 4, 8, 13}) {
    DctCoefficients c = dct2(GrayImage(n, n, 0.3));
    CHECK(c(0, 0) == doctest::Approx(n * 0.3).epsilon(1e-12));
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < n; ++u)
        if (u || v) CHECK(std::abs(c(u, v)) <= 1e-12);
  }
}

TEST_CASE("first horizontal cosine lands in u=1, v=0") {
  const int n = 8;
  GrayImage img(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      img(x, y) = std::cos(std::numbers::pi * (2 * x + 1) / (2.0 * n));
  DctCoefficients c = dct2(img);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      if (u == 1 && v == 0)
        CHECK(std::abs(c(u, v)) > 1.0);
      else
        CHECK(std::abs(c(u, v)) <= 1e-12);
    }
}

TEST_CASE("matches the direct sum on square and rectangular inputs") {
  Rng rng(17);
  for (auto [w, h] : {std::pair{16, 16}, std::pair{8, 8}, std::pair{6, 10}, std::pair{12, 5}}) {
    for (int i = 0; i < 5; ++i) {
      GrayImage img = random_image(rng, w, h);
      DctCoefficients c = dct2(img);
      REQUIRE(c.width == w);
      REQUIRE(c.height == h);
      std::vector<double> f(img.data().begin(), img.data().end());
      CHECK(max_abs_diff(oracle::dct2_direct(f, w, h), c.values) <= 1e-9);
    }
  }
}

TEST_CASE("inverse, Parseval and linearity") {
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    GrayImage x = random_image(rng, 8, 8), y = random_image(rng, 8, 8);
    DctCoefficients cx = dct2(x), cy = dct2(y);
    GrayImage back = idct2(cx);
    for (std::size_t k = 0; k < x.size(); ++k)
      CHECK(std::abs(back.data()[k] - x.data()[k]) <= 1e-9);

    double ex = 0, ec = 0;
    for (double v : x.data()) ex += v * v;
    for (double v : cx.values) ec += v * v;
    CHECK(std::abs(ex - ec) <= 1e-9 * ex);

    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    GrayImage mix(8, 8);
    for (std::size_t k = 0; k < mix.size(); ++k)
      mix.data()[k] = a * x.data()[k] + b * y.data()[k];
    DctCoefficients cm = dct2(mix);
    for (std::size_t k = 0; k < cm.values.size(); ++k)
      CHECK(std::abs(cm.values[k] - (a * cx.values[k] + b * cy.values[k])) <= 1e-9);
  }
}

TEST_CASE("inverse of trivial coefficient sets") {
  DctCoefficients zero{5, 5, std::vector<double>(25, 0.0)};
  CHECK(idct2(zero) == GrayImage(5, 5, 0.0));
  DctCoefficients dc{5, 5, std::vector<double>(25, 0.0)};
  dc(0, 0) = 5 * 0.7;
  GrayImage img = idct2(dc);
  for (double v : img.data()) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("zigzag order") {
  DctCoefficients c{2, 2, {1.0, 2.0, 3.0, 4.0}}; // [[a,b],[c,d]]
  CHECK(zigzag_select(c, 4) == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(zigzag_select(c, 1) == std::vector<double>{1.0});

  auto pos = scan_positions(3, 3, ScanOrder::Zigzag);
  std::vector<std::pair<int, int>> expect = {{0, 0}, {0, 1}, {1, 0}, {2, 0}, {1, 1},
                                             {0, 2}, {1, 2}, {2, 1}, {2, 2}};
  CHECK(pos == expect);

  auto raster = scan_positions(2, 3, ScanOrder::Raster);
  CHECK(raster[3] == std::pair{1, 0});
}

TEST_CASE("zigzag visits every position once on rectangles") {
  for (auto [r, c] : {std::pair{3, 7}, std::pair{9, 2}, std::pair{96, 32}}) {
    auto pos = scan_positions(r, c, ScanOrder::Zigzag);
    CHECK(pos.size() == static_cast<std::size_t>(r * c));
    std::sort(pos.begin(), pos.end());
    CHECK(std::adjacent_find(pos.begin(), pos.end()) == pos.end());
    CHECK(pos.front() == std::pair{0, 0});
    CHECK(pos.back() == std::pair{r - 1, c - 1});
  }
}

TEST_CASE("full selection is a permutation, shorter ones are prefixes") {
  Rng rng(2);
  DctCoefficients c = dct2(random_image(rng, 24, 24));
  std::vector<double> all = zigzag_select(c, 24 * 24);
  std::vector<double> sorted_all = all, sorted_src = c.values;
  std::sort(sorted_all.begin(), sorted_all.end());
  std::sort(sorted_src.begin(), sorted_src.end());
  CHECK(sorted_all == sorted_src);

  std::vector<double> v500 = zigzag_select(c, 500), v100 = zigzag_select(c, 100);
  CHECK(std::equal(v100.begin(), v100.end(), v500.begin()));

  CHECK(error_code_of([&] { zigzag_select(c, 24 * 24 + 1); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] { zigzag_select(c, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("energy compaction on synthetic hands") {
  SyntheticConfig cfg;
  cfg.num_users = 5;
  cfg.sessions = 1;
  SyntheticDataset ds = generate_dataset(cfg);
  for (const auto& s : ds.samples) {
    BinaryMask m = segment_visible(s.vis);
    NormalizedHand h = normalize_hand(apply_mask(s.vis, m), m, 128);
    DctCoefficients c = dct2(h.image);
    double total = 0, head = 0;
    for (double v : c.values) total += v * v;
    for (double v : zigzag_select(c, 100)) head += v * v;
    CHECK(head / total >= 0.95);
  }
}

}
