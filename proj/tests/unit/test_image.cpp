#include "doctest.h"
#include "helpers.hpp"

#include "thermohand/image.hpp"

using namespace thermohand;
using namespace testing_support;

TEST_SUITE("image") {

TEST_CASE("8-bit P5 samples are scaled by 1/255") {
  auto dir = scratch_dir("image_load8");
  write_file(dir / "a.pgm", std::string("P5\n2 2\n255\n") +
                                std::string({'\x00', '\xff', '\x80', '\x40'}));
  GrayImage img = load_pgm(dir / "a.pgm", 8);
  REQUIRE(img.width() == 2);
  REQUIRE(img.height() == 2);
  CHECK(img(0, 0) == 0.0);
  CHECK(img(1, 0) == 1.0);
  CHECK(img(0, 1) == 128.0 / 255.0);
  CHECK(img(1, 1) == 64.0 / 255.0);

  write_file(dir / "b.pgm", std::string("P5 1 1 255\n") + '\xff');
  CHECK(load_pgm(dir / "b.pgm", 8)(0, 0) == 1.0);
}

TEST_CASE("16-bit samples are big-endian") {
  auto dir = scratch_dir("image_load16");
  write_file(dir / "a.pgm", std::string("P5\n# comment\n2 1\n65535\n") +
                                std::string({'\x01', '\x02', '\xff', '\xff'}));
  GrayImage img = load_pgm(dir / "a.pgm", 16);
  CHECK(img(0, 0) == 258.0 / 65535.0);
  CHECK(img(1, 0) == 1.0);
}

TEST_CASE("save then load then save is byte-identical at both depths") {
  auto dir = scratch_dir("image_roundtrip");
  Rng rng(11);
  for (int depth : {8, 16}) {
    for (int i = 0; i < 100; ++i) {
      GrayImage img = random_image(rng, 16, 16);
      save_pgm(img, dir / "a.pgm", depth);
      GrayImage back = load_pgm(dir / "a.pgm", depth);
      CHECK(back == quantize(img, depth));
      save_pgm(back, dir / "b.pgm", depth);
      REQUIRE(read_file(dir / "a.pgm") == read_file(dir / "b.pgm"));
    }
  }
}

TEST_CASE("load errors are distinct") {
  auto dir = scratch_dir("image_errors");
  CHECK(error_code_of([&] { load_pgm(dir / "missing.pgm", 8); }) ==
        ErrorCode::MissingFile);

  write_file(dir / "p2.pgm", "P2\n1 1\n255\n0\n");
  CHECK(error_code_of([&] { load_pgm(dir / "p2.pgm", 8); }) ==
        ErrorCode::MalformedHeader);

  write_file(dir / "short.pgm", "P5\n4 4\n255\nabc");
  CHECK(error_code_of([&] { load_pgm(dir / "short.pgm", 8); }) ==
        ErrorCode::MalformedHeader);

  GrayImage img(3, 3, 0.5);
  save_pgm(img, dir / "deep.pgm", 16);
  CHECK(error_code_of([&] { load_pgm(dir / "deep.pgm", 8); }) ==
        ErrorCode::DepthMismatch);
  save_pgm(img, dir / "shallow.pgm", 8);
  CHECK(error_code_of([&] { load_pgm(dir / "shallow.pgm", 16); }) ==
        ErrorCode::DepthMismatch);
}

TEST_CASE("masks round-trip as 0/255 graymaps") {
  auto dir = scratch_dir("image_mask");
  BinaryMask m(5, 4);
  m.set(1, 1, true);
  m.set(4, 3, true);
  save_mask(m, dir / "m.pgm");
  CHECK(load_mask(dir / "m.pgm") == m);
  CHECK(load_pgm(dir / "m.pgm", 8)(1, 1) == 1.0);
}

TEST_CASE("apply_mask examples") {
  GrayImage img(4, 4, 0.5);
  CHECK(apply_mask(img, BinaryMask(4, 4, true)) == img);
  CHECK(apply_mask(img, BinaryMask(4, 4, false)) == GrayImage(4, 4, 0.0));

  BinaryMask checker(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) checker.set(x, y, (x + y) % 2 == 0);
  GrayImage out = apply_mask(img, checker);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) CHECK(out(x, y) == ((x + y) % 2 == 0 ? 0.5 : 0.0));

  CHECK(error_code_of([&] { apply_mask(img, BinaryMask(3, 4)); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("apply_mask is idempotent") {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    GrayImage img = random_image(rng, 9, 7);
    BinaryMask m(9, 7);
    for (int y = 0; y < 7; ++y)
      for (int x = 0; x < 9; ++x) m.set(x, y, rng.uniform() < 0.5);
    GrayImage once = apply_mask(img, m);
    CHECK(apply_mask(once, m) == once);
  }
}

TEST_CASE("dice overlap") {
  BinaryMask a(4, 1), b(4, 1);
  a.set(0, 0, true);
  a.set(1, 0, true);
  b.set(1, 0, true);
  b.set(2, 0, true);
  CHECK(dice(a, b) == doctest::Approx(0.5));
  CHECK(dice(a, a) == 1.0);
  CHECK(dice(BinaryMask(4, 1), BinaryMask(4, 1)) == 1.0);
}

}
