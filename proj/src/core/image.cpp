#include "thermohand/image.hpp"

#include "thermohand/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace thermohand {

namespace {

void check_dimensions(int width, int height) {
  require(width > 0 && height > 0, ErrorCode::InvalidArgument,
          "image dimensions must be positive, got " + std::to_string(width) +
              "x" + std::to_string(height));
}

std::size_t area(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

int max_value(int bit_depth) {
  require(bit_depth == 8 || bit_depth == 16, ErrorCode::InvalidArgument,
          "bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  return bit_depth == 8 ? 255 : 65535;
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n' && c != '\r') {
      }
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int parse_header_int(std::istream& in, const std::string& what,
                     const std::filesystem::path& path) {
  const std::string token = next_token(in);
  if (token.empty() ||
      !std::all_of(token.begin(), token.end(),
                   [](unsigned char ch) { return std::isdigit(ch); }) ||
      token.size() > 9) {
    fail(ErrorCode::MalformedHeader,
         path.string() + ": bad " + what + " '" + token + "' in PGM header");
  }
  return std::stoi(token);
}

struct RawPgm {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;
};

RawPgm read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());

  if (next_token(in) != "P5")
    fail(ErrorCode::MalformedHeader, path.string() + ": not a binary PGM (P5)");
  RawPgm raw;
  raw.width = parse_header_int(in, "width", path);
  raw.height = parse_header_int(in, "height", path);
  raw.maxval = parse_header_int(in, "maxval", path);
  // next_token consumed exactly one whitespace byte after maxval.
  if (raw.width <= 0 || raw.height <= 0 || raw.maxval <= 0 ||
      raw.maxval > 65535) {
    fail(ErrorCode::MalformedHeader,
         path.string() + ": invalid PGM dimensions or maxval");
  }

  const std::size_t n = area(raw.width, raw.height);
  const int bytes = raw.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(n * static_cast<std::size_t>(bytes));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    fail(ErrorCode::MalformedHeader, path.string() + ": truncated pixel data");

  raw.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw.samples[i] =
        bytes == 1 ? buf[i]
                   : static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    if (raw.samples[i] > raw.maxval)
      fail(ErrorCode::MalformedHeader,
           path.string() + ": sample exceeds maxval");
  }
  return raw;
}

void write_raw(const std::filesystem::path& path, int width, int height,
               int maxval, const std::vector<std::uint16_t>& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
  std::vector<unsigned char> buf;
  buf.reserve(samples.size() * (maxval > 255 ? 2 : 1));
  for (std::uint16_t s : samples) {
    if (maxval > 255) buf.push_back(static_cast<unsigned char>(s >> 8));
    buf.push_back(static_cast<unsigned char>(s & 0xff));
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

std::uint16_t to_level(double v, int maxval) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(clamped * maxval));
}

} // namespace

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  data_.assign(area(width, height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dimensions(width, height);
  require(data_.size() == area(width, height), ErrorCode::DimensionMismatch,
          "image data length does not match width x height");
  require(std::all_of(data_.begin(), data_.end(),
                      [](double v) { return std::isfinite(v); }),
          ErrorCode::InvalidArgument, "image intensities must be finite");
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  data_.assign(area(width, height), fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dimensions(width, height);
  require(data_.size() == area(width, height), ErrorCode::DimensionMismatch,
          "mask data length does not match width x height");
  for (auto& v : data_) v = v ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(
      std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

GrayImage apply_mask(const GrayImage& image, const BinaryMask& mask) {
  require(image.width() == mask.width() && image.height() == mask.height(),
          ErrorCode::DimensionMismatch,
          "mask dimensions do not match the image");
  GrayImage out = image;
  auto px = out.data();
  auto m = mask.data();
  for (std::size_t i = 0; i < px.size(); ++i)
    if (!m[i]) px[i] = 0.0;
  return out;
}

double dice(const BinaryMask& a, const BinaryMask& b) {
  require(a.width() == b.width() && a.height() == b.height(),
          ErrorCode::DimensionMismatch, "dice: mask dimensions differ");
  std::size_t both = 0, na = 0, nb = 0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    na += da[i];
    nb += db[i];
    both += da[i] & db[i];
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

GrayImage load_pgm(const std::filesystem::path& path, int bit_depth) {
  const int maxval = max_value(bit_depth);
  const RawPgm raw = read_raw(path);
  if ((bit_depth == 8) != (raw.maxval <= 255)) {
    fail(ErrorCode::DepthMismatch,
         path.string() + ": expected " + std::to_string(bit_depth) +
             "-bit PGM, header maxval is " + std::to_string(raw.maxval));
  }
  std::vector<double> data(raw.samples.size());
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = raw.samples[i] * scale;
  return GrayImage(raw.width, raw.height, std::move(data));
}

GrayImage load_pgm(const std::filesystem::path& path) {
  const RawPgm raw = read_raw(path);
  std::vector<double> data(raw.samples.size());
  const double scale = 1.0 / static_cast<double>(raw.maxval);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = raw.samples[i] * scale;
  return GrayImage(raw.width, raw.height, std::move(data));
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path,
              int bit_depth) {
  const int maxval = max_value(bit_depth);
  std::vector<std::uint16_t> samples(image.size());
  auto px = image.data();
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i] = to_level(px[i], maxval);
  write_raw(path, image.width(), image.height(), maxval, samples);
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const RawPgm raw = read_raw(path);
  if (raw.maxval > 255)
    fail(ErrorCode::DepthMismatch, path.string() + ": masks must be 8-bit");
  std::vector<std::uint8_t> data(raw.samples.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = raw.samples[i] != 0;
  return BinaryMask(raw.width, raw.height, std::move(data));
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint16_t> samples(mask.size());
  auto m = mask.data();
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = m[i] ? 255 : 0;
  write_raw(path, mask.width(), mask.height(), 255, samples);
}

GrayImage quantize(const GrayImage& image, int bit_depth) {
  const int maxval = max_value(bit_depth);
  GrayImage out = image;
  const double scale = 1.0 / static_cast<double>(maxval);
  for (double& v : out.data()) v = to_level(v, maxval) * scale;
  return out;
}

} // namespace thermohand
