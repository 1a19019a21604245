#include "thermohand/regions.hpp"

#include "thermohand/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace thermohand {

void HandFrame::source_point(int u, int v, double& x, double& y) const {
  const double xr = box_x0 + (u + 0.5 - pad_x) / scale;
  const double yr = box_y0 + (v + 0.5 - pad_y) / scale;
  const double c = std::cos(-rotation), s = std::sin(-rotation);
  const double rx = xr - center_x, ry = yr - center_y;
  x = c * rx - s * ry + center_x;
  y = s * rx + c * ry + center_y;
}

namespace {

double sample_bilinear(const GrayImage& image, double x, double y) {
  const int w = image.width(), h = image.height();
  if (x < -0.5 || y < -0.5 || x > w - 0.5 || y > h - 0.5) return 0.0;
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0, fy = y - y0;
  const double top = image(x0, y0) * (1 - fx) + image(x1, y0) * fx;
  const double bottom = image(x0, y1) * (1 - fx) + image(x1, y1) * fx;
  return top * (1 - fy) + bottom * fy;
}

bool nearest(const HandFrame& frame, int u, int v, int w, int h, int& ix,
             int& iy) {
  double x, y;
  frame.source_point(u, v, x, y);
  ix = static_cast<int>(std::lround(x));
  iy = static_cast<int>(std::lround(y));
  return ix >= 0 && iy >= 0 && ix < w && iy < h;
}

struct Component {
  int label = 0;
  int area = 0;
  int top = std::numeric_limits<int>::max();
  double sum_x = 0.0;
  double centroid_x() const { return sum_x / area; }
};

std::vector<Component> components_above(const BinaryMask& mask, int rows,
                                        int min_area,
                                        std::vector<int>& labels) {
  BinaryMask upper(mask.width(), mask.height());
  for (int y = 0; y < std::min(rows, mask.height()); ++y)
    for (int x = 0; x < mask.width(); ++x) upper.set(x, y, mask(x, y));
  const int n = connected_components(upper, labels);
  std::vector<Component> comps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) comps[static_cast<std::size_t>(i)].label = i + 1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const int l = labels[static_cast<std::size_t>(y) * mask.width() + x];
      if (l == 0) continue;
      Component& c = comps[static_cast<std::size_t>(l - 1)];
      ++c.area;
      c.top = std::min(c.top, y);
      c.sum_x += x;
    }
  }
  std::erase_if(comps, [&](const Component& c) { return c.area < min_area; });
  return comps;
}

GrayImage crop_resize(const GrayImage& image, int x0, int y0, int x1, int y1,
                      int out_w, int out_h) {
  GrayImage out(out_w, out_h);
  const double bw = x1 - x0 + 1, bh = y1 - y0 + 1;
  for (int v = 0; v < out_h; ++v) {
    const double y = y0 - 0.5 + (v + 0.5) * bh / out_h;
    for (int u = 0; u < out_w; ++u) {
      const double x = x0 - 0.5 + (u + 0.5) * bw / out_w;
      out(u, v) = sample_bilinear(image, x, y);
    }
  }
  return out;
}

} // namespace

int connected_components(const BinaryMask& mask, std::vector<int>& labels) {
  const int w = mask.width(), h = mask.height();
  labels.assign(mask.size(), 0);
  int next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y) || labels[static_cast<std::size_t>(y) * w + x]) continue;
      ++next;
      stack.push_back({x, y});
      labels[static_cast<std::size_t>(y) * w + x] = next;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        constexpr std::array<std::pair<int, int>, 4> steps{
            {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
        for (auto [dx, dy] : steps) {
          const int nx = cx + dx, ny = cy + dy;
          if (!mask.contains(nx, ny) || !mask(nx, ny)) continue;
          int& l = labels[static_cast<std::size_t>(ny) * w + nx];
          if (l) continue;
          l = next;
          stack.push_back({nx, ny});
        }
      }
    }
  }
  return next;
}

HandFrame hand_frame(const BinaryMask& mask, int out_size) {
  require(out_size > 0, ErrorCode::InvalidArgument,
          "normalize_hand: output size must be positive");
  const std::size_t n = mask.count();
  require(n >= 100, ErrorCode::InsufficientData,
          "normalize_hand: mask has " + std::to_string(n) +
              " hand pixels, at least 100 are required");

  double mx = 0, my = 0;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask(x, y)) {
        mx += x;
        my += y;
      }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask(x, y)) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
      }
  sxx /= static_cast<double>(n);
  syy /= static_cast<double>(n);
  sxy /= static_cast<double>(n);

  const double mean = (sxx + syy) / 2.0;
  const double radius = std::hypot((sxx - syy) / 2.0, sxy);
  const double major = mean + radius, minor = mean - radius;
  require(major - minor > 0.01 * major, ErrorCode::Degenerate,
          "normalize_hand: mask is isotropic, principal axis undefined");

  // Major axis direction angle from +x, then tilt from vertical (+y).
  const double axis = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  double tilt = std::atan2(-std::cos(axis), std::sin(axis));
  if (tilt > std::numbers::pi / 2) tilt -= std::numbers::pi;
  if (tilt <= -std::numbers::pi / 2) tilt += std::numbers::pi;

  HandFrame frame;
  frame.rotation = -tilt;
  frame.center_x = mx;
  frame.center_y = my;
  frame.out_size = out_size;

  const double c = std::cos(frame.rotation), s = std::sin(frame.rotation);
  double x_lo = std::numeric_limits<double>::max(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (mask(x, y)) {
        const double rx = c * (x - mx) - s * (y - my) + mx;
        const double ry = s * (x - mx) + c * (y - my) + my;
        x_lo = std::min(x_lo, rx);
        x_hi = std::max(x_hi, rx);
        y_lo = std::min(y_lo, ry);
        y_hi = std::max(y_hi, ry);
      }
  const double box_w = x_hi - x_lo + 1.0, box_h = y_hi - y_lo + 1.0;
  frame.box_x0 = x_lo - 0.5;
  frame.box_y0 = y_lo - 0.5;
  frame.scale = out_size / std::max(box_w, box_h);
  frame.pad_x = (out_size - box_w * frame.scale) / 2.0;
  frame.pad_y = (out_size - box_h * frame.scale) / 2.0;
  return frame;
}

GrayImage warp_image(const GrayImage& image, const HandFrame& frame) {
  GrayImage out(frame.out_size, frame.out_size);
  for (int v = 0; v < frame.out_size; ++v)
    for (int u = 0; u < frame.out_size; ++u) {
      double x, y;
      frame.source_point(u, v, x, y);
      out(u, v) = sample_bilinear(image, x, y);
    }
  return out;
}

BinaryMask warp_mask(const BinaryMask& mask, const HandFrame& frame) {
  BinaryMask out(frame.out_size, frame.out_size);
  for (int v = 0; v < frame.out_size; ++v)
    for (int u = 0; u < frame.out_size; ++u) {
      int ix, iy;
      if (nearest(frame, u, v, mask.width(), mask.height(), ix, iy))
        out.set(u, v, mask(ix, iy));
    }
  return out;
}

LabelMap warp_labels(const LabelMap& labels, const HandFrame& frame) {
  LabelMap out{frame.out_size, frame.out_size,
               std::vector<std::uint8_t>(
                   static_cast<std::size_t>(frame.out_size) * frame.out_size, 0)};
  for (int v = 0; v < frame.out_size; ++v)
    for (int u = 0; u < frame.out_size; ++u) {
      int ix, iy;
      if (nearest(frame, u, v, labels.width, labels.height, ix, iy))
        out.data[static_cast<std::size_t>(v) * frame.out_size + u] =
            labels(ix, iy);
    }
  return out;
}

GrayImage resize_bilinear(const GrayImage& image, int width, int height) {
  return crop_resize(image, 0, 0, image.width() - 1, image.height() - 1, width,
                     height);
}

NormalizedHand normalize_hand(const GrayImage& image, const BinaryMask& mask,
                              int out_size) {
  require(image.width() == mask.width() && image.height() == mask.height(),
          ErrorCode::DimensionMismatch,
          "normalize_hand: mask dimensions do not match the image");
  NormalizedHand hand;
  hand.frame = hand_frame(mask, out_size);
  hand.image = warp_image(image, hand.frame);
  hand.mask = warp_mask(mask, hand.frame);
  hand.applied_rotation = hand.frame.rotation;
  hand.crop_x = hand.frame.box_x0;
  hand.crop_y = hand.frame.box_y0;
  return hand;
}

std::string_view to_string(RegionKind kind) {
  switch (kind) {
  case RegionKind::Finger: return "finger";
  case RegionKind::CentralZone: return "central";
  case RegionKind::WholeHand: return "hand";
  }
  return "hand";
}

RegionKind parse_region(std::string_view name) {
  if (name == "finger") return RegionKind::Finger;
  if (name == "central") return RegionKind::CentralZone;
  if (name == "hand") return RegionKind::WholeHand;
  fail(ErrorCode::InvalidArgument,
       "unknown region '" + std::string(name) + "' (finger|central|hand)");
}

FingerSelection select_index_finger(const NormalizedHand& hand,
                                    const RegionConfig& config) {
  const BinaryMask& mask = hand.mask;
  const int h = mask.height(), w = mask.width();
  const int min_area = std::max(
      1, static_cast<int>(std::lround(config.min_component_fraction * w * h)));

  // Lowest row above which the largest number of finger candidates separate.
  std::vector<int> labels;
  int best_count = 0, palm_line = 0;
  for (int r = 1; r <= h; ++r) {
    const int count =
        static_cast<int>(components_above(mask, r, min_area, labels).size());
    if (count >= best_count && count > 0) {
      best_count = count;
      palm_line = r;
    }
  }
  if (best_count < 4)
    fail(ErrorCode::RegionExtraction,
         "finger extraction: only " + std::to_string(best_count) +
             " finger components separate above the palm line; use the "
             "whole-hand region instead");

  auto comps = components_above(mask, palm_line, min_area, labels);
  const auto thumb = std::max_element(
      comps.begin(), comps.end(),
      [](const Component& a, const Component& b) { return a.top < b.top; });
  const double thumb_x = thumb->centroid_x();
  double mean_x = 0.0;
  for (const auto& c : comps) mean_x += c.centroid_x();
  mean_x /= static_cast<double>(comps.size());
  const bool thumb_left = thumb_x <= mean_x;

  std::sort(comps.begin(), comps.end(),
            [&](const Component& a, const Component& b) {
              return thumb_left ? a.centroid_x() < b.centroid_x()
                                : a.centroid_x() > b.centroid_x();
            });
  const int index_label = comps[1].label;

  const int margin = static_cast<int>(std::lround(config.palm_line_margin * h));
  FingerSelection sel;
  sel.palm_line = palm_line;
  sel.components = best_count;
  sel.component = BinaryMask(w, h);
  for (int pass = 0; pass < 2; ++pass) {
    const int cut = pass == 0 ? palm_line - margin : palm_line;
    for (int y = 0; y < std::max(cut, 0); ++y)
      for (int x = 0; x < w; ++x)
        if (labels[static_cast<std::size_t>(y) * w + x] == index_label)
          sel.component.set(x, y, true);
    if (sel.component.count() > 0) break;
  }
  return sel;
}

GrayImage extract_region(const NormalizedHand& hand, RegionKind kind,
                         const RegionConfig& config) {
  const GrayImage& image = hand.image;
  const int w = image.width(), h = image.height();
  switch (kind) {
  case RegionKind::WholeHand:
    return image;
  case RegionKind::CentralZone: {
    const int r0 = static_cast<int>(std::lround(config.central_row_begin * h));
    const int r1 = static_cast<int>(std::lround(config.central_row_end * h));
    const int c0 = static_cast<int>(std::lround(config.central_col_begin * w));
    const int c1 = static_cast<int>(std::lround(config.central_col_end * w));
    require(r0 >= 0 && c0 >= 0 && r1 <= h && c1 <= w && r1 > r0 && c1 > c0,
            ErrorCode::InvalidArgument, "central zone fractions are invalid");
    GrayImage out(c1 - c0, r1 - r0);
    for (int y = r0; y < r1; ++y)
      for (int x = c0; x < c1; ++x)
        out(x - c0, y - r0) =
            (!config.apply_mask || hand.mask(x, y)) ? image(x, y) : 0.0;
    return out;
  }
  case RegionKind::Finger: {
    const FingerSelection sel = select_index_finger(hand, config);
    int x0 = w, y0 = h, x1 = -1, y1 = -1;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (sel.component(x, y)) {
          x0 = std::min(x0, x);
          x1 = std::max(x1, x);
          y0 = std::min(y0, y);
          y1 = std::max(y1, y);
        }
    const GrayImage source =
        config.apply_mask ? apply_mask(image, sel.component) : image;
    return crop_resize(source, x0, y0, x1, y1, config.finger_width,
                       config.finger_height);
  }
  }
  fail(ErrorCode::InvalidArgument, "unknown region kind");
}

} // namespace thermohand
