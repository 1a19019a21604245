#include "thermohand/synthetic.hpp"

#include "thermohand/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace thermohand {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kReferenceSize = 192.0;

// Finger bases sit on the palm top at these fractions of the half width.
constexpr std::array<double, 4> kBaseX = {-0.80, -0.28, 0.28, 0.72};
constexpr std::array<double, 4> kLength = {42.0, 47.0, 44.0, 35.0};
constexpr std::array<double, 4> kRadius = {4.6, 4.8, 4.6, 4.0};
constexpr std::array<double, 4> kSpreadDeg = {-14.0, -5.0, 5.0, 16.0};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Capsule finger_capsule(double bx, double by, double length, double radius,
                       double angle) {
  return {bx, by, bx + length * std::sin(angle), by - length * std::cos(angle),
          radius};
}

double heat_at(const HandShape& shape, double x, double y) {
  double h = 0.0;
  for (const auto& b : shape.heat) {
    const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
    h += b.amplitude * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
  }
  return h;
}

// Fraction of the way from finger base to tip, for the cooling gradient.
double along(const Capsule& c, double x, double y) {
  const double vx = c.x1 - c.x0, vy = c.y1 - c.y0;
  const double t = ((x - c.x0) * vx + (y - c.y0) * vy) / (vx * vx + vy * vy);
  return std::clamp(t, 0.0, 1.0);
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

double Rng::uniform() {
  // 53 random bits, identical on every platform.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::bounded_normal() { return std::clamp(normal(), -3.0, 3.0); }

void SyntheticConfig::validate() const {
  require(num_users >= 2, ErrorCode::InvalidArgument,
          "synthetic: need at least 2 users");
  require(sessions >= 1 && samples_per_session >= 1,
          ErrorCode::InvalidArgument,
          "synthetic: sessions and samples per session must be positive");
  require(cold_finger_prob >= 0.0 && cold_finger_prob <= 1.0,
          ErrorCode::InvalidArgument,
          "synthetic: cold_finger_prob must lie in [0,1]");
  require(image_size >= 96, ErrorCode::InvalidArgument,
          "synthetic: image_size " + std::to_string(image_size) +
              " is too small to contain the hand (minimum 96)");
  require(pose_scale >= 0.0 && pose_scale < 0.3 && sensor_scale >= 0.0 &&
              sensor_scale < 0.3,
          ErrorCode::InvalidArgument, "synthetic: scale jitter out of range");
  require(vis_noise >= 0.0 && th_noise >= 0.0 && shape_spread >= 0.0 &&
              th_pattern_drift >= 0.0,
          ErrorCode::InvalidArgument, "synthetic: negative noise or spread");
}

bool Capsule::contains(double x, double y) const {
  const double vx = x1 - x0, vy = y1 - y0;
  double t = ((x - x0) * vx + (y - y0) * vy) / (vx * vx + vy * vy);
  t = std::clamp(t, 0.0, 1.0);
  const double px = x0 + t * vx - x, py = y0 + t * vy - y;
  return px * px + py * py <= radius * radius;
}

HandLabel HandShape::classify(double x, double y) const {
  const double ex = x / palm_a, ey = y / palm_b;
  if (ex * ex + ey * ey <= 1.0 || wrist.contains(x, y)) return kPalm;
  for (std::size_t f = 0; f < fingers.size(); ++f)
    if (fingers[f].contains(x, y)) return static_cast<HandLabel>(kIndex + f);
  return kBackground;
}

HandShape user_shape(const SyntheticConfig& config, int user_id) {
  Rng rng(mix_seed(config.seed, 0x5a17, static_cast<std::uint64_t>(user_id)));
  const double s = config.shape_spread;
  auto vary = [&](double base, double rel) {
    return base * (1.0 + s * rel * rng.bounded_normal());
  };

  HandShape shape;
  shape.palm_a = vary(24.0, 0.06);
  shape.palm_b = vary(28.0, 0.06);
  const double wrist_r = 0.72 * shape.palm_a;
  shape.wrist = {0.0, 0.0, 0.0, shape.palm_b + 56.0 - wrist_r, wrist_r};

  for (std::size_t f = 0; f < 4; ++f) {
    const double bx = kBaseX[f] * shape.palm_a;
    // Base slightly inside the palm boundary.
    const double by =
        -shape.palm_b * std::sqrt(std::max(0.0, 1.0 - kBaseX[f] * kBaseX[f])) +
        3.0;
    const double angle = (kSpreadDeg[f] + s * 2.0 * rng.bounded_normal()) * kDeg;
    shape.fingers[f] = finger_capsule(bx, by, vary(kLength[f], 0.07),
                                      vary(kRadius[f], 0.06), angle);
  }
  const double thumb_angle = (-62.0 + s * 4.0 * rng.bounded_normal()) * kDeg;
  shape.fingers[4] = finger_capsule(-0.85 * shape.palm_a, -0.53 * shape.palm_b,
                                    vary(34.0, 0.07), vary(5.8, 0.06),
                                    thumb_angle);

  shape.skin = rng.uniform(0.55, 0.78);
  for (int k = 0; k < 4; ++k) {
    HandShape::Blob b;
    b.x = rng.uniform(-0.6, 0.6) * shape.palm_a;
    b.y = rng.uniform(-0.5, 0.6) * shape.palm_b;
    b.sigma = rng.uniform(7.0, 13.0);
    b.amplitude = rng.uniform(-0.04, 0.04);
    shape.heat.push_back(b);
  }
  return shape;
}

SyntheticSample render_sample(const SyntheticConfig& config,
                              const HandShape& shape, const HandPose& pose,
                              const SimilarityTransform& vis_to_th,
                              double th_offset,
                              const std::array<bool, 5>& cold_fingers,
                              std::uint64_t noise_seed) {
  const int n = config.image_size;
  const double unit = n / kReferenceSize;
  const double center = (n - 1) / 2.0;
  const double cr = std::cos(-pose.rotation), sr = std::sin(-pose.rotation);
  const double inv = 1.0 / (pose.scale * unit);

  // VIS frame point -> hand coordinates.
  auto to_hand = [&](double vx, double vy, double& hx, double& hy) {
    const double rx = vx - center - pose.dx, ry = vy - center - pose.dy;
    hx = (cr * rx - sr * ry) * inv;
    hy = (sr * rx + cr * ry) * inv;
  };

  Rng noise(noise_seed);
  SyntheticSample out;
  out.vis = GrayImage(n, n);
  out.th = GrayImage(n, n);
  out.vis_mask = BinaryMask(n, n);
  out.th_mask = BinaryMask(n, n);
  out.vis_labels = {n, n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n)};
  out.th_labels = out.vis_labels;
  out.cold_fingers = cold_fingers;
  out.vis_to_th = vis_to_th;

  constexpr double kVisBackground = 0.12;
  constexpr std::array<double, 3> kSub = {-1.0 / 3.0, 0.0, 1.0 / 3.0};
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double hx, hy;
      to_hand(x, y, hx, hy);
      const HandLabel label = shape.classify(hx, hy);
      out.vis_labels.data[static_cast<std::size_t>(y) * n + x] = label;
      out.vis_mask.set(x, y, label != kBackground);

      int covered = 0;
      for (double oy : kSub)
        for (double ox : kSub) {
          double sx, sy;
          to_hand(x + ox, y + oy, sx, sy);
          covered += shape.classify(sx, sy) != kBackground;
        }
      const double f = covered / 9.0;
      const double shade = shape.skin * (1.0 - 0.06 * hy / 70.0);
      const double v = kVisBackground * (1.0 - f) + shade * f +
                       config.vis_noise * noise.bounded_normal();
      out.vis(x, y) = std::clamp(v, 0.0, 1.0);
    }
  }

  // TH pixel q samples the VIS frame at T^-1(q).
  const SimilarityTransform back = vis_to_th.inverse(n, n, n, n);
  const double cb = std::cos(back.rotation), sb = std::sin(back.rotation);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double qx = x - center, qy = y - center;
      const double vx = back.scale * (cb * qx - sb * qy) + center + back.dx;
      const double vy = back.scale * (sb * qx + cb * qy) + center + back.dy;
      double hx, hy;
      to_hand(vx, vy, hx, hy);
      const HandLabel label = shape.classify(hx, hy);
      out.th_labels.data[static_cast<std::size_t>(y) * n + x] = label;
      out.th_mask.set(x, y, label != kBackground);

      double t = config.th_background;
      if (label != kBackground) {
        const bool cold =
            is_finger_label(label) && cold_fingers[label - kIndex];
        if (!cold) {
          t = config.th_hand + heat_at(shape, hx, hy) + th_offset;
          if (is_finger_label(label))
            t -= 0.03 * along(shape.fingers[label - kIndex], hx, hy);
        }
      }
      t += config.th_noise * noise.bounded_normal();
      out.th(x, y) = std::clamp(t, 0.0, 1.0);
    }
  }

  out.vis = quantize(out.vis, 8);
  out.th = quantize(out.th, 16);
  return out;
}

SyntheticDataset generate_dataset(const SyntheticConfig& config) {
  config.validate();
  SyntheticDataset ds;
  ds.config = config;

  Rng sensor_rng(mix_seed(config.seed, 0x5e45));
  ds.sensor.rotation =
      sensor_rng.uniform(-1.0, 1.0) * config.sensor_rotation_deg * kDeg;
  ds.sensor.dx = sensor_rng.uniform(-1.0, 1.0) * config.sensor_translation_px;
  ds.sensor.dy = sensor_rng.uniform(-1.0, 1.0) * config.sensor_translation_px;
  ds.sensor.scale = 1.0 + sensor_rng.uniform(-1.0, 1.0) * config.sensor_scale;

  for (int user = 1; user <= config.num_users; ++user) {
    HandShape base = user_shape(config, user);
    for (int session = 1; session <= config.sessions; ++session) {
      if (session > 1 && config.th_pattern_drift > 0.0) {
        // The heat pattern wanders from session to session.
        Rng walk(mix_seed(config.seed, static_cast<std::uint64_t>(user),
                          0xd1f7 + static_cast<std::uint64_t>(session)));
        for (auto& b : base.heat)
          b.amplitude += config.th_pattern_drift * walk.bounded_normal();
      }
      for (int k = 1; k <= config.samples_per_session; ++k) {
        Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(user),
                         static_cast<std::uint64_t>(session * 1000 + k)));
        HandPose pose;
        pose.rotation = rng.uniform(-1.0, 1.0) * config.pose_rotation_deg * kDeg;
        pose.dx = rng.uniform(-1.0, 1.0) * config.pose_translation_px;
        pose.dy = rng.uniform(-1.0, 1.0) * config.pose_translation_px;
        pose.scale = 1.0 + rng.uniform(-1.0, 1.0) * config.pose_scale;

        HandShape shape = base;
        for (auto& f : shape.fingers) {
          // Swing each finger about its base.
          const double a = config.finger_jitter_deg * kDeg * rng.bounded_normal();
          const double vx = f.x1 - f.x0, vy = f.y1 - f.y0;
          f.x1 = f.x0 + std::cos(a) * vx - std::sin(a) * vy;
          f.y1 = f.y0 + std::sin(a) * vx + std::cos(a) * vy;
        }

        std::array<bool, 5> cold{};
        for (auto& c : cold) c = rng.uniform() < config.cold_finger_prob;

        const double offset = config.th_session_drift * (session - 1);
        SyntheticSample s = render_sample(config, shape, pose, ds.sensor,
                                          offset, cold, rng.bits());
        s.user_id = user;
        s.session = session;
        s.sample = k;
        ds.samples.push_back(std::move(s));
      }
    }
  }
  return ds;
}

} // namespace thermohand
