#pragma once

#include "thermohand/image.hpp"
#include "thermohand/similarity.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace thermohand {

/// Deterministic generator settings. Lengths are in pixels of a 192-pixel
/// frame and scale with image_size.
struct SyntheticConfig {
  int num_users = 20;
  int sessions = 5;
  int samples_per_session = 2;
  int image_size = 192;

  double cold_finger_prob = 0.0;

  // Per-sample hand pose in the VIS frame.
  double pose_rotation_deg = 8.0;
  double pose_translation_px = 6.0;
  double pose_scale = 0.04;
  double finger_jitter_deg = 1.5;

  // VIS -> TH sensor mapping, drawn once per dataset (fixed camera).
  double sensor_rotation_deg = 3.0;
  double sensor_translation_px = 4.0;
  double sensor_scale = 0.03;

  /// Multiplies the between-user spread of every shape parameter.
  double shape_spread = 1.0;

  double vis_noise = 0.02;
  double th_noise = 0.008;
  double th_background = 0.30;
  double th_hand = 0.62;
  /// Thermal offset added per session after the first.
  double th_session_drift = 0.0;
  /// Size of the per-session random step of every heat blob amplitude.
  double th_pattern_drift = 0.0;

  std::uint64_t seed = 1;

  void validate() const;
};

/// Ground-truth part labels.
enum HandLabel : std::uint8_t {
  kBackground = 0,
  kPalm = 1,
  kIndex = 2,
  kMiddle = 3,
  kRing = 4,
  kLittle = 5,
  kThumb = 6,
};

inline bool is_finger_label(std::uint8_t label) { return label >= kIndex; }

struct Capsule {
  double x0, y0, x1, y1, radius;
  bool contains(double x, double y) const;
};

/// Persistent per-user silhouette and heat pattern in hand coordinates
/// (origin at the palm center, y down, fingers pointing to -y).
struct HandShape {
  double palm_a = 0.0; // half width
  double palm_b = 0.0; // half height
  Capsule wrist{};
  std::array<Capsule, 5> fingers{}; // index, middle, ring, little, thumb
  double skin = 0.65;
  struct Blob {
    double x, y, sigma, amplitude;
  };
  std::vector<Blob> heat;

  HandLabel classify(double x, double y) const;
};

struct SyntheticSample {
  int user_id = 0;
  int session = 0; // 1-based
  int sample = 0;  // 1-based within the session
  GrayImage vis;   // quantized to 8 bits
  GrayImage th;    // quantized to 16 bits
  BinaryMask vis_mask;
  BinaryMask th_mask;
  LabelMap vis_labels;
  LabelMap th_labels;
  std::array<bool, 5> cold_fingers{};
  SimilarityTransform vis_to_th;
};

struct SyntheticDataset {
  SyntheticConfig config;
  SimilarityTransform sensor;
  std::vector<SyntheticSample> samples; // by user, session, sample
};

SyntheticDataset generate_dataset(const SyntheticConfig& config);

/// Per-user shape, drawn from the seed alone.
HandShape user_shape(const SyntheticConfig& config, int user_id);

/// Renders one VIS/TH pair for a given pose. Exposed for tests that need a
/// controlled pose.
struct HandPose {
  double rotation = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double scale = 1.0;
};
SyntheticSample render_sample(const SyntheticConfig& config,
                              const HandShape& shape, const HandPose& pose,
                              const SimilarityTransform& vis_to_th,
                              double th_offset,
                              const std::array<bool, 5>& cold_fingers,
                              std::uint64_t noise_seed);

/// Seeded helpers with platform-independent output.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(); // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Normal draw clamped to +-3.
  double bounded_normal();
  std::uint64_t bits() { return engine_(); }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

} // namespace thermohand
