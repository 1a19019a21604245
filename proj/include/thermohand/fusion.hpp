#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace thermohand {

enum class ScorePolarity { LowerIsBetter, HigherIsBetter };

enum class Normalization { None, ZScore, MinMax };

/// probes x classes match scores.
struct ScoreMatrix {
  int probes = 0;
  int classes = 0;
  std::vector<double> scores; // row-major, one row per probe
  ScorePolarity polarity = ScorePolarity::LowerIsBetter;
  Normalization normalization = Normalization::None;

  ScoreMatrix() = default;
  ScoreMatrix(int probes, int classes, std::vector<double> scores,
              ScorePolarity polarity);

  double operator()(int p, int c) const {
    return scores[static_cast<std::size_t>(p) * classes + c];
  }
  std::span<const double> row(int p) const {
    return {scores.data() + static_cast<std::size_t>(p) * classes,
            static_cast<std::size_t>(classes)};
  }

  /// Column index of the best score in a row (lowest index on ties).
  int best_class(int p) const;
  /// Column indices from best to worst (stable on ties).
  std::vector<int> ranking(int p) const;
};

/// Per-row normalization. ZScore uses the population standard deviation.
/// Throws Degenerate naming the probe when a row is constant.
ScoreMatrix normalize_scores(const ScoreMatrix& m, Normalization scheme);

/// Same scores expressed with higher = better (negated when needed).
ScoreMatrix to_higher_is_better(const ScoreMatrix& m);

enum class FusionRule { Product, Mean, Median, Max, Min, MajorityVote, Weighted };

std::string_view to_string(FusionRule rule);
FusionRule parse_rule(std::string_view name); // product|mean|median|max|min|vote|weighted

/// Entrywise fixed-rule combination across systems. Inputs must share shape
/// and polarity, which the result keeps; convert lower-is-better scores with
/// to_higher_is_better first when the rule expects likelihoods. Product
/// requires MinMax-normalized higher-is-better inputs and is evaluated as
/// exp(sum of logs), each factor clamped below at 1e-12.
ScoreMatrix combine_scores(std::span<const ScoreMatrix> systems, FusionRule rule);

/// alpha * vis + (1 - alpha) * th, keeping the inputs' polarity.
ScoreMatrix weighted_combine(const ScoreMatrix& vis, const ScoreMatrix& th,
                             double alpha);

/// Modal label. Ties go to the tied label ranked best by the first system
/// (`first_ranking` lists labels best-first); without a usable ranking the
/// first system's own vote wins if tied, else the lowest label.
int majority_vote(std::span<const int> votes,
                  std::span<const int> first_ranking = {});

/// Rank-1 decisions of a score matrix (argmin or argmax per polarity).
std::vector<int> decisions(const ScoreMatrix& m);

/// Percentage of decisions equal to truth.
double identification_rate(std::span<const int> decided,
                           std::span<const int> truth);

struct SweepPoint {
  double alpha = 0.0;
  double rate = 0.0;
};

/// Identification rate of weighted_combine(vis, th, alpha) for each alpha.
/// `truth` holds the correct column index per probe.
std::vector<SweepPoint> alpha_sweep(const ScoreMatrix& vis,
                                    const ScoreMatrix& th,
                                    std::span<const int> truth,
                                    std::span<const double> grid);

/// "start:step:stop" inclusive grid (stop included within 1e-9).
std::vector<double> parse_grid(std::string_view spec);

} // namespace thermohand
