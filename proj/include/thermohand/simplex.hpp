#pragma once

#include <functional>
#include <vector>

namespace thermohand {

struct SimplexSettings {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// Converged once the largest vertex distance from the best vertex drops
  /// below this (in the caller's parameter units).
  double tolerance = 1e-4;
  int max_iterations = 500;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Nelder-Mead minimization with the Lagarias et al. acceptance rules.
/// The initial simplex is x0 plus one vertex per axis offset by steps[i].
/// Non-finite objective values are rejected with an Error.
SimplexResult nelder_mead(const Objective& f, std::vector<double> x0,
                          const std::vector<double>& steps,
                          const SimplexSettings& settings = {});

} // namespace thermohand
