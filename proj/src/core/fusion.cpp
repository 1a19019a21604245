#include "thermohand/fusion.hpp"

#include "thermohand/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace thermohand {

ScoreMatrix::ScoreMatrix(int probes_, int classes_, std::vector<double> scores_,
                         ScorePolarity polarity_)
    : probes(probes_), classes(classes_), scores(std::move(scores_)),
      polarity(polarity_) {
  require(probes > 0 && classes > 0, ErrorCode::InvalidArgument,
          "score matrix needs at least one probe and one class");
  require(scores.size() == static_cast<std::size_t>(probes) * classes,
          ErrorCode::DimensionMismatch,
          "score matrix data does not match probes x classes");
  require(std::all_of(scores.begin(), scores.end(),
                      [](double v) { return std::isfinite(v); }),
          ErrorCode::InvalidArgument, "score matrix entries must be finite");
}

int ScoreMatrix::best_class(int p) const {
  const auto r = row(p);
  int best = 0;
  for (int c = 1; c < classes; ++c) {
    const bool better = polarity == ScorePolarity::LowerIsBetter
                            ? r[c] < r[best]
                            : r[c] > r[best];
    if (better) best = c;
  }
  return best;
}

std::vector<int> ScoreMatrix::ranking(int p) const {
  const auto r = row(p);
  std::vector<int> idx(static_cast<std::size_t>(classes));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return polarity == ScorePolarity::LowerIsBetter ? r[a] < r[b] : r[a] > r[b];
  });
  return idx;
}

ScoreMatrix normalize_scores(const ScoreMatrix& m, Normalization scheme) {
  ScoreMatrix out = m;
  out.normalization = scheme;
  if (scheme == Normalization::None) return out;
  for (int p = 0; p < m.probes; ++p) {
    const auto r = m.row(p);
    double* dst = out.scores.data() + static_cast<std::size_t>(p) * m.classes;
    if (scheme == Normalization::ZScore) {
      const double mean =
          std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
      double var = 0.0;
      for (double v : r) var += (v - mean) * (v - mean);
      const double sd = std::sqrt(var / static_cast<double>(r.size()));
      require(sd > 0.0, ErrorCode::Degenerate,
              "z-score normalization: probe " + std::to_string(p) +
                  " has constant scores");
      for (int c = 0; c < m.classes; ++c) dst[c] = (r[c] - mean) / sd;
    } else {
      const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
      require(*hi > *lo, ErrorCode::Degenerate,
              "min-max normalization: probe " + std::to_string(p) +
                  " has constant scores");
      const double range = *hi - *lo;
      for (int c = 0; c < m.classes; ++c) dst[c] = (r[c] - *lo) / range;
    }
  }
  return out;
}

ScoreMatrix to_higher_is_better(const ScoreMatrix& m) {
  if (m.polarity == ScorePolarity::HigherIsBetter) return m;
  ScoreMatrix out = m;
  for (double& v : out.scores) v = -v;
  out.polarity = ScorePolarity::HigherIsBetter;
  out.normalization = Normalization::None;
  return out;
}

std::string_view to_string(FusionRule rule) {
  switch (rule) {
  case FusionRule::Product: return "product";
  case FusionRule::Mean: return "mean";
  case FusionRule::Median: return "median";
  case FusionRule::Max: return "max";
  case FusionRule::Min: return "min";
  case FusionRule::MajorityVote: return "vote";
  case FusionRule::Weighted: return "weighted";
  }
  return "mean";
}

FusionRule parse_rule(std::string_view name) {
  static const std::map<std::string_view, FusionRule> rules = {
      {"product", FusionRule::Product}, {"mean", FusionRule::Mean},
      {"median", FusionRule::Median},   {"max", FusionRule::Max},
      {"min", FusionRule::Min},         {"vote", FusionRule::MajorityVote},
      {"weighted", FusionRule::Weighted}};
  const auto it = rules.find(name);
  if (it == rules.end())
    fail(ErrorCode::InvalidArgument,
         "unknown fusion rule '" + std::string(name) + "'");
  return it->second;
}

namespace {

void check_same_shape(const ScoreMatrix& a, const ScoreMatrix& b) {
  require(a.probes == b.probes && a.classes == b.classes,
          ErrorCode::DimensionMismatch, "score matrices differ in shape");
  require(a.polarity == b.polarity, ErrorCode::InvalidArgument,
          "score matrices differ in polarity");
}

} // namespace

ScoreMatrix combine_scores(std::span<const ScoreMatrix> systems,
                           FusionRule rule) {
  require(systems.size() >= 2, ErrorCode::InvalidArgument,
          "combine_scores needs at least 2 systems");
  require(rule != FusionRule::MajorityVote && rule != FusionRule::Weighted,
          ErrorCode::InvalidArgument,
          "combine_scores handles fixed score rules only");
  for (const auto& s : systems) check_same_shape(systems[0], s);

  if (rule == FusionRule::Product) {
    for (const auto& s : systems)
      require(s.normalization == Normalization::MinMax &&
                  s.polarity == ScorePolarity::HigherIsBetter,
              ErrorCode::InvalidArgument,
              "product rule needs min-max normalized, higher-is-better scores");
  }

  const auto& inputs = systems;
  const std::size_t n = inputs[0].scores.size();
  std::vector<double> out(n);
  std::vector<double> column(inputs.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < inputs.size(); ++s)
      column[s] = inputs[s].scores[i];
    switch (rule) {
    case FusionRule::Product: {
      double log_sum = 0.0;
      for (double v : column) log_sum += std::log(std::max(v, 1e-12));
      out[i] = std::exp(log_sum);
      break;
    }
    case FusionRule::Mean:
      out[i] = std::accumulate(column.begin(), column.end(), 0.0) /
               static_cast<double>(column.size());
      break;
    case FusionRule::Median: {
      std::sort(column.begin(), column.end());
      const std::size_t m = column.size() / 2;
      out[i] = column.size() % 2 ? column[m] : 0.5 * (column[m - 1] + column[m]);
      break;
    }
    case FusionRule::Max:
      out[i] = *std::max_element(column.begin(), column.end());
      break;
    case FusionRule::Min:
      out[i] = *std::min_element(column.begin(), column.end());
      break;
    default:
      break;
    }
  }
  return ScoreMatrix(inputs[0].probes, inputs[0].classes, std::move(out),
                     inputs[0].polarity);
}

ScoreMatrix weighted_combine(const ScoreMatrix& vis, const ScoreMatrix& th,
                             double alpha) {
  check_same_shape(vis, th);
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::InvalidArgument,
          "alpha must lie in [0,1]");
  ScoreMatrix out = th;
  for (std::size_t i = 0; i < out.scores.size(); ++i)
    out.scores[i] = alpha * vis.scores[i] + (1.0 - alpha) * th.scores[i];
  out.normalization =
      vis.normalization == th.normalization ? vis.normalization
                                            : Normalization::None;
  return out;
}

int majority_vote(std::span<const int> votes, std::span<const int> first_ranking) {
  require(!votes.empty(), ErrorCode::InvalidArgument,
          "majority_vote needs at least one system");
  std::map<int, int> counts;
  for (int v : votes) ++counts[v];
  int top = 0;
  for (const auto& [label, n] : counts) top = std::max(top, n);
  std::vector<int> tied;
  for (const auto& [label, n] : counts)
    if (n == top) tied.push_back(label);
  if (tied.size() == 1) return tied.front();

  for (int label : first_ranking)
    if (std::find(tied.begin(), tied.end(), label) != tied.end()) return label;
  if (std::find(tied.begin(), tied.end(), votes.front()) != tied.end())
    return votes.front();
  return tied.front();
}

std::vector<int> decisions(const ScoreMatrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.probes));
  for (int p = 0; p < m.probes; ++p) out[static_cast<std::size_t>(p)] = m.best_class(p);
  return out;
}

double identification_rate(std::span<const int> decided,
                           std::span<const int> truth) {
  require(decided.size() == truth.size() && !truth.empty(),
          ErrorCode::DimensionMismatch,
          "identification rate: decisions and truth differ in length");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += decided[i] == truth[i];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<SweepPoint> alpha_sweep(const ScoreMatrix& vis,
                                    const ScoreMatrix& th,
                                    std::span<const int> truth,
                                    std::span<const double> grid) {
  require(truth.size() == static_cast<std::size_t>(vis.probes),
          ErrorCode::DimensionMismatch, "alpha sweep: truth length != probes");
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (double alpha : grid) {
    const ScoreMatrix fused = weighted_combine(vis, th, alpha);
    out.push_back({alpha, identification_rate(decisions(fused), truth)});
  }
  return out;
}

std::vector<double> parse_grid(std::string_view spec) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = spec.find(':', start);
    const std::string token(spec.substr(start, colon - start));
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "bad grid '" + std::string(spec) +
                                 "', expected start:step:stop");
    }
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  require(parts.size() == 3 && parts[1] > 0.0 && parts[2] >= parts[0],
          ErrorCode::Parse,
          "bad grid '" + std::string(spec) + "', expected start:step:stop");
  std::vector<double> grid;
  const long steps =
      static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    // Snap to the nearest multiple so 0:0.05:1 yields exact endpoints.
    double a = parts[0] + static_cast<double>(i) * parts[1];
    if (std::abs(a - parts[2]) < 1e-9) a = parts[2];
    grid.push_back(a);
  }
  return grid;
}

} // namespace thermohand
