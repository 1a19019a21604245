#pragma once

#include "thermohand/fusion.hpp"
#include "thermohand/pipeline.hpp"
#include "thermohand/synthetic.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermohand {

inline constexpr int kTests = 5;

struct PipelineConfig {
  std::vector<RegionKind> regions = {RegionKind::WholeHand};
  std::vector<Spectrum> spectra = {Spectrum::Visible, Spectrum::Thermal};
  std::vector<int> feature_lengths = {100};
  double vis_sigma_threshold = 0.65;
  double th_sigma_threshold = 0.65;
  std::vector<FusionRule> fusion_rules = {};
  double alpha = 0.7;
  /// Applied to both systems' scores before a fusion rule (Product always
  /// uses MinMax).
  Normalization fusion_normalization = Normalization::MinMax;
  /// When non-empty, an alpha sweep is recorded for the first region and
  /// feature length.
  std::vector<double> alpha_grid = {};
  /// Ignore stored calibrations and register every TH frame instead.
  bool register_thermal = false;
  int train_count = 5;
  FeatureConfig features{};
};

struct ReportRow {
  std::string region;
  std::string spectrum; // vis | th | fused
  std::string rule;     // "-" for single systems
  int feature_length = 0;
  std::optional<double> sigma_threshold;
  std::optional<int> selected;
  std::array<double, kTests> rates{};
  double mean = 0.0;
  double std_dev = 0.0; // population std over the test rates
};

struct SweepRow {
  double alpha = 0.0;
  std::array<double, kTests> rates{};
  double mean = 0.0;
  double std_dev = 0.0;
};

/// Raw per-test scores of one region/length cell, kept so callers can
/// re-fuse them (and so the endpoints can be checked against single
/// systems).
struct TestScores {
  ScoreMatrix vis;
  ScoreMatrix th;
  std::vector<int> truth; // column index of the true class per probe
  std::vector<int> probe_users;
};

struct EvaluationReport {
  std::vector<ReportRow> rows;
  std::vector<SweepRow> sweep;
  std::vector<int> class_ids;
  /// Scores of the first region/length cell, one entry per test.
  std::vector<TestScores> scores;
};

/// Trains on the first `train_count` acquisitions of every user (ordered by
/// session, then sample) and scores each of the next five as tests 1..5.
EvaluationReport run_evaluation(const std::vector<Acquisition>& data,
                                const PipelineConfig& config);

std::vector<Acquisition> acquisitions(const SyntheticDataset& dataset);

void summarize(const std::array<double, kTests>& rates, double& mean,
               double& std_dev);

void write_report_csv(std::ostream& out, const EvaluationReport& report);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& sweep);

} // namespace thermohand
