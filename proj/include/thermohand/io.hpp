#pragma once

#include "thermohand/bdm.hpp"
#include "thermohand/evaluation.hpp"
#include "thermohand/fusion.hpp"
#include "thermohand/pipeline.hpp"
#include "thermohand/synthetic.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <string>
#include <vector>

namespace thermohand {

// Plain comma-separated files with a header row. Fields are not quoted, so
// paths and ids must not contain commas.

struct FeatureRow {
  int user_id = 0;
  int session = 0;
  int sample = 0;
  RegionKind region = RegionKind::WholeHand;
  Spectrum spectrum = Spectrum::Visible;
  std::vector<double> values;
};

/// user_id,session,sample,region,spectrum,v1..vK
void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows);
void write_features_csv(const std::filesystem::path& path,
                        const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_features_csv(std::istream& in);
std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path);

/// Gallery of each user's first `max_per_user` rows ordered by (session,
/// sample); 0 keeps every row. Rows listed in `exclude` are skipped.
Gallery gallery_from_rows(const std::vector<FeatureRow>& rows, int max_per_user = 0,
                          const std::vector<std::size_t>& exclude = {});

/// A score matrix with the ids of its rows and columns.
struct ScoreTable {
  std::vector<std::string> probe_ids;
  std::vector<int> class_ids;
  ScoreMatrix matrix;
};

/// probe_id,class_id,score. Probes keep their order of first appearance,
/// classes are sorted; every (probe, class) pair must appear exactly once.
ScoreTable read_score_csv(std::istream& in, ScorePolarity polarity);
ScoreTable read_score_csv(const std::filesystem::path& path, ScorePolarity polarity);
void write_score_csv(std::ostream& out, const ScoreTable& table);
void write_score_csv(const std::filesystem::path& path, const ScoreTable& table);

struct TruthEntry {
  std::string probe_id;
  int class_id = 0;
  int test = 1;
};

/// probe_id,class_id,test
std::vector<TruthEntry> read_truth_csv(std::istream& in);
std::vector<TruthEntry> read_truth_csv(const std::filesystem::path& path);
void write_truth_csv(std::ostream& out, const std::vector<TruthEntry>& truth);

struct ManifestEntry {
  int user_id = 0;
  int session = 0;
  int sample = 0;
  std::filesystem::path vis_path;
  std::filesystem::path th_path;
  std::filesystem::path mask_path;      // optional ground-truth TH mask
  std::filesystem::path transform_path; // optional VIS -> TH calibration
};

/// user_id,session,sample,vis_path,th_path,mask_path,transform_path.
/// Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);

std::vector<Acquisition> load_acquisitions(const std::vector<ManifestEntry>& entries);

/// Writes every sample as PGM files (VIS 8-bit, TH 16-bit, masks), its
/// calibration, and manifest.csv into `dir`. Returns the manifest path.
std::filesystem::path write_dataset(const SyntheticDataset& dataset,
                                    const std::filesystem::path& dir);

/// Score tables of an evaluation cell for both systems and the matching
/// truth, one probe per (test, user) with ids "t<test>-u<user>".
void score_tables(const EvaluationReport& report, ScoreTable& vis, ScoreTable& th,
                  std::vector<TruthEntry>& truth);

/// Features of every manifest entry. Failures name the acquisition.
std::vector<FeatureRow> extract_features(const std::vector<ManifestEntry>& entries,
                                         RegionKind region, Spectrum spectrum,
                                         const FeatureConfig& config,
                                         bool register_thermal = false);

/// Fuses two score tables over the same probes and classes (rows of `th`
/// are matched to `vis` by id). Vote yields one-hot higher-is-better scores.
ScoreTable fuse_tables(const ScoreTable& vis, const ScoreTable& th, FusionRule rule,
                       double alpha, Normalization normalization);

/// Weighted-rule rates per alpha and test; truth must cover tests 1..5.
std::vector<SweepRow> sweep_tables(const ScoreTable& vis, const ScoreTable& th,
                                   const std::vector<TruthEntry>& truth,
                                   std::span<const double> grid,
                                   Normalization normalization);

Normalization parse_normalization(std::string_view name); // none|zscore|minmax

} // namespace thermohand
