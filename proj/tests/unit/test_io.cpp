#include "doctest.h"
#include "helpers.hpp"

#include "thermohand/io.hpp"

#include <sstream>

using namespace thermohand;
using namespace testing_support;

TEST_SUITE("io") {

TEST_CASE("feature rows round-trip exactly") {
  Rng rng(1);
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 6; ++i) {
    FeatureRow r;
    r.user_id = 1 + i / 2;
    r.session = 1 + i % 2;
    r.sample = 1;
    r.region = RegionKind::CentralZone;
    r.spectrum = Spectrum::Thermal;
    for (int k = 0; k < 9; ++k) r.values.push_back(rng.normal() * 1e3);
    rows.push_back(r);
  }
  std::stringstream ss;
  write_features_csv(ss, rows);
  std::string header;
  std::getline(std::istringstream(ss.str()), header);
  CHECK(header == "user_id,session,sample,region,spectrum,v1,v2,v3,v4,v5,v6,v7,v8,v9");
  std::vector<FeatureRow> back = read_features_csv(ss);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].values == rows[i].values);
    CHECK(back[i].user_id == rows[i].user_id);
    CHECK(back[i].session == rows[i].session);
    CHECK(back[i].region == RegionKind::CentralZone);
    CHECK(back[i].spectrum == Spectrum::Thermal);
  }
}

TEST_CASE("malformed feature files") {
  std::istringstream bad_header("user,session\n1,2\n");
  CHECK(error_code_of([&] { read_features_csv(bad_header); }) == ErrorCode::MalformedHeader);
  std::istringstream bad_row(
      "user_id,session,sample,region,spectrum,v1\n1,1,1,hand,vis,0.5\n2,1,1,hand,vis,abc\n");
  try {
    read_features_csv(bad_row);
    FAIL("accepted a bad row");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("gallery selection by acquisition order") {
  std::vector<FeatureRow> rows;
  for (int u = 1; u <= 2; ++u)
    for (int s = 3; s >= 1; --s) {
      FeatureRow r;
      r.user_id = u;
      r.session = s;
      r.sample = 1;
      r.values = {static_cast<double>(10 * u + s)};
      rows.push_back(r);
    }
  Gallery g = gallery_from_rows(rows, 2);
  REQUIRE(g.users().size() == 2);
  CHECK(g.users()[0].templates.size() == 2);
  CHECK(g.users()[0].templates[0][0] == 11.0);
  CHECK(g.users()[0].templates[1][0] == 12.0);
  Gallery ex = gallery_from_rows(rows, 0, {0});
  CHECK(ex.users()[0].templates.size() == 2);
  CHECK(ex.users()[1].templates.size() == 3);
}

TEST_CASE("score tables") {
  std::istringstream in("probe_id,class_id,score\np1,2,0.5\np1,1,0.25\np0,1,1\np0,2,2\n");
  ScoreTable t = read_score_csv(in, ScorePolarity::LowerIsBetter);
  CHECK(t.probe_ids == std::vector<std::string>{"p1", "p0"});
  CHECK(t.class_ids == std::vector<int>{1, 2});
  CHECK(t.matrix.scores == std::vector<double>{0.25, 0.5, 1.0, 2.0});
  std::stringstream out;
  write_score_csv(out, t);
  ScoreTable again = read_score_csv(out, ScorePolarity::LowerIsBetter);
  CHECK(again.matrix.scores == t.matrix.scores);
  CHECK(again.probe_ids == t.probe_ids);

  std::istringstream missing("probe_id,class_id,score\np1,1,0.5\np1,2,0.5\np2,1,3\n");
  CHECK(error_code_of([&] { read_score_csv(missing, ScorePolarity::LowerIsBetter); }) ==
        ErrorCode::Parse);
  std::istringstream dup("probe_id,class_id,score\np1,1,0.5\np1,1,0.5\n");
  CHECK(error_code_of([&] { read_score_csv(dup, ScorePolarity::LowerIsBetter); }) ==
        ErrorCode::Parse);
}

TEST_CASE("fusing tables matches rows by id") {
  std::istringstream a("probe_id,class_id,score\nx,1,1\nx,2,3\ny,1,4\ny,2,2\n");
  std::istringstream b("probe_id,class_id,score\ny,1,7\ny,2,5\nx,1,6\nx,2,8\n");
  ScoreTable vis = read_score_csv(a, ScorePolarity::LowerIsBetter);
  ScoreTable th = read_score_csv(b, ScorePolarity::LowerIsBetter);
  ScoreTable w0 = fuse_tables(vis, th, FusionRule::Weighted, 0.0, Normalization::None);
  CHECK(w0.probe_ids == vis.probe_ids);
  CHECK(w0.matrix.scores == std::vector<double>{6, 8, 7, 5});
  ScoreTable w1 = fuse_tables(vis, th, FusionRule::Weighted, 1.0, Normalization::None);
  CHECK(w1.matrix.scores == vis.matrix.scores);
  ScoreTable vote = fuse_tables(vis, th, FusionRule::MajorityVote, 0.0, Normalization::None);
  CHECK(vote.matrix.polarity == ScorePolarity::HigherIsBetter);
  CHECK(vote.matrix.scores == std::vector<double>{1, 0, 0, 1});
  ScoreTable mean = fuse_tables(vis, th, FusionRule::Mean, 0.0, Normalization::MinMax);
  CHECK(mean.matrix.polarity == ScorePolarity::HigherIsBetter);
  CHECK(mean.matrix.best_class(0) == 0);
}

TEST_CASE("truth file and sweep") {
  std::stringstream truth_csv;
  std::vector<TruthEntry> truth;
  std::stringstream vis_csv, th_csv;
  vis_csv << "probe_id,class_id,score\n";
  th_csv << "probe_id,class_id,score\n";
  for (int t = 1; t <= 5; ++t)
    for (int u = 1; u <= 2; ++u) {
      const std::string id = "t" + std::to_string(t) + "-u" + std::to_string(u);
      truth.push_back({id, u, t});
      for (int c = 1; c <= 2; ++c) {
        vis_csv << id << "," << c << "," << (c == u ? 0.0 : 1.0) << "\n";
        // TH is wrong on test 1
        th_csv << id << "," << c << "," << ((c == u) == (t != 1) ? 0.0 : 1.0) << "\n";
      }
    }
  write_truth_csv(truth_csv, truth);
  std::vector<TruthEntry> back = read_truth_csv(truth_csv);
  REQUIRE(back.size() == 10);
  CHECK(back[3].probe_id == "t2-u2");
  CHECK(back[3].test == 2);
  ScoreTable vis = read_score_csv(vis_csv, ScorePolarity::LowerIsBetter);
  ScoreTable th = read_score_csv(th_csv, ScorePolarity::LowerIsBetter);
  std::vector<double> grid = {0.0, 1.0};
  std::vector<SweepRow> sweep = sweep_tables(vis, th, back, grid, Normalization::None);
  REQUIRE(sweep.size() == 2);
  CHECK(sweep[0].rates == std::array<double, 5>{0, 100, 100, 100, 100});
  CHECK(sweep[1].rates == std::array<double, 5>{100, 100, 100, 100, 100});

  back.pop_back();
  CHECK(error_code_of([&] { sweep_tables(vis, th, back, grid, Normalization::None); }) ==
        ErrorCode::InsufficientData);
  back.push_back(back.front());
  CHECK(error_code_of([&] { sweep_tables(vis, th, back, grid, Normalization::None); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("dataset files round-trip through the manifest") {
  auto dir = scratch_dir("io_dataset");
  SyntheticConfig cfg;
  cfg.num_users = 2;
  cfg.sessions = 1;
  cfg.samples_per_session = 2;
  cfg.image_size = 96;
  SyntheticDataset ds = generate_dataset(cfg);
  auto manifest = write_dataset(ds, dir / "data");
  CHECK(manifest == dir / "data" / "manifest.csv");
  std::vector<ManifestEntry> entries = read_manifest(manifest);
  REQUIRE(entries.size() == 4);
  CHECK(entries[1].vis_path.is_absolute());
  std::vector<Acquisition> acq = load_acquisitions(entries);
  for (std::size_t i = 0; i < acq.size(); ++i) {
    CHECK(acq[i].vis == ds.samples[i].vis);
    CHECK(acq[i].th == ds.samples[i].th);
    REQUIRE(acq[i].vis_to_th.has_value());
    CHECK(std::abs(acq[i].vis_to_th->rotation - ds.sensor.rotation) <= 1e-15);
    CHECK(load_mask(entries[i].mask_path) == ds.samples[i].th_mask);
  }

  // optional columns may be absent
  write_file(dir / "short.csv", "user_id,session,sample,vis_path,th_path\n1,1,1," +
                                    entries[0].vis_path.string() + "," +
                                    entries[0].th_path.string() + "\n");
  std::vector<ManifestEntry> plain = read_manifest(dir / "short.csv");
  CHECK(plain[0].transform_path.empty());
  CHECK_FALSE(load_acquisitions(plain)[0].vis_to_th.has_value());

  CHECK(error_code_of([&] { read_manifest(dir / "none.csv"); }) == ErrorCode::MissingFile);
}

TEST_CASE("normalization names") {
  CHECK(parse_normalization("none") == Normalization::None);
  CHECK(parse_normalization("zscore") == Normalization::ZScore);
  CHECK(parse_normalization("minmax") == Normalization::MinMax);
  CHECK(error_code_of([] { parse_normalization("l2"); }) == ErrorCode::InvalidArgument);
}

}
