#include "doctest.h"
#include "helpers.hpp"

#include "thermohand/evaluation.hpp"

#include <cmath>
#include <sstream>

using namespace thermohand;
using namespace testing_support;

namespace {

SyntheticConfig small_config() {
  SyntheticConfig cfg;
  cfg.num_users = 5;
  cfg.sessions = 5;
  cfg.samples_per_session = 2;
  cfg.image_size = 128;
  return cfg;
}

void check_consistent(const ReportRow& row) {
  double mean = 0;
  for (double r : row.rates) {
    CHECK(r >= 0.0);
    CHECK(r <= 100.0);
    mean += r / kTests;
  }
  double var = 0;
  for (double r : row.rates) var += (r - mean) * (r - mean) / kTests;
  CHECK(std::abs(row.mean - mean) <= 1e-9);
  CHECK(std::abs(row.std_dev - std::sqrt(var)) <= 1e-9);
}

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("summary uses the population deviation") {
  double mean = 0, sd = 0;
  summarize({100, 90, 80, 70, 60}, mean, sd);
  CHECK(mean == doctest::Approx(80.0));
  CHECK(sd == doctest::Approx(std::sqrt(200.0)));
}

TEST_CASE("probes copied from the training set are all recognised") {
  SyntheticConfig cfg = small_config();
  std::vector<Acquisition> data = acquisitions(generate_dataset(cfg));
  // replace each user's five test acquisitions with copies of the training ones
  std::vector<Acquisition> degenerate;
  for (int u = 1; u <= cfg.num_users; ++u) {
    std::vector<Acquisition> mine;
    for (const auto& a : data)
      if (a.user_id == u) mine.push_back(a);
    for (int i = 0; i < 5; ++i) {
      Acquisition copy = mine[i];
      copy.session = mine[5 + i].session;
      copy.sample = mine[5 + i].sample;
      mine[5 + i] = copy;
    }
    degenerate.insert(degenerate.end(), mine.begin(), mine.end());
  }
  PipelineConfig pc;
  EvaluationReport rep = run_evaluation(degenerate, pc);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows)
    for (double r : row.rates) CHECK(r == 100.0);
}

TEST_CASE("report rows are internally consistent and endpoints match") {
  SyntheticConfig cfg = small_config();
  cfg.th_session_drift = 0.05;
  std::vector<Acquisition> data = acquisitions(generate_dataset(cfg));
  PipelineConfig pc;
  pc.regions = {RegionKind::WholeHand, RegionKind::CentralZone};
  pc.feature_lengths = {60, 100};
  pc.fusion_rules = {FusionRule::Weighted, FusionRule::Mean, FusionRule::Product,
                     FusionRule::MajorityVote};
  pc.alpha_grid = {0.0, 0.5, 1.0};
  pc.alpha = 0.0;
  EvaluationReport rep = run_evaluation(data, pc);
  CHECK(rep.rows.size() == 2 * 2 * (2 + 4));
  for (const auto& row : rep.rows) check_consistent(row);

  const ReportRow* vis = nullptr;
  const ReportRow* th = nullptr;
  const ReportRow* w0 = nullptr;
  for (const auto& row : rep.rows)
    if (row.region == "hand" && row.feature_length == 60) {
      if (row.spectrum == "vis") vis = &row;
      if (row.spectrum == "th") th = &row;
      if (row.rule == "weighted(0.00)") w0 = &row;
    }
  REQUIRE(vis);
  REQUIRE(th);
  REQUIRE(w0);
  CHECK(w0->rates == th->rates);
  CHECK(vis->selected.has_value());
  CHECK(vis->sigma_threshold == 0.65);

  REQUIRE(rep.sweep.size() == 3);
  CHECK(rep.sweep[0].rates == th->rates);
  CHECK(rep.sweep[2].rates == vis->rates);

  REQUIRE(rep.scores.size() == kTests);
  for (int t = 0; t < kTests; ++t) {
    const TestScores& s = rep.scores[t];
    CHECK(s.vis.probes == cfg.num_users);
    CHECK(s.vis.classes == cfg.num_users);
    CHECK(identification_rate(decisions(s.vis), s.truth) == vis->rates[t]);
    CHECK(identification_rate(decisions(s.th), s.truth) == th->rates[t]);
  }

  pc.alpha = 1.0;
  pc.fusion_rules = {FusionRule::Weighted};
  pc.regions = {RegionKind::WholeHand};
  pc.feature_lengths = {60};
  EvaluationReport rep1 = run_evaluation(data, pc);
  CHECK(rep1.rows.at(2).rule == "weighted(1.00)");
  CHECK(rep1.rows.at(2).rates == vis->rates);
}

TEST_CASE("too few acquisitions") {
  SyntheticConfig cfg = small_config();
  cfg.sessions = 4;
  std::vector<Acquisition> data = acquisitions(generate_dataset(cfg));
  CHECK(error_code_of([&] { run_evaluation(data, PipelineConfig{}); }) ==
        ErrorCode::InsufficientData);
}

TEST_CASE("csv layout") {
  EvaluationReport rep;
  ReportRow row;
  row.region = "hand";
  row.spectrum = "vis";
  row.rule = "-";
  row.feature_length = 100;
  row.sigma_threshold = 0.65;
  row.selected = 42;
  row.rates = {100, 95, 90, 85, 80};
  summarize(row.rates, row.mean, row.std_dev);
  rep.rows.push_back(row);
  std::ostringstream out;
  write_report_csv(out, rep);
  std::istringstream lines(out.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header ==
        "region,spectrum,rule,length,sigma_threshold,selected,test1,test2,test3,test4,test5,mean,std");
  CHECK(first.rfind("hand,vis,-,100,0.6500,42,100.0000,95.0000", 0) == 0);

  std::ostringstream sweep;
  write_sweep_csv(sweep, {SweepRow{0.5, {1, 2, 3, 4, 5}, 3, std::sqrt(2.0)}});
  CHECK(sweep.str().rfind("alpha,rate_test1,rate_test2,rate_test3,rate_test4,rate_test5,mean,std\n", 0) == 0);
}

TEST_CASE("acquisitions carry the calibration") {
  SyntheticConfig cfg = small_config();
  cfg.num_users = 2;
  SyntheticDataset ds = generate_dataset(cfg);
  std::vector<Acquisition> acq = acquisitions(ds);
  REQUIRE(acq.size() == ds.samples.size());
  CHECK(acq[3].vis_to_th.has_value());
  CHECK(*acq[3].vis_to_th == ds.sensor);
  CHECK(acq[3].session == ds.samples[3].session);
}

}
