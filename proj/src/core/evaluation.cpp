#include "thermohand/evaluation.hpp"

#include "thermohand/bdm.hpp"
#include "thermohand/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace thermohand {

namespace {

struct UserData {
  int user_id = 0;
  std::vector<const Acquisition*> acquisitions;
};

std::vector<UserData> group_users(const std::vector<Acquisition>& data,
                                  int needed) {
  std::map<int, std::vector<const Acquisition*>> by_user;
  for (const auto& a : data) by_user[a.user_id].push_back(&a);
  require(by_user.size() >= 2, ErrorCode::InsufficientData,
          "evaluation needs at least 2 users");
  std::vector<UserData> users;
  for (auto& [id, list] : by_user) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Acquisition* a, const Acquisition* b) {
                       return std::tie(a->session, a->sample) <
                              std::tie(b->session, b->sample);
                     });
    require(static_cast<int>(list.size()) >= needed,
            ErrorCode::InsufficientData,
            "user " + std::to_string(id) + " has " +
                std::to_string(list.size()) + " acquisitions, " +
                std::to_string(needed) + " are needed (train + 5 tests)");
    users.push_back({id, std::move(list)});
  }
  return users;
}

std::vector<double> prefix(const std::vector<double>& v, int length) {
  return {v.begin(), v.begin() + length};
}

std::string rule_name(FusionRule rule, double alpha) {
  if (rule != FusionRule::Weighted) return std::string(to_string(rule));
  char buf[48];
  std::snprintf(buf, sizeof buf, "weighted(%.2f)", alpha);
  return buf;
}

std::vector<int> fused_decisions(const TestScores& s, FusionRule rule,
                                 double alpha, Normalization scheme) {
  switch (rule) {
  case FusionRule::Weighted:
    return decisions(weighted_combine(normalize_scores(s.vis, scheme),
                                      normalize_scores(s.th, scheme), alpha));
  case FusionRule::MajorityVote: {
    std::vector<int> out;
    for (int p = 0; p < s.vis.probes; ++p) {
      const std::array<int, 2> votes = {s.vis.best_class(p),
                                        s.th.best_class(p)};
      out.push_back(majority_vote(votes, s.vis.ranking(p)));
    }
    return out;
  }
  default: {
    const Normalization n =
        rule == FusionRule::Product ? Normalization::MinMax : scheme;
    const std::array<ScoreMatrix, 2> systems = {
        normalize_scores(to_higher_is_better(s.vis), n),
        normalize_scores(to_higher_is_better(s.th), n)};
    return decisions(combine_scores(systems, rule));
  }
  }
}

} // namespace

void summarize(const std::array<double, kTests>& rates, double& mean,
               double& std_dev) {
  mean = 0.0;
  for (double r : rates) mean += r;
  mean /= kTests;
  double var = 0.0;
  for (double r : rates) var += (r - mean) * (r - mean);
  std_dev = std::sqrt(var / kTests);
}

std::vector<Acquisition> acquisitions(const SyntheticDataset& dataset) {
  std::vector<Acquisition> out;
  out.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples)
    out.push_back({s.user_id, s.session, s.sample, s.vis, s.th, s.vis_to_th});
  return out;
}

EvaluationReport run_evaluation(const std::vector<Acquisition>& data,
                                const PipelineConfig& config) {
  require(!config.regions.empty() && !config.spectra.empty() &&
              !config.feature_lengths.empty(),
          ErrorCode::InvalidArgument,
          "evaluation needs at least one region, spectrum and feature length");
  require(config.train_count >= 2, ErrorCode::InvalidArgument,
          "evaluation needs at least 2 training samples per user");
  const int needed = config.train_count + kTests;
  const auto users = group_users(data, needed);
  const int n_users = static_cast<int>(users.size());
  const int max_length = *std::max_element(config.feature_lengths.begin(),
                                           config.feature_lengths.end());

  EvaluationReport report;
  for (const auto& u : users) report.class_ids.push_back(u.user_id);

  const bool fuse = config.spectra.size() >= 2 && !config.fusion_rules.empty();
  const bool sweep = config.spectra.size() >= 2 && !config.alpha_grid.empty();

  for (RegionKind region : config.regions) {
    FeatureConfig fc = config.features;
    fc.region = region;
    fc.length = max_length;

    // features[spectrum][user][acquisition]
    std::vector<std::vector<std::vector<std::vector<double>>>> features;
    for (Spectrum spectrum : config.spectra) {
      auto& per_user = features.emplace_back();
      for (const auto& u : users) {
        auto& list = per_user.emplace_back();
        for (int i = 0; i < needed; ++i) {
          const Acquisition* acq = u.acquisitions[static_cast<std::size_t>(i)];
          if (spectrum == Spectrum::Thermal && config.register_thermal &&
              acq->vis_to_th) {
            Acquisition uncalibrated = *acq;
            uncalibrated.vis_to_th.reset();
            list.push_back(spectrum_features(uncalibrated, spectrum, fc));
          } else {
            list.push_back(spectrum_features(*acq, spectrum, fc));
          }
        }
      }
    }

    for (int length : config.feature_lengths) {
      std::vector<TestScores> tests(kTests);
      for (std::size_t si = 0; si < config.spectra.size(); ++si) {
        const Spectrum spectrum = config.spectra[si];
        const double threshold = spectrum == Spectrum::Visible
                                     ? config.vis_sigma_threshold
                                     : config.th_sigma_threshold;
        Gallery gallery;
        for (int ui = 0; ui < n_users; ++ui)
          for (int i = 0; i < config.train_count; ++i)
            gallery.add(users[static_cast<std::size_t>(ui)].user_id,
                        prefix(features[si][static_cast<std::size_t>(ui)]
                                       [static_cast<std::size_t>(i)],
                               length));
        const BdmModel model = train_bdm(gallery, threshold);

        ReportRow row;
        row.region = std::string(to_string(region));
        row.spectrum = std::string(to_string(spectrum));
        row.rule = "-";
        row.feature_length = length;
        row.sigma_threshold = threshold;
        row.selected = static_cast<int>(model.selected.size());

        for (int k = 0; k < kTests; ++k) {
          std::vector<double> scores;
          std::vector<int> truth;
          for (int ui = 0; ui < n_users; ++ui) {
            const auto probe =
                prefix(features[si][static_cast<std::size_t>(ui)]
                               [static_cast<std::size_t>(config.train_count + k)],
                       length);
            const Identification id = identify(probe, gallery, model);
            scores.insert(scores.end(), id.scores.begin(), id.scores.end());
            truth.push_back(ui);
          }
          ScoreMatrix m(n_users, n_users, std::move(scores),
                        ScorePolarity::LowerIsBetter);
          row.rates[static_cast<std::size_t>(k)] =
              identification_rate(decisions(m), truth);
          auto& t = tests[static_cast<std::size_t>(k)];
          t.truth = truth;
          t.probe_users = report.class_ids;
          (spectrum == Spectrum::Visible ? t.vis : t.th) = std::move(m);
        }
        summarize(row.rates, row.mean, row.std_dev);
        report.rows.push_back(std::move(row));
      }

      if (fuse) {
        for (FusionRule rule : config.fusion_rules) {
          ReportRow row;
          row.region = std::string(to_string(region));
          row.spectrum = "fused";
          row.rule = rule_name(rule, config.alpha);
          row.feature_length = length;
          for (int k = 0; k < kTests; ++k) {
            const auto& t = tests[static_cast<std::size_t>(k)];
            row.rates[static_cast<std::size_t>(k)] = identification_rate(
                fused_decisions(t, rule, config.alpha,
                                config.fusion_normalization),
                t.truth);
          }
          summarize(row.rates, row.mean, row.std_dev);
          report.rows.push_back(std::move(row));
        }
      }

      const bool first_cell = report.scores.empty();
      if (first_cell) {
        if (sweep) {
          for (double alpha : config.alpha_grid) {
            SweepRow s;
            s.alpha = alpha;
            for (int k = 0; k < kTests; ++k) {
              const auto& t = tests[static_cast<std::size_t>(k)];
              s.rates[static_cast<std::size_t>(k)] = identification_rate(
                  fused_decisions(t, FusionRule::Weighted, alpha,
                                  config.fusion_normalization),
                  t.truth);
            }
            summarize(s.rates, s.mean, s.std_dev);
            report.sweep.push_back(s);
          }
        }
        report.scores = std::move(tests);
      }
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const EvaluationReport& report) {
  out << "region,spectrum,rule,length,sigma_threshold,selected,test1,test2,"
         "test3,test4,test5,mean,std\n";
  char buf[64];
  for (const auto& r : report.rows) {
    out << r.region << ',' << r.spectrum << ',' << r.rule << ','
        << r.feature_length << ',';
    if (r.sigma_threshold) {
      std::snprintf(buf, sizeof buf, "%.4f", *r.sigma_threshold);
      out << buf;
    }
    out << ',';
    if (r.selected) out << *r.selected;
    for (double rate : r.rates) {
      std::snprintf(buf, sizeof buf, ",%.4f", rate);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f\n", r.mean, r.std_dev);
    out << buf;
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& sweep) {
  out << "alpha,rate_test1,rate_test2,rate_test3,rate_test4,rate_test5,mean,"
         "std\n";
  char buf[64];
  for (const auto& s : sweep) {
    std::snprintf(buf, sizeof buf, "%.4f", s.alpha);
    out << buf;
    for (double rate : s.rates) {
      std::snprintf(buf, sizeof buf, ",%.4f", rate);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.4f,%.4f\n", s.mean, s.std_dev);
    out << buf;
  }
}

} // namespace thermohand
