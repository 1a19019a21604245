#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace thermohand {

struct GalleryUser {
  int user_id = 0;
  std::vector<std::vector<double>> templates;
};

/// Enrolled feature vectors per user. Users are kept sorted by id.
class Gallery {
public:
  void add(int user_id, std::vector<double> features);

  const std::vector<GalleryUser>& users() const noexcept { return users_; }
  std::size_t feature_length() const noexcept { return length_; }
  bool empty() const noexcept { return users_.empty(); }

  /// Throws unless there are >= 2 users with >= 2 templates each.
  void validate() const;

private:
  std::vector<GalleryUser> users_;
  std::size_t length_ = 0;
};

/// Which variance is assumed for the "unequal" (different users) difference
/// distribution.
enum class UnequalVariance {
  /// 2 (sigma_p^2 + sigma_i^2): difference of two independent samples.
  TwiceTotal,
  /// 2 sigma_p^2 + sigma_i^2.
  DisplayedFormula,
};

/// How per-template g values are folded into one score per class.
enum class ClassAggregation { Mean, Min };

struct BdmModel {
  std::vector<double> sigma_i_sq;  // within-user variance per component
  std::vector<double> sigma_p_sq;  // between-user variance per component
  std::vector<double> ratios;      // sigma_i^2 / (sigma_p^2 + sigma_i^2)
  std::vector<std::size_t> selected;
  double sigma_threshold = 1.0;
  double log_prior_ratio = 0.0;    // ln P(U)/P(E)
  UnequalVariance unequal_variance = UnequalVariance::TwiceTotal;
  ClassAggregation aggregation = ClassAggregation::Mean;

  std::size_t feature_length() const noexcept { return sigma_i_sq.size(); }

  double equal_variance(std::size_t k) const { return 2.0 * sigma_i_sq[k]; }
  double unequal_variance_at(std::size_t k) const;
};

struct Dispersions {
  std::vector<double> sigma_i_sq;
  std::vector<double> sigma_p_sq;
};

/// Pooled unbiased within-user variance and unbiased variance of the user
/// means, per component.
Dispersions estimate_dispersions(const Gallery& gallery);

/// Ratio per component; components with zero total variance get ratio 1 and
/// are never selected.
std::vector<double> dispersion_ratios(const Dispersions& d);

/// Components with ratio <= threshold and positive total variance, sorted.
/// Throws EmptySelection when nothing qualifies.
std::vector<std::size_t> select_components(const BdmModel& model,
                                           double sigma_threshold);

BdmModel train_bdm(const Gallery& gallery, double sigma_threshold);

/// Log-likelihood ratio ln p(x|U)/p(x|E) + ln P(U)/P(E) over the selected
/// components of a feature difference. Positive favours "different users".
double g_score(std::span<const double> diff, const BdmModel& model);

struct Identification {
  int user_id = 0;
  std::vector<int> class_ids;    // gallery order (ascending id)
  std::vector<double> scores;    // lower = more likely the same user
};

Identification identify(std::span<const double> probe, const Gallery& gallery,
                        const BdmModel& model);

/// JSON document with sigma_threshold, selected, sigma_i_sq, sigma_p_sq,
/// log_prior_ratio and feature_length (plus the two policy switches).
std::string model_to_json(const BdmModel& model);
BdmModel model_from_json(const std::string& text);

} // namespace thermohand
