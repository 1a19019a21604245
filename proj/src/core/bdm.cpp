#include "thermohand/bdm.hpp"

#include "thermohand/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace thermohand {

namespace {

constexpr double kVarianceFloor = 1e-12;

} // namespace

void Gallery::add(int user_id, std::vector<double> features) {
  require(!features.empty(), ErrorCode::InvalidArgument,
          "gallery: empty feature vector");
  require(std::all_of(features.begin(), features.end(),
                      [](double v) { return std::isfinite(v); }),
          ErrorCode::InvalidArgument, "gallery: non-finite feature value");
  if (length_ == 0) length_ = features.size();
  require(features.size() == length_, ErrorCode::DimensionMismatch,
          "gallery: feature length " + std::to_string(features.size()) +
              " differs from " + std::to_string(length_));
  auto it = std::lower_bound(
      users_.begin(), users_.end(), user_id,
      [](const GalleryUser& u, int id) { return u.user_id < id; });
  if (it == users_.end() || it->user_id != user_id)
    it = users_.insert(it, GalleryUser{user_id, {}});
  it->templates.push_back(std::move(features));
}

void Gallery::validate() const {
  require(users_.size() >= 2, ErrorCode::InsufficientData,
          "gallery needs at least 2 users");
  for (const auto& u : users_)
    require(u.templates.size() >= 2, ErrorCode::InsufficientData,
            "user " + std::to_string(u.user_id) +
                " has fewer than 2 templates");
}

double BdmModel::unequal_variance_at(std::size_t k) const {
  return unequal_variance == UnequalVariance::TwiceTotal
             ? 2.0 * (sigma_p_sq[k] + sigma_i_sq[k])
             : 2.0 * sigma_p_sq[k] + sigma_i_sq[k];
}

Dispersions estimate_dispersions(const Gallery& gallery) {
  gallery.validate();
  const std::size_t d = gallery.feature_length();
  const auto& users = gallery.users();

  std::vector<std::vector<double>> means;
  means.reserve(users.size());
  std::vector<double> within(d, 0.0);
  std::size_t dof = 0;
  for (const auto& u : users) {
    std::vector<double> m(d, 0.0);
    for (const auto& t : u.templates)
      for (std::size_t k = 0; k < d; ++k) m[k] += t[k];
    for (double& v : m) v /= static_cast<double>(u.templates.size());
    for (const auto& t : u.templates)
      for (std::size_t k = 0; k < d; ++k)
        within[k] += (t[k] - m[k]) * (t[k] - m[k]);
    dof += u.templates.size() - 1;
    means.push_back(std::move(m));
  }

  Dispersions out;
  out.sigma_i_sq.resize(d);
  out.sigma_p_sq.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    out.sigma_i_sq[k] = within[k] / static_cast<double>(dof);

  std::vector<double> grand(d, 0.0);
  for (const auto& m : means)
    for (std::size_t k = 0; k < d; ++k) grand[k] += m[k];
  for (double& v : grand) v /= static_cast<double>(means.size());
  for (const auto& m : means)
    for (std::size_t k = 0; k < d; ++k)
      out.sigma_p_sq[k] += (m[k] - grand[k]) * (m[k] - grand[k]);
  for (double& v : out.sigma_p_sq) v /= static_cast<double>(means.size() - 1);
  return out;
}

std::vector<double> dispersion_ratios(const Dispersions& d) {
  std::vector<double> r(d.sigma_i_sq.size(), 1.0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double total = d.sigma_p_sq[k] + d.sigma_i_sq[k];
    if (total > 0.0) r[k] = d.sigma_i_sq[k] / total;
  }
  return r;
}

std::vector<std::size_t> select_components(const BdmModel& model,
                                           double sigma_threshold) {
  require(sigma_threshold >= 0.0 && sigma_threshold <= 1.0,
          ErrorCode::InvalidArgument, "sigma threshold must lie in [0,1]");
  std::vector<std::size_t> sel;
  for (std::size_t k = 0; k < model.ratios.size(); ++k) {
    const double total = model.sigma_p_sq[k] + model.sigma_i_sq[k];
    if (total > 0.0 && model.ratios[k] <= sigma_threshold) sel.push_back(k);
  }
  if (sel.empty())
    fail(ErrorCode::EmptySelection,
         "no component has a dispersion ratio <= " +
             std::to_string(sigma_threshold) + "; raise the sigma threshold");
  return sel;
}

BdmModel train_bdm(const Gallery& gallery, double sigma_threshold) {
  Dispersions d = estimate_dispersions(gallery);
  BdmModel model;
  model.ratios = dispersion_ratios(d);
  model.sigma_i_sq = std::move(d.sigma_i_sq);
  model.sigma_p_sq = std::move(d.sigma_p_sq);
  model.sigma_threshold = sigma_threshold;
  model.selected = select_components(model, sigma_threshold);
  return model;
}

double g_score(std::span<const double> diff, const BdmModel& model) {
  require(diff.size() == model.feature_length(), ErrorCode::DimensionMismatch,
          "g_score: difference length does not match the model");
  require(!model.selected.empty(), ErrorCode::EmptySelection,
          "g_score: model has no selected components");
  double g = model.log_prior_ratio;
  for (std::size_t k : model.selected) {
    const double x = diff[k];
    require(std::isfinite(x), ErrorCode::InvalidArgument,
            "g_score: non-finite difference");
    require(model.sigma_i_sq[k] >= kVarianceFloor, ErrorCode::Singular,
            "g_score: component " + std::to_string(k) +
                " has zero within-user variance (singular equal density)");
    const double ve = model.equal_variance(k);
    const double vu = model.unequal_variance_at(k);
    g += 0.5 * std::log(ve / vu) + 0.5 * x * x * (1.0 / ve - 1.0 / vu);
  }
  return g;
}

Identification identify(std::span<const double> probe, const Gallery& gallery,
                        const BdmModel& model) {
  require(!gallery.empty(), ErrorCode::InsufficientData,
          "identify: empty gallery");
  require(probe.size() == model.feature_length() &&
              gallery.feature_length() == model.feature_length(),
          ErrorCode::DimensionMismatch,
          "identify: probe, gallery and model lengths differ");

  Identification out;
  std::vector<double> diff(probe.size());
  double best = 0.0;
  for (const auto& user : gallery.users()) {
    double agg = model.aggregation == ClassAggregation::Mean
                     ? 0.0
                     : std::numeric_limits<double>::infinity();
    for (const auto& t : user.templates) {
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = probe[k] - t[k];
      const double g = g_score(diff, model);
      if (model.aggregation == ClassAggregation::Mean)
        agg += g;
      else
        agg = std::min(agg, g);
    }
    if (model.aggregation == ClassAggregation::Mean)
      agg /= static_cast<double>(user.templates.size());
    // Users are visited in ascending id, so strict < keeps the lowest id.
    if (out.class_ids.empty() || agg < best) {
      best = agg;
      out.user_id = user.user_id;
    }
    out.class_ids.push_back(user.user_id);
    out.scores.push_back(agg);
  }
  return out;
}

std::string model_to_json(const BdmModel& model) {
  nlohmann::json j;
  j["sigma_threshold"] = model.sigma_threshold;
  j["selected"] = model.selected;
  j["sigma_i_sq"] = model.sigma_i_sq;
  j["sigma_p_sq"] = model.sigma_p_sq;
  j["log_prior_ratio"] = model.log_prior_ratio;
  j["feature_length"] = model.feature_length();
  j["unequal_variance"] = model.unequal_variance == UnequalVariance::TwiceTotal
                              ? "twice_total"
                              : "displayed";
  j["aggregation"] =
      model.aggregation == ClassAggregation::Mean ? "mean" : "min";
  return j.dump(2);
}

BdmModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("model JSON: ") + e.what());
  }
  BdmModel m;
  try {
    m.sigma_threshold = j.at("sigma_threshold").get<double>();
    m.selected = j.at("selected").get<std::vector<std::size_t>>();
    m.sigma_i_sq = j.at("sigma_i_sq").get<std::vector<double>>();
    m.sigma_p_sq = j.at("sigma_p_sq").get<std::vector<double>>();
    m.log_prior_ratio = j.value("log_prior_ratio", 0.0);
    const auto length = j.at("feature_length").get<std::size_t>();
    require(m.sigma_i_sq.size() == length && m.sigma_p_sq.size() == length,
            ErrorCode::Parse, "model JSON: variance vectors do not match "
                              "feature_length");
    if (j.value("unequal_variance", std::string("twice_total")) == "displayed")
      m.unequal_variance = UnequalVariance::DisplayedFormula;
    if (j.value("aggregation", std::string("mean")) == "min")
      m.aggregation = ClassAggregation::Min;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("model JSON: ") + e.what());
  }
  for (std::size_t k : m.selected)
    require(k < m.feature_length(), ErrorCode::Parse,
            "model JSON: selected index out of range");
  m.ratios = dispersion_ratios({m.sigma_i_sq, m.sigma_p_sq});
  return m;
}

} // namespace thermohand
