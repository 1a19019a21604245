#include "thermohand/config.hpp"

#include "thermohand/error.hpp"
#include "thermohand/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace thermohand {

namespace {

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::map<std::string, TomlValue> run() {
    std::map<std::string, TomlValue> out;
    std::string table;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        table = key();
        skip_spaces();
        expect(']');
        end_of_line();
        continue;
      }
      const int key_line = line_;
      std::string name = key();
      skip_spaces();
      expect('=');
      skip_spaces();
      TomlValue v = value();
      v.line = key_line;
      end_of_line();
      const std::string full = table.empty() ? name : table + "." + name;
      if (!out.emplace(full, std::move(v)).second)
        error("duplicate key '" + full + "'");
    }
    return out;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::Parse, "config line " + std::to_string(line_) + ": " + msg);
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void expect(char c) {
    if (peek() != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
  }
  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }
  void skip_blank_lines() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
        continue;
      }
      break;
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') newline();
      else break;
    }
  }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n' && peek() != '\r') error("unexpected text after value");
    newline();
  }

  std::string key() {
    std::string out;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == '.') {
        out += c;
        ++pos_;
      } else {
        break;
      }
    }
    if (out.empty()) error("expected a key");
    return out;
  }

  TomlValue value() {
    const char c = peek();
    if (c == '"') return {basic_string()};
    if (c == '\'') return {literal_string()};
    if (c == '[') return {array()};
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true};
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false};
    }
    return number();
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') error("unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) error("unterminated string");
        const char e = text_[pos_++];
        switch (e) {
        case '"': c = '"'; break;
        case '\\': c = '\\'; break;
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        default: error(std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    return out;
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t end = text_.find('\'', pos_);
    const std::size_t nl = text_.find('\n', pos_);
    if (end == std::string_view::npos || (nl != std::string_view::npos && nl < end))
      error("unterminated string");
    std::string out(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  TomlArray array() {
    ++pos_;
    TomlArray out;
    skip_array_space();
    while (peek() != ']') {
      if (at_end()) error("unterminated array");
      TomlValue v = value();
      if (v.is_array()) error("nested arrays are not supported");
      v.line = line_;
      out.push_back(std::move(v));
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
        skip_array_space();
      } else if (peek() != ']') {
        error("expected ',' or ']' in array");
      }
    }
    ++pos_;
    return out;
  }

  TomlValue number() {
    std::string token;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' ||
          c == '-' || c == '.' || c == '_') {
        if (c != '_') token += c;
        ++pos_;
      } else {
        break;
      }
    }
    if (token.empty()) error("expected a value");
    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') ++first;
    if (is_float) {
      double d = 0.0;
      auto [p, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || p != last || !std::isfinite(d))
        error("invalid number '" + token + "'");
      return {d};
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec != std::errc() || p != last) error("invalid value '" + token + "'");
    return {i};
  }
};

[[noreturn]] void type_error(const std::string& key, const TomlValue& v,
                             const char* want) {
  fail(ErrorCode::Parse, "config line " + std::to_string(v.line) + ": '" +
                             key + "' must be " + want);
}

double as_double(const std::string& key, const TomlValue& v) {
  if (auto d = std::get_if<double>(&v.value)) return *d;
  if (auto i = std::get_if<std::int64_t>(&v.value)) return static_cast<double>(*i);
  type_error(key, v, "a number");
}

} // namespace

TomlDocument TomlDocument::parse(std::string_view text) {
  TomlDocument doc;
  doc.values_ = Parser(text).run();
  return doc;
}

TomlDocument TomlDocument::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::MissingFile, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

std::string TomlDocument::get_string(const std::string& key,
                                     const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (!it->second.is_string()) type_error(key, it->second, "a string");
  return std::get<std::string>(it->second.value);
}

std::int64_t TomlDocument::get_int(const std::string& key,
                                   std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (auto i = std::get_if<std::int64_t>(&it->second.value)) return *i;
  type_error(key, it->second, "an integer");
}

double TomlDocument::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return as_double(key, it->second);
}

bool TomlDocument::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (auto b = std::get_if<bool>(&it->second.value)) return *b;
  type_error(key, it->second, "true or false");
}

std::vector<std::string>
TomlDocument::get_strings(const std::string& key,
                          const std::vector<std::string>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.is_string()) return {std::get<std::string>(it->second.value)};
  if (!it->second.is_array()) type_error(key, it->second, "a string or array of strings");
  std::vector<std::string> out;
  for (const auto& v : std::get<TomlArray>(it->second.value)) {
    if (!v.is_string()) type_error(key, v, "an array of strings");
    out.push_back(std::get<std::string>(v.value));
  }
  return out;
}

std::vector<double>
TomlDocument::get_doubles(const std::string& key,
                          const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (!it->second.is_array()) return {as_double(key, it->second)};
  std::vector<double> out;
  for (const auto& v : std::get<TomlArray>(it->second.value))
    out.push_back(as_double(key, v));
  return out;
}

void TomlDocument::check_keys(const std::string& table,
                              const std::vector<std::string>& allowed) const {
  const std::string prefix = table + ".";
  for (const auto& [key, v] : values_) {
    if (key.compare(0, prefix.size(), prefix) != 0) continue;
    const std::string name = key.substr(prefix.size());
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
      fail(ErrorCode::Parse, "config line " + std::to_string(v.line) +
                                 ": unknown key '" + key + "'");
  }
}

SyntheticConfig synthetic_config(const TomlDocument& doc) {
  doc.check_keys("synthetic",
                 {"num_users", "sessions", "samples_per_session", "image_size",
                  "cold_finger_prob", "pose_rotation_deg", "pose_translation_px",
                  "pose_scale", "finger_jitter_deg", "sensor_rotation_deg",
                  "sensor_translation_px", "sensor_scale", "shape_spread",
                  "vis_noise", "th_noise", "th_background", "th_hand",
                  "th_session_drift", "th_pattern_drift", "seed"});
  SyntheticConfig c;
  const std::string t = "synthetic.";
  c.num_users = static_cast<int>(doc.get_int(t + "num_users", c.num_users));
  c.sessions = static_cast<int>(doc.get_int(t + "sessions", c.sessions));
  c.samples_per_session = static_cast<int>(
      doc.get_int(t + "samples_per_session", c.samples_per_session));
  c.image_size = static_cast<int>(doc.get_int(t + "image_size", c.image_size));
  c.cold_finger_prob = doc.get_double(t + "cold_finger_prob", c.cold_finger_prob);
  c.pose_rotation_deg = doc.get_double(t + "pose_rotation_deg", c.pose_rotation_deg);
  c.pose_translation_px =
      doc.get_double(t + "pose_translation_px", c.pose_translation_px);
  c.pose_scale = doc.get_double(t + "pose_scale", c.pose_scale);
  c.finger_jitter_deg = doc.get_double(t + "finger_jitter_deg", c.finger_jitter_deg);
  c.sensor_rotation_deg =
      doc.get_double(t + "sensor_rotation_deg", c.sensor_rotation_deg);
  c.sensor_translation_px =
      doc.get_double(t + "sensor_translation_px", c.sensor_translation_px);
  c.sensor_scale = doc.get_double(t + "sensor_scale", c.sensor_scale);
  c.shape_spread = doc.get_double(t + "shape_spread", c.shape_spread);
  c.vis_noise = doc.get_double(t + "vis_noise", c.vis_noise);
  c.th_noise = doc.get_double(t + "th_noise", c.th_noise);
  c.th_background = doc.get_double(t + "th_background", c.th_background);
  c.th_hand = doc.get_double(t + "th_hand", c.th_hand);
  c.th_session_drift = doc.get_double(t + "th_session_drift", c.th_session_drift);
  c.th_pattern_drift = doc.get_double(t + "th_pattern_drift", c.th_pattern_drift);
  const std::int64_t seed = doc.get_int(t + "seed", static_cast<std::int64_t>(c.seed));
  require(seed >= 0, ErrorCode::InvalidArgument, "config: seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.validate();
  return c;
}

PipelineConfig pipeline_config(const TomlDocument& doc) {
  doc.check_keys("pipeline",
                 {"regions", "spectra", "feature_lengths", "vis_sigma_threshold",
                  "th_sigma_threshold", "fusion_rules", "alpha",
                  "fusion_normalization", "alpha_grid", "register_thermal",
                  "train_count", "normalized_size", "scan_order"});
  doc.check_keys("segmentation", {"otsu_bins", "manual_threshold",
                                  "majority_cleanup", "vis_polarity"});
  doc.check_keys("registration",
                 {"rotation_step", "translation_step_px", "log_scale_step",
                  "restarts", "moment_start", "tolerance", "max_iterations"});
  doc.check_keys("regions",
                 {"central_row_begin", "central_row_end", "central_col_begin",
                  "central_col_end", "finger_width", "finger_height", "apply_mask",
                  "min_component_fraction", "palm_line_margin"});

  PipelineConfig c;
  const std::string p = "pipeline.";
  c.regions.clear();
  for (const auto& r : doc.get_strings(p + "regions", {"hand"}))
    c.regions.push_back(parse_region(r));
  c.spectra.clear();
  for (const auto& s : doc.get_strings(p + "spectra", {"vis", "th"}))
    c.spectra.push_back(parse_spectrum(s));
  c.feature_lengths.clear();
  for (double v : doc.get_doubles(p + "feature_lengths", {100})) {
    require(v == std::floor(v) && v > 0, ErrorCode::InvalidArgument,
            "config: feature_lengths must be positive integers");
    c.feature_lengths.push_back(static_cast<int>(v));
  }
  c.vis_sigma_threshold = doc.get_double(p + "vis_sigma_threshold", c.vis_sigma_threshold);
  c.th_sigma_threshold = doc.get_double(p + "th_sigma_threshold", c.th_sigma_threshold);
  for (const auto& r : doc.get_strings(p + "fusion_rules", {}))
    c.fusion_rules.push_back(parse_rule(r));
  c.alpha = doc.get_double(p + "alpha", c.alpha);
  require(c.alpha >= 0.0 && c.alpha <= 1.0, ErrorCode::InvalidArgument,
          "config: alpha must lie in [0,1]");
  c.fusion_normalization =
      parse_normalization(doc.get_string(p + "fusion_normalization", "minmax"));
  if (doc.contains(p + "alpha_grid")) {
    const auto& v = doc.values().at(p + "alpha_grid");
    c.alpha_grid = v.is_string() ? parse_grid(std::get<std::string>(v.value))
                                 : doc.get_doubles(p + "alpha_grid", {});
  }
  c.register_thermal = doc.get_bool(p + "register_thermal", c.register_thermal);
  c.train_count = static_cast<int>(doc.get_int(p + "train_count", c.train_count));

  FeatureConfig& f = c.features;
  f.normalized_size = static_cast<int>(doc.get_int(p + "normalized_size", f.normalized_size));
  const std::string order = doc.get_string(p + "scan_order", "zigzag");
  if (order == "zigzag") f.order = ScanOrder::Zigzag;
  else if (order == "raster") f.order = ScanOrder::Raster;
  else fail(ErrorCode::InvalidArgument, "config: unknown scan_order '" + order + "'");

  const std::string s = "segmentation.";
  f.segmentation.otsu_bins =
      static_cast<int>(doc.get_int(s + "otsu_bins", f.segmentation.otsu_bins));
  if (doc.contains(s + "manual_threshold"))
    f.segmentation.manual_threshold = doc.get_double(s + "manual_threshold", 0.5);
  f.segmentation.majority_cleanup =
      doc.get_bool(s + "majority_cleanup", f.segmentation.majority_cleanup);
  const std::string pol = doc.get_string(s + "vis_polarity", "above");
  if (pol == "above") f.segmentation.vis_polarity = Polarity::HandAbove;
  else if (pol == "below") f.segmentation.vis_polarity = Polarity::HandBelow;
  else fail(ErrorCode::InvalidArgument, "config: vis_polarity must be above or below");

  const std::string g = "registration.";
  RegistrationConfig& r = f.registration;
  r.rotation_step = doc.get_double(g + "rotation_step", r.rotation_step);
  r.translation_step_px = doc.get_double(g + "translation_step_px", r.translation_step_px);
  r.log_scale_step = doc.get_double(g + "log_scale_step", r.log_scale_step);
  r.restarts = static_cast<int>(doc.get_int(g + "restarts", r.restarts));
  r.moment_start = doc.get_bool(g + "moment_start", r.moment_start);
  r.simplex.tolerance = doc.get_double(g + "tolerance", r.simplex.tolerance);
  r.simplex.max_iterations =
      static_cast<int>(doc.get_int(g + "max_iterations", r.simplex.max_iterations));

  const std::string q = "regions.";
  RegionConfig& rc = f.region_config;
  rc.central_row_begin = doc.get_double(q + "central_row_begin", rc.central_row_begin);
  rc.central_row_end = doc.get_double(q + "central_row_end", rc.central_row_end);
  rc.central_col_begin = doc.get_double(q + "central_col_begin", rc.central_col_begin);
  rc.central_col_end = doc.get_double(q + "central_col_end", rc.central_col_end);
  rc.finger_width = static_cast<int>(doc.get_int(q + "finger_width", rc.finger_width));
  rc.finger_height = static_cast<int>(doc.get_int(q + "finger_height", rc.finger_height));
  rc.apply_mask = doc.get_bool(q + "apply_mask", rc.apply_mask);
  rc.min_component_fraction =
      doc.get_double(q + "min_component_fraction", rc.min_component_fraction);
  rc.palm_line_margin = doc.get_double(q + "palm_line_margin", rc.palm_line_margin);
  return c;
}

} // namespace thermohand
