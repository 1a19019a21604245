#include "thermohand/io.hpp"

#include "thermohand/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace thermohand {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Lines of a CSV stream after the header, skipping blank lines.
struct CsvReader {
  std::istream& in;
  std::string what;
  int line_no = 0;
  std::vector<std::string> header;

  CsvReader(std::istream& in, std::string what) : in(in), what(std::move(what)) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::Parse,
            this->what + ": empty file");
    ++line_no;
    for (auto& f : split(line)) header.push_back(trim(f));
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      fields = split(line);
      for (auto& f : fields) f = trim(f);
      return true;
    }
    return false;
  }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::Parse, what + " line " + std::to_string(line_no) + ": " + msg);
  }

  int to_int(const std::string& s, const char* field) const {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      error(std::string("bad ") + field + " '" + s + "'");
    return v;
  }

  double to_double(const std::string& s, const char* field) const {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
      error(std::string("bad ") + field + " '" + s + "'");
    return v;
  }

  void expect_header(const std::vector<std::string>& names) const {
    if (header.size() < names.size() ||
        !std::equal(names.begin(), names.end(), header.begin()))
      fail(ErrorCode::MalformedHeader, what + ": header must start with " + [&] {
        std::string s;
        for (const auto& n : names) s += (s.empty() ? "" : ",") + n;
        return s;
      }());
  }
};

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::MissingFile, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot write " + path.string());
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  const std::size_t k = rows.empty() ? 0 : rows.front().values.size();
  out << "user_id,session,sample,region,spectrum";
  for (std::size_t i = 1; i <= k; ++i) out << ",v" << i;
  out << '\n';
  for (const auto& r : rows) {
    require(r.values.size() == k, ErrorCode::DimensionMismatch,
            "features: rows have different lengths");
    out << r.user_id << ',' << r.session << ',' << r.sample << ','
        << to_string(r.region) << ',' << to_string(r.spectrum);
    for (double v : r.values) out << ',' << fmt(v);
    out << '\n';
  }
}

void write_features_csv(const fs::path& path, const std::vector<FeatureRow>& rows) {
  auto out = open_out(path);
  write_features_csv(out, rows);
  require(out.good(), ErrorCode::Io, "write failed: " + path.string());
}

std::vector<FeatureRow> read_features_csv(std::istream& in) {
  CsvReader csv(in, "features");
  csv.expect_header({"user_id", "session", "sample", "region", "spectrum"});
  const std::size_t k = csv.header.size() - 5;
  require(k > 0, ErrorCode::MalformedHeader, "features: no value columns");
  std::vector<FeatureRow> rows;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != csv.header.size())
      csv.error("expected " + std::to_string(csv.header.size()) + " fields, got " +
                std::to_string(f.size()));
    FeatureRow r;
    r.user_id = csv.to_int(f[0], "user_id");
    r.session = csv.to_int(f[1], "session");
    r.sample = csv.to_int(f[2], "sample");
    try {
      r.region = parse_region(f[3]);
      r.spectrum = parse_spectrum(f[4]);
    } catch (const Error& e) {
      csv.error(e.what());
    }
    for (std::size_t i = 0; i < k; ++i)
      r.values.push_back(csv.to_double(f[5 + i], "value"));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<FeatureRow> read_features_csv(const fs::path& path) {
  auto in = open_in(path);
  try {
    return read_features_csv(in);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

Gallery gallery_from_rows(const std::vector<FeatureRow>& rows, int max_per_user,
                          const std::vector<std::size_t>& exclude) {
  std::map<int, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (std::find(exclude.begin(), exclude.end(), i) == exclude.end())
      by_user[rows[i].user_id].push_back(i);
  Gallery g;
  for (auto& [user, idx] : by_user) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(rows[a].session, rows[a].sample) <
             std::tie(rows[b].session, rows[b].sample);
    });
    const std::size_t n = max_per_user > 0
                              ? std::min(idx.size(), static_cast<std::size_t>(max_per_user))
                              : idx.size();
    for (std::size_t j = 0; j < n; ++j) g.add(user, rows[idx[j]].values);
  }
  return g;
}

ScoreTable read_score_csv(std::istream& in, ScorePolarity polarity) {
  CsvReader csv(in, "scores");
  csv.expect_header({"probe_id", "class_id", "score"});
  std::vector<std::string> probes;
  std::map<std::string, int> probe_index;
  std::map<std::pair<int, int>, double> cells; // (probe index, class id)
  std::vector<int> classes;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 3) csv.error("expected 3 fields");
    auto [it, fresh] = probe_index.emplace(f[0], static_cast<int>(probes.size()));
    if (fresh) probes.push_back(f[0]);
    const int c = csv.to_int(f[1], "class_id");
    const double v = csv.to_double(f[2], "score");
    if (!cells.emplace(std::make_pair(it->second, c), v).second)
      csv.error("duplicate score for probe " + f[0] + " class " + f[1]);
    classes.push_back(c);
  }
  require(!probes.empty(), ErrorCode::InsufficientData, "scores: no rows");
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  ScoreTable t;
  t.probe_ids = probes;
  t.class_ids = classes;
  std::vector<double> values;
  values.reserve(probes.size() * classes.size());
  for (std::size_t p = 0; p < probes.size(); ++p)
    for (int c : classes) {
      auto it = cells.find({static_cast<int>(p), c});
      require(it != cells.end(), ErrorCode::Parse,
              "scores: missing score for probe " + probes[p] + " class " +
                  std::to_string(c));
      values.push_back(it->second);
    }
  t.matrix = ScoreMatrix(static_cast<int>(probes.size()),
                         static_cast<int>(classes.size()), std::move(values), polarity);
  return t;
}

ScoreTable read_score_csv(const fs::path& path, ScorePolarity polarity) {
  auto in = open_in(path);
  try {
    return read_score_csv(in, polarity);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void write_score_csv(std::ostream& out, const ScoreTable& t) {
  require(static_cast<int>(t.probe_ids.size()) == t.matrix.probes &&
              static_cast<int>(t.class_ids.size()) == t.matrix.classes,
          ErrorCode::DimensionMismatch, "scores: ids do not match the matrix");
  out << "probe_id,class_id,score\n";
  for (int p = 0; p < t.matrix.probes; ++p)
    for (int c = 0; c < t.matrix.classes; ++c)
      out << t.probe_ids[static_cast<std::size_t>(p)] << ','
          << t.class_ids[static_cast<std::size_t>(c)] << ',' << fmt(t.matrix(p, c))
          << '\n';
}

void write_score_csv(const fs::path& path, const ScoreTable& t) {
  auto out = open_out(path);
  write_score_csv(out, t);
  require(out.good(), ErrorCode::Io, "write failed: " + path.string());
}

std::vector<TruthEntry> read_truth_csv(std::istream& in) {
  CsvReader csv(in, "truth");
  csv.expect_header({"probe_id", "class_id"});
  const bool has_test = csv.header.size() >= 3 && csv.header[2] == "test";
  std::vector<TruthEntry> out;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != csv.header.size()) csv.error("wrong number of fields");
    TruthEntry e;
    e.probe_id = f[0];
    e.class_id = csv.to_int(f[1], "class_id");
    if (has_test) e.test = csv.to_int(f[2], "test");
    if (e.test < 1) csv.error("test must be positive");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TruthEntry> read_truth_csv(const fs::path& path) {
  auto in = open_in(path);
  try {
    return read_truth_csv(in);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void write_truth_csv(std::ostream& out, const std::vector<TruthEntry>& truth) {
  out << "probe_id,class_id,test\n";
  for (const auto& e : truth)
    out << e.probe_id << ',' << e.class_id << ',' << e.test << '\n';
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  auto in = open_in(path);
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& s) -> fs::path {
    if (s.empty()) return {};
    const fs::path p(s);
    return p.is_absolute() ? p : base / p;
  };
  try {
    CsvReader csv(in, "manifest");
    csv.expect_header({"user_id", "session", "sample", "vis_path", "th_path"});
    std::vector<ManifestEntry> out;
    std::vector<std::string> f;
    while (csv.next(f)) {
      if (f.size() < 5 || f.size() > csv.header.size())
        csv.error("wrong number of fields");
      f.resize(csv.header.size());
      ManifestEntry e;
      e.user_id = csv.to_int(f[0], "user_id");
      e.session = csv.to_int(f[1], "session");
      e.sample = csv.to_int(f[2], "sample");
      e.vis_path = resolve(f[3]);
      e.th_path = resolve(f[4]);
      for (std::size_t i = 5; i < csv.header.size(); ++i) {
        if (csv.header[i] == "mask_path") e.mask_path = resolve(f[i]);
        else if (csv.header[i] == "transform_path") e.transform_path = resolve(f[i]);
      }
      if (e.vis_path.empty() || e.th_path.empty()) csv.error("missing image path");
      out.push_back(std::move(e));
    }
    return out;
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  const fs::path base = path.parent_path();
  auto rel = [&](const fs::path& p) {
    if (p.empty()) return std::string();
    return (base.empty() ? p : p.lexically_relative(base)).generic_string();
  };
  auto out = open_out(path);
  out << "user_id,session,sample,vis_path,th_path,mask_path,transform_path\n";
  for (const auto& e : entries)
    out << e.user_id << ',' << e.session << ',' << e.sample << ',' << rel(e.vis_path)
        << ',' << rel(e.th_path) << ',' << rel(e.mask_path) << ','
        << rel(e.transform_path) << '\n';
  require(out.good(), ErrorCode::Io, "write failed: " + path.string());
}

std::vector<Acquisition> load_acquisitions(const std::vector<ManifestEntry>& entries) {
  std::vector<Acquisition> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    Acquisition a;
    a.user_id = e.user_id;
    a.session = e.session;
    a.sample = e.sample;
    a.vis = load_pgm(e.vis_path);
    a.th = load_pgm(e.th_path);
    if (!e.transform_path.empty()) a.vis_to_th = read_transform(e.transform_path);
    out.push_back(std::move(a));
  }
  return out;
}

fs::path write_dataset(const SyntheticDataset& dataset, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::Io,
          "cannot create directory " + dir.string());
  std::vector<ManifestEntry> entries;
  char stem[64];
  for (const auto& s : dataset.samples) {
    std::snprintf(stem, sizeof stem, "u%03d_s%d_k%d", s.user_id, s.session, s.sample);
    ManifestEntry e;
    e.user_id = s.user_id;
    e.session = s.session;
    e.sample = s.sample;
    e.vis_path = dir / (std::string(stem) + "_vis.pgm");
    e.th_path = dir / (std::string(stem) + "_th.pgm");
    e.mask_path = dir / (std::string(stem) + "_th_mask.pgm");
    e.transform_path = dir / (std::string(stem) + "_transform.txt");
    save_pgm(s.vis, e.vis_path, 8);
    save_pgm(s.th, e.th_path, 16);
    save_mask(s.th_mask, e.mask_path);
    save_mask(s.vis_mask, dir / (std::string(stem) + "_vis_mask.pgm"));
    write_transform(e.transform_path, s.vis_to_th);
    entries.push_back(std::move(e));
  }
  const fs::path manifest = dir / "manifest.csv";
  write_manifest(manifest, entries);
  return manifest;
}

void score_tables(const EvaluationReport& report, ScoreTable& vis, ScoreTable& th,
                  std::vector<TruthEntry>& truth) {
  require(!report.scores.empty() && report.scores.front().vis.probes > 0 &&
              report.scores.front().th.probes > 0,
          ErrorCode::InsufficientData, "report holds no VIS and TH scores");
  vis = {};
  th = {};
  truth.clear();
  vis.class_ids = th.class_ids = report.class_ids;
  std::vector<double> vs, ts;
  char id[48];
  for (std::size_t k = 0; k < report.scores.size(); ++k) {
    const TestScores& s = report.scores[k];
    vs.insert(vs.end(), s.vis.scores.begin(), s.vis.scores.end());
    ts.insert(ts.end(), s.th.scores.begin(), s.th.scores.end());
    for (std::size_t p = 0; p < s.truth.size(); ++p) {
      std::snprintf(id, sizeof id, "t%zu-u%d", k + 1, s.probe_users[p]);
      vis.probe_ids.push_back(id);
      truth.push_back({id, report.class_ids[static_cast<std::size_t>(s.truth[p])],
                       static_cast<int>(k + 1)});
    }
  }
  th.probe_ids = vis.probe_ids;
  const int probes = static_cast<int>(vis.probe_ids.size());
  const int classes = static_cast<int>(vis.class_ids.size());
  vis.matrix = ScoreMatrix(probes, classes, std::move(vs), report.scores.front().vis.polarity);
  th.matrix = ScoreMatrix(probes, classes, std::move(ts), report.scores.front().th.polarity);
}

std::vector<FeatureRow> extract_features(const std::vector<ManifestEntry>& entries,
                                         RegionKind region, Spectrum spectrum,
                                         const FeatureConfig& config,
                                         bool register_thermal) {
  FeatureConfig fc = config;
  fc.region = region;
  std::vector<FeatureRow> rows;
  rows.reserve(entries.size());
  for (const auto& e : entries) {
    FeatureRow r;
    r.user_id = e.user_id;
    r.session = e.session;
    r.sample = e.sample;
    r.region = region;
    r.spectrum = spectrum;
    try {
      Acquisition a;
      a.user_id = e.user_id;
      a.session = e.session;
      a.sample = e.sample;
      a.vis = load_pgm(e.vis_path);
      if (spectrum == Spectrum::Thermal) {
        a.th = load_pgm(e.th_path);
        if (!register_thermal && !e.transform_path.empty())
          a.vis_to_th = read_transform(e.transform_path);
      }
      r.values = spectrum_features(a, spectrum, fc);
    } catch (const Error& err) {
      fail(err.code(), "user " + std::to_string(e.user_id) + " session " +
                           std::to_string(e.session) + " sample " +
                           std::to_string(e.sample) + ": " + err.what());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

// th rearranged to vis's probe and class order.
ScoreMatrix aligned(const ScoreTable& vis, const ScoreTable& th) {
  require(vis.class_ids == th.class_ids, ErrorCode::DimensionMismatch,
          "score files list different classes");
  require(vis.probe_ids.size() == th.probe_ids.size(), ErrorCode::DimensionMismatch,
          "score files list different numbers of probes");
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < th.probe_ids.size(); ++i)
    index[th.probe_ids[i]] = static_cast<int>(i);
  std::vector<double> values;
  values.reserve(th.matrix.scores.size());
  for (const auto& id : vis.probe_ids) {
    auto it = index.find(id);
    require(it != index.end(), ErrorCode::DimensionMismatch,
            "probe " + id + " is missing from the TH scores");
    auto row = th.matrix.row(it->second);
    values.insert(values.end(), row.begin(), row.end());
  }
  require(vis.matrix.polarity == th.matrix.polarity, ErrorCode::InvalidArgument,
          "score files must share one polarity");
  return ScoreMatrix(th.matrix.probes, th.matrix.classes, std::move(values),
                     th.matrix.polarity);
}

std::vector<int> table_decisions(const ScoreMatrix& vis, const ScoreMatrix& th,
                                 FusionRule rule, double alpha,
                                 Normalization normalization, ScoreMatrix* fused) {
  ScoreMatrix out;
  if (rule == FusionRule::Weighted) {
    out = weighted_combine(normalize_scores(vis, normalization),
                           normalize_scores(th, normalization), alpha);
  } else if (rule == FusionRule::MajorityVote) {
    std::vector<double> values(vis.scores.size(), 0.0);
    for (int p = 0; p < vis.probes; ++p) {
      const std::array<int, 2> votes = {vis.best_class(p), th.best_class(p)};
      const int c = majority_vote(votes, vis.ranking(p));
      values[static_cast<std::size_t>(p) * vis.classes + c] = 1.0;
    }
    out = ScoreMatrix(vis.probes, vis.classes, std::move(values),
                      ScorePolarity::HigherIsBetter);
  } else {
    const Normalization n =
        rule == FusionRule::Product ? Normalization::MinMax : normalization;
    const std::array<ScoreMatrix, 2> systems = {
        normalize_scores(to_higher_is_better(vis), n),
        normalize_scores(to_higher_is_better(th), n)};
    out = combine_scores(systems, rule);
  }
  std::vector<int> d = decisions(out);
  if (fused) *fused = std::move(out);
  return d;
}

} // namespace

ScoreTable fuse_tables(const ScoreTable& vis, const ScoreTable& th, FusionRule rule,
                       double alpha, Normalization normalization) {
  const ScoreMatrix t = aligned(vis, th);
  ScoreTable out;
  out.probe_ids = vis.probe_ids;
  out.class_ids = vis.class_ids;
  table_decisions(vis.matrix, t, rule, alpha, normalization, &out.matrix);
  return out;
}

std::vector<SweepRow> sweep_tables(const ScoreTable& vis, const ScoreTable& th,
                                   const std::vector<TruthEntry>& truth,
                                   std::span<const double> grid,
                                   Normalization normalization) {
  require(!grid.empty(), ErrorCode::InvalidArgument, "sweep: empty alpha grid");
  const ScoreMatrix t = aligned(vis, th);
  std::map<std::string, int> probe_index;
  for (std::size_t i = 0; i < vis.probe_ids.size(); ++i)
    probe_index[vis.probe_ids[i]] = static_cast<int>(i);
  std::map<int, int> class_index;
  for (std::size_t i = 0; i < vis.class_ids.size(); ++i)
    class_index[vis.class_ids[i]] = static_cast<int>(i);

  // Per test: probe rows and the true column of each.
  std::array<std::vector<int>, kTests> rows, cols;
  std::vector<bool> covered(vis.probe_ids.size(), false);
  for (const auto& e : truth) {
    require(e.test >= 1 && e.test <= kTests, ErrorCode::InvalidArgument,
            "sweep: truth test must be 1.." + std::to_string(kTests));
    auto p = probe_index.find(e.probe_id);
    require(p != probe_index.end(), ErrorCode::DimensionMismatch,
            "sweep: truth probe " + e.probe_id + " has no scores");
    auto c = class_index.find(e.class_id);
    require(c != class_index.end(), ErrorCode::DimensionMismatch,
            "sweep: truth class " + std::to_string(e.class_id) + " has no scores");
    require(!covered[static_cast<std::size_t>(p->second)], ErrorCode::InvalidArgument,
            "sweep: truth lists probe " + e.probe_id + " twice");
    covered[static_cast<std::size_t>(p->second)] = true;
    rows[static_cast<std::size_t>(e.test - 1)].push_back(p->second);
    cols[static_cast<std::size_t>(e.test - 1)].push_back(c->second);
  }
  for (std::size_t i = 0; i < covered.size(); ++i)
    require(covered[i], ErrorCode::InsufficientData,
            "sweep: probe " + vis.probe_ids[i] + " has no truth entry");
  for (int k = 0; k < kTests; ++k)
    require(!rows[static_cast<std::size_t>(k)].empty(), ErrorCode::InsufficientData,
            "sweep: truth has no probes for test " + std::to_string(k + 1));

  std::vector<SweepRow> out;
  for (double alpha : grid) {
    const std::vector<int> d =
        table_decisions(vis.matrix, t, FusionRule::Weighted, alpha, normalization, nullptr);
    SweepRow row;
    row.alpha = alpha;
    for (std::size_t k = 0; k < static_cast<std::size_t>(kTests); ++k) {
      std::vector<int> decided;
      for (int r : rows[k]) decided.push_back(d[static_cast<std::size_t>(r)]);
      row.rates[k] = identification_rate(decided, cols[k]);
    }
    summarize(row.rates, row.mean, row.std_dev);
    out.push_back(row);
  }
  return out;
}

Normalization parse_normalization(std::string_view name) {
  if (name == "none") return Normalization::None;
  if (name == "zscore") return Normalization::ZScore;
  if (name == "minmax") return Normalization::MinMax;
  fail(ErrorCode::InvalidArgument, "unknown normalization '" + std::string(name) +
                                       "' (expected none, zscore or minmax)");
}

} // namespace thermohand
