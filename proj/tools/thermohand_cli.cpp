// Command-line front end. Talks to the library only through the C API.

#include "thermohand/thermohand.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct Failure {
  thand_status status;
  std::string message;
};

void check(thand_status s) {
  if (s != THAND_OK) throw Failure{s, thand_last_error()};
}

[[noreturn]] void usage(const std::string& message) {
  throw Failure{THAND_ERR_INVALID_ARGUMENT, message};
}

template <class T, void (*Free)(T*)> struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Image = std::unique_ptr<thand_image, Deleter<thand_image, thand_image_free>>;
using Mask = std::unique_ptr<thand_mask, Deleter<thand_mask, thand_mask_free>>;
using Features =
    std::unique_ptr<thand_features, Deleter<thand_features, thand_features_free>>;
using Model = std::unique_ptr<thand_model, Deleter<thand_model, thand_model_free>>;
using Scores = std::unique_ptr<thand_scores, Deleter<thand_scores, thand_scores_free>>;

Image load_image(const std::string& path) {
  thand_image* p = nullptr;
  check(thand_image_load_pgm(path.c_str(), 0, &p));
  return Image(p);
}

Features load_features(const std::string& path) {
  thand_features* p = nullptr;
  check(thand_features_load(path.c_str(), &p));
  return Features(p);
}

Scores load_scores(const std::string& path, bool higher) {
  thand_scores* p = nullptr;
  check(thand_scores_load(path.c_str(), higher ? 1 : 0, &p));
  return Scores(p);
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Failure{THAND_ERR_IO, "cannot create directory " + dir.string()};
}

// A directory means its manifest.csv.
std::string manifest_path(const std::string& in) {
  return fs::is_directory(in) ? (fs::path(in) / "manifest.csv").string() : in;
}

struct GenerateArgs {
  std::string config, out;
};

void run_generate(const GenerateArgs& a) {
  size_t n = 0;
  check(thand_generate(a.config.empty() ? nullptr : a.config.c_str(), a.out.c_str(), &n));
  std::printf("wrote %zu samples and %s\n", n,
              (fs::path(a.out) / "manifest.csv").string().c_str());
}

struct SegmentArgs {
  std::string vis, th, calib, out;
  bool do_register = false;
  std::optional<double> threshold;
  bool no_cleanup = false;
};

void run_segment(const SegmentArgs& a) {
  if (a.calib.empty() == !a.do_register)
    usage("segment needs exactly one of --calib or --register");
  const Image vis = load_image(a.vis);
  const Image th = load_image(a.th);

  thand_segment_options opt;
  thand_segment_options_default(&opt);
  if (a.threshold) {
    opt.use_manual_threshold = 1;
    opt.manual_threshold = *a.threshold;
  }
  if (a.no_cleanup) opt.majority_cleanup = 0;

  thand_transform t{};
  if (a.do_register) {
    thand_mask* vm = nullptr;
    check(thand_segment_visible(vis.get(), &opt, &vm));
    const Mask vis_mask(vm);
    thand_registration r{};
    check(thand_register(vis_mask.get(), th.get(), nullptr, &r));
    t = r.transform;
    std::printf("registered: rotation %.6f rad, dx %.3f, dy %.3f, scale %.5f, "
                "1-Dice %.5f -> %.5f\n",
                t.rotation, t.dx, t.dy, t.scale, r.initial_objective, r.objective);
  } else {
    check(thand_transform_read(a.calib.c_str(), &t));
  }

  thand_mask* vm = nullptr;
  check(thand_segment_visible(vis.get(), &opt, &vm));
  const Mask vis_mask(vm);
  thand_mask* tm = nullptr;
  thand_image* mt = nullptr;
  check(thand_segment_thermal(vis.get(), th.get(), &t, &opt, &tm, &mt));
  const Mask th_mask(tm);
  const Image masked(mt);

  const fs::path dir(a.out);
  make_dir(dir);
  check(thand_mask_save(vis_mask.get(), (dir / "vis_mask.pgm").string().c_str()));
  check(thand_mask_save(th_mask.get(), (dir / "th_mask.pgm").string().c_str()));
  check(thand_image_save_pgm(masked.get(), (dir / "masked_th.pgm").string().c_str(), 16));
  check(thand_transform_write((dir / "transform.txt").string().c_str(), &t));
  std::printf("wrote masks, masked TH and transform to %s\n", dir.string().c_str());
}

struct ExtractArgs {
  std::string in, region = "hand", spectrum = "vis", out, config;
  int length = 100;
  bool do_register = false;
};

void run_extract(const ExtractArgs& a) {
  thand_extract_options opt;
  thand_extract_options_default(&opt);
  opt.region = a.region.c_str();
  opt.spectrum = a.spectrum.c_str();
  opt.length = a.length;
  opt.register_thermal = a.do_register ? 1 : 0;
  opt.config_path = a.config.empty() ? nullptr : a.config.c_str();
  const std::string manifest = manifest_path(a.in);
  thand_features* f = nullptr;
  check(thand_extract(manifest.c_str(), &opt, &f));
  const Features features(f);
  check(thand_features_save(features.get(), a.out.c_str()));
  std::printf("wrote %zu rows of %d features to %s\n", thand_features_count(features.get()),
              thand_features_length(features.get()), a.out.c_str());
}

struct TrainArgs {
  std::string features, out;
  double sigma_threshold = 0.65;
  int max_per_user = 0;
};

void run_train(const TrainArgs& a) {
  const Features features = load_features(a.features);
  thand_model* m = nullptr;
  check(thand_train(features.get(), a.sigma_threshold, a.max_per_user, &m));
  const Model model(m);
  check(thand_model_save(model.get(), a.out.c_str()));
  std::printf("selected %d of %d components; wrote %s\n",
              thand_model_selected_count(model.get()),
              thand_model_feature_length(model.get()), a.out.c_str());
}

struct IdentifyArgs {
  std::string model, gallery, probe, probe_features;
  int max_per_user = 0;
  int top = 0;
};

// "user:session:sample"
void parse_probe(const std::string& spec, int& user, int& session, int& sample) {
  std::istringstream ss(spec);
  char c1 = 0, c2 = 0;
  if (!(ss >> user >> c1 >> session >> c2 >> sample) || c1 != ':' || c2 != ':' ||
      !ss.eof())
    usage("--probe must look like user:session:sample, got '" + spec + "'");
}

void run_identify(const IdentifyArgs& a) {
  thand_model* m = nullptr;
  check(thand_model_load(a.model.c_str(), &m));
  const Model model(m);
  const Features gallery = load_features(a.gallery);

  int user = 0, session = 0, sample = 0;
  parse_probe(a.probe, user, session, sample);
  const bool separate = !a.probe_features.empty();
  Features probes_owned;
  if (separate) probes_owned = load_features(a.probe_features);
  const thand_features* probes = separate ? probes_owned.get() : gallery.get();

  size_t row = 0;
  check(thand_features_find(probes, user, session, sample, &row));
  const double* values = nullptr;
  check(thand_features_row(probes, row, nullptr, nullptr, nullptr, &values));
  const int length = thand_features_length(probes);
  const long exclude = separate ? -1 : static_cast<long>(row);

  size_t count = 0;
  check(thand_identify(model.get(), gallery.get(), a.max_per_user, exclude, values,
                       length, nullptr, nullptr, 0, &count));
  std::vector<int> ids(count);
  std::vector<double> scores(count);
  check(thand_identify(model.get(), gallery.get(), a.max_per_user, exclude, values,
                       length, ids.data(), scores.data(), count, &count));
  const size_t shown = a.top > 0 ? std::min(count, static_cast<size_t>(a.top)) : count;
  std::printf("rank,class_id,score\n");
  for (size_t i = 0; i < shown; ++i)
    std::printf("%zu,%d,%.10g\n", i + 1, ids[i], scores[i]);
}

struct EvaluateArgs {
  std::string manifest, config, out, sweep_out, scores_dir;
};

void run_evaluate(const EvaluateArgs& a) {
  const std::string manifest = manifest_path(a.manifest);
  check(thand_evaluate(manifest.c_str(), a.config.empty() ? nullptr : a.config.c_str(),
                       a.out.c_str(), a.sweep_out.empty() ? nullptr : a.sweep_out.c_str(),
                       a.scores_dir.empty() ? nullptr : a.scores_dir.c_str()));
  std::printf("wrote %s\n", a.out.c_str());
}

struct FuseArgs {
  std::string vis, th, rule, out, sweep, truth, normalize = "none", polarity = "lower";
  std::optional<double> alpha;
};

void run_fuse(const FuseArgs& a) {
  const bool higher = a.polarity == "higher";
  const Scores vis = load_scores(a.vis, higher);
  const Scores th = load_scores(a.th, higher);
  if (!a.sweep.empty()) {
    if (a.rule != "weighted") usage("--sweep only applies to --rule weighted");
    if (a.truth.empty()) usage("--sweep needs --truth with probe_id,class_id,test");
    if (a.alpha) usage("--alpha and --sweep are mutually exclusive");
    check(thand_fuse_sweep(vis.get(), th.get(), a.truth.c_str(), a.sweep.c_str(),
                           a.normalize.c_str(), a.out.c_str()));
    std::printf("wrote sweep %s\n", a.out.c_str());
    return;
  }
  if (a.rule == "weighted" && !a.alpha) usage("--rule weighted needs --alpha or --sweep");
  if (a.rule != "weighted" && a.alpha) usage("--alpha only applies to --rule weighted");
  thand_scores* f = nullptr;
  check(thand_fuse(vis.get(), th.get(), a.rule.c_str(), a.alpha.value_or(0.0),
                   a.normalize.c_str(), &f));
  const Scores fused(f);
  check(thand_scores_save(fused.get(), a.out.c_str()));
  std::printf("wrote %s (%s is better)\n", a.out.c_str(),
              thand_scores_higher_is_better(fused.get()) ? "higher" : "lower");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hand biometrics from visible and thermal images"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(thand_version()));

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic VIS/TH dataset and manifest");
  g->add_option("--config", gen.config, "TOML file with a [synthetic] table")
      ->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "Output directory")->required();

  SegmentArgs seg;
  auto* s = app.add_subcommand("segment", "Segment a TH frame through its VIS mask");
  s->add_option("--vis", seg.vis, "VIS PGM")->required();
  s->add_option("--th", seg.th, "TH PGM")->required();
  auto* calib = s->add_option("--calib", seg.calib, "VIS->TH transform file");
  auto* reg = s->add_flag("--register", seg.do_register, "Estimate the VIS->TH transform");
  calib->excludes(reg);
  s->add_option("--threshold", seg.threshold, "Manual VIS threshold in [0,1]");
  s->add_flag("--no-cleanup", seg.no_cleanup, "Skip the 3x3 majority filter");
  s->add_option("--out", seg.out, "Output directory")->required();

  ExtractArgs ext;
  auto* e = app.add_subcommand("extract", "DCT features for every manifest entry");
  e->add_option("--in", ext.in, "Dataset directory or manifest CSV")->required();
  e->add_option("--region", ext.region, "finger | central | hand")
      ->check(CLI::IsMember({"finger", "central", "hand"}));
  e->add_option("--spectrum", ext.spectrum, "vis | th")->check(CLI::IsMember({"vis", "th"}));
  e->add_option("--length", ext.length, "Number of zigzag coefficients")
      ->check(CLI::PositiveNumber);
  e->add_flag("--register", ext.do_register, "Register TH frames instead of using calibrations");
  e->add_option("--config", ext.config, "Pipeline TOML")->check(CLI::ExistingFile);
  e->add_option("--out", ext.out, "Features CSV")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Fit the dispersion matcher");
  t->add_option("--features", tr.features, "Features CSV")->required();
  t->add_option("--sigma-threshold", tr.sigma_threshold, "Keep components below this ratio");
  t->add_option("--max-per-user", tr.max_per_user,
                "Use each user's first N rows by session and sample (0 = all)");
  t->add_option("--out", tr.out, "Model JSON")->required();

  IdentifyArgs id;
  auto* i = app.add_subcommand("identify", "Rank the gallery classes for one probe");
  i->add_option("--model", id.model, "Model JSON")->required();
  i->add_option("--gallery", id.gallery, "Gallery features CSV")->required();
  i->add_option("--probe", id.probe, "user:session:sample")->required();
  i->add_option("--probe-features", id.probe_features,
                "CSV holding the probe row; defaults to the gallery, minus that row");
  i->add_option("--max-per-user", id.max_per_user, "Gallery rows per user (0 = all)");
  i->add_option("--top", id.top, "Print only the best K classes");

  EvaluateArgs ev;
  auto* v = app.add_subcommand("evaluate", "Run the train/test protocol");
  v->add_option("--manifest", ev.manifest, "Manifest CSV or dataset directory")->required();
  v->add_option("--config", ev.config, "Pipeline TOML")->check(CLI::ExistingFile);
  v->add_option("--out", ev.out, "Report CSV")->required();
  v->add_option("--sweep-out", ev.sweep_out, "Alpha sweep CSV (needs pipeline.alpha_grid)");
  v->add_option("--scores-dir", ev.scores_dir, "Directory for score and truth CSVs");

  FuseArgs fu;
  auto* f = app.add_subcommand("fuse", "Combine VIS and TH score files");
  f->add_option("--vis-scores", fu.vis, "VIS scores CSV")->required();
  f->add_option("--th-scores", fu.th, "TH scores CSV")->required();
  f->add_option("--rule", fu.rule, "product | mean | median | max | min | vote | weighted")
      ->required()
      ->check(CLI::IsMember({"product", "mean", "median", "max", "min", "vote", "weighted"}));
  f->add_option("--alpha", fu.alpha, "Weight of VIS for the weighted rule")
      ->check(CLI::Range(0.0, 1.0));
  f->add_option("--sweep", fu.sweep, "Alpha grid start:step:stop");
  f->add_option("--truth", fu.truth, "probe_id,class_id,test CSV for --sweep");
  f->add_option("--normalize", fu.normalize, "none | zscore | minmax")
      ->check(CLI::IsMember({"none", "zscore", "minmax"}));
  f->add_option("--polarity", fu.polarity, "Input scores: lower | higher is better")
      ->check(CLI::IsMember({"lower", "higher"}));
  f->add_option("--out", fu.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  try {
    if (*g) run_generate(gen);
    else if (*s) run_segment(seg);
    else if (*e) run_extract(ext);
    else if (*t) run_train(tr);
    else if (*i) run_identify(id);
    else if (*v) run_evaluate(ev);
    else if (*f) run_fuse(fu);
  } catch (const Failure& fail) {
    std::fprintf(stderr, "thermohand: %s: %s\n", thand_status_name(fail.status),
                 fail.message.c_str());
    return static_cast<int>(fail.status);
  }
  return 0;
}
