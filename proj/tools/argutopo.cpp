// argutopo command-line tool.
//
//   argutopo analyze --model PATH --model-format {glove-text|word2vec-bin} ... --out DIR TEXTFILE...
//   argutopo persistence CLOUD.csv          point-cloud CSV -> diagram JSON
//   argutopo delay-params SERIES.csv        series CSV -> selected (D, tau) report
//   argutopo image DIAGRAM.json             diagram JSON -> persistence-image CSV
//
// Exit codes: 0 success, 1 usage/config error, 2 data/parse error,
// 3 numerical-stage error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "argutopo/argutopo.hpp"

namespace fs = std::filesystem;
using namespace argutopo;

namespace {

TauPolicy parse_tau(const std::string& s) {
  if (s == "auto-acf") return {TauPolicy::Kind::auto_acf, 0};
  if (s == "auto-mi") return {TauPolicy::Kind::auto_mi, 0};
  const auto v = detail::parse_real<double>(s);
  if (!v || *v < 1 || *v != std::floor(*v)) throw UsageError("--tau must be auto-acf, auto-mi or a positive integer");
  return {TauPolicy::Kind::fixed, static_cast<std::size_t>(*v)};
}

DimPolicy parse_dim(const std::string& s) {
  if (s == "auto-fnn") return {DimPolicy::Kind::auto_fnn, 0};
  const auto v = detail::parse_real<double>(s);
  if (!v || *v < 1 || *v != std::floor(*v)) throw UsageError("--dim must be auto-fnn or a positive integer");
  return {DimPolicy::Kind::fixed, static_cast<std::size_t>(*v)};
}

/// Uses `path` as given when it exists, otherwise looks under
/// $ARGUTOPO_MODEL_DIR.
fs::path resolve_model_path(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("ARGUTOPO_MODEL_DIR"); dir && *dir) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate;
  }
  throw DataError("model file '" + path + "' not found (also checked $ARGUTOPO_MODEL_DIR)");
}

EmbeddingModel load_model_file(const fs::path& path, EmbeddingFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  return load_model(in, format);
}

template <typename T, typename Reader>
T read_input(const std::string& path, Reader reader) {
  if (path == "-") return reader(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return reader(in);
}

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

struct AnalyzeArgs {
  std::string model;
  std::string model_format = "glove-text";
  std::string mode = "both";
  std::uint64_t seed = 0;
  std::string tau = "auto-acf";
  std::string dim = "auto-fnn";
  int max_homology_dim = 1;
  double max_radius = kInfinity;
  std::vector<double> noise_thresholds{0.0, 0.05, 0.1, 0.25, 0.5};
  std::string out;
  bool plot = false;
  bool lowercase = false;
  bool keep_punctuation = false;
  std::string oov = "skip";
  std::string direction = "shared";
  std::size_t replicates = 1;
  double acf_threshold = 1.0 / std::numbers::e;
  std::size_t mi_bins = 16;
  std::size_t fnn_max_dim = 10;
  double fnn_rtol = 10.0;
  double fnn_fraction = 0.01;
  bool images = false;
  int image_dim = 1;
  std::vector<std::size_t> image_resolution{20, 20};
  double image_sigma = 0.0;
  bool timing = false;
  std::vector<std::string> texts;
};

RunConfig to_config(const AnalyzeArgs& a) {
  RunConfig c;
  c.model_path = a.model;
  c.model_format = a.model_format == "word2vec-bin" ? EmbeddingFormat::word2vec_binary : EmbeddingFormat::glove_text;
  c.mode = a.mode == "wde" ? Mode::wde : a.mode == "baseline" ? Mode::baseline : Mode::both;
  c.seed = a.seed;
  c.tau = parse_tau(a.tau);
  c.dim = parse_dim(a.dim);
  c.max_homology_dim = a.max_homology_dim;
  c.max_radius = a.max_radius;
  c.noise_thresholds = a.noise_thresholds;
  c.tokenizer.lowercase = a.lowercase;
  c.tokenizer.strip_punctuation = !a.keep_punctuation;
  c.oov = a.oov == "fail" ? OovPolicy::fail : OovPolicy::skip;
  c.direction_per_text = a.direction == "per-text";
  c.replicates = a.replicates;
  c.acf_threshold = a.acf_threshold;
  c.mi_bins = a.mi_bins;
  c.fnn = {a.fnn_max_dim, a.fnn_rtol, a.fnn_fraction};
  c.images = a.images;
  c.image_dim = a.image_dim;
  c.image_rows = a.image_resolution.at(0);
  c.image_cols = a.image_resolution.at(1);
  if (a.image_sigma > 0.0) c.image_sigma = a.image_sigma;
  c.validate();
  return c;
}

/// Output file stems, made unique by appending "-2", "-3", ... on collision.
std::vector<std::string> text_stems(const std::vector<std::string>& paths) {
  std::vector<std::string> stems;
  std::map<std::string, int> seen;
  for (const auto& p : paths) {
    std::string stem = fs::path(p).stem().string();
    if (stem.empty()) stem = "text";
    const int n = ++seen[stem];
    stems.push_back(n == 1 ? stem : stem + "-" + std::to_string(n));
  }
  return stems;
}

int run_analyze(const AnalyzeArgs& args) {
  const RunConfig config = to_config(args);
  const auto started = std::chrono::steady_clock::now();
  const fs::path model_path = resolve_model_path(config.model_path);
  const EmbeddingModel model = load_model_file(model_path, config.model_format);
  const auto loaded = std::chrono::steady_clock::now();

  std::vector<std::string> contents;
  for (const auto& t : args.texts) contents.push_back(read_file(t));
  const auto stems = text_stems(args.texts);

  // One independent pipeline per text over the shared immutable model.
  std::vector<std::future<TextReport>> jobs;
  for (std::size_t i = 0; i < contents.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      return analyze_text(config, model, contents[i], stems[i], i);
    }));
  }
  AnalysisReport report;
  report.config = config;
  report.config_hash = config_hash(config);
  report.model_description = std::string(to_string(config.model_format)) + ":" + config.model_path;
  report.model_dimension = model.dimension();
  report.model_vocabulary = model.size();
  report.model_warnings = model.warnings();
  for (auto& j : jobs) report.texts.push_back(j.get());
  const auto finished = std::chrono::steady_clock::now();

  fs::create_directories(args.out);
  const fs::path out(args.out);
  for (const auto& t : report.texts) {
    auto emit = [&](const std::optional<DiagramSection>& section, const std::string& kind) {
      if (!section) return;
      write_file_atomic(out / (t.name + "." + kind + ".json"), to_json(section->diagram).dump(2) + "\n");
      if (args.plot) emit_plot(section->diagram, out / (t.name + "." + kind + ".svg"), t.name + " (" + kind + ")");
      if (section->image) {
        std::ostringstream csv;
        write_image_csv(*section->image, csv);
        write_file_atomic(out / (t.name + "." + kind + ".image.csv"), csv.str());
        write_file_atomic(out / (t.name + "." + kind + ".image.json"), image_metadata(*section->image).dump(2) + "\n");
      }
    };
    emit(t.wde, "wde");
    emit(t.baseline, "baseline");
  }
  Json j = to_json(report);
  if (args.timing) {
    using ms = std::chrono::duration<double, std::milli>;
    j["timing_ms"] = {{"model_load", ms(loaded - started).count()}, {"analysis", ms(finished - loaded).count()}};
  }
  write_file_atomic(out / "report.json", j.dump(2) + "\n");

  for (const auto& t : report.texts) {
    std::cout << t.name << ": " << t.tokens.kept << "/" << t.tokens.token_count << " tokens kept";
    if (t.delay) std::cout << ", D=" << t.delay->dimension << ", tau=" << t.delay->tau;
    auto h1 = [](const std::optional<DiagramSection>& s) -> std::string {
      if (!s) return "-";
      const auto st = diagram_stats(s->diagram, 0.0);
      return st.at(1).max_persistence ? detail::format_shortest(*st.at(1).max_persistence) : "none";
    };
    std::cout << ", max H1 persistence wde=" << h1(t.wde) << " baseline=" << h1(t.baseline) << "\n";
  }
  std::cout << "report: " << (out / "report.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological analysis of word-delay embeddings of text"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // analyze --------------------------------------------------------------
  AnalyzeArgs a;
  auto* analyze = app.add_subcommand("analyze", "Run the word-delay embedding and/or baseline pipeline on texts");
  analyze->add_option("--model", a.model, "Embedding model file (falls back to $ARGUTOPO_MODEL_DIR/PATH)")->required();
  analyze->add_option("--model-format", a.model_format)->check(CLI::IsMember({"glove-text", "word2vec-bin"}));
  analyze->add_option("--mode", a.mode)->check(CLI::IsMember({"wde", "baseline", "both"}));
  analyze->add_option("--seed", a.seed, "Projection direction seed");
  analyze->add_option("--tau", a.tau, "auto-acf | auto-mi | INT");
  analyze->add_option("--dim", a.dim, "auto-fnn | INT");
  analyze->add_option("--max-homology-dim", a.max_homology_dim)->check(CLI::IsMember({1, 2}));
  analyze->add_option("--max-radius", a.max_radius, "Filtration cutoff (default: none)");
  analyze->add_option("--noise-threshold", a.noise_thresholds, "Persistence thresholds for the summary stats");
  analyze->add_option("--out", a.out, "Output directory")->required();
  analyze->add_flag("--plot", a.plot, "Write SVG persistence diagrams");
  analyze->add_flag("--lowercase", a.lowercase, "Lowercase tokens (for uncased models)");
  analyze->add_flag("--keep-punctuation", a.keep_punctuation);
  analyze->add_option("--oov", a.oov)->check(CLI::IsMember({"skip", "fail"}));
  analyze->add_option("--direction", a.direction, "shared | per-text")->check(CLI::IsMember({"shared", "per-text"}));
  analyze->add_option("--replicates", a.replicates, "Number of projection seeds to summarize");
  analyze->add_option("--acf-threshold", a.acf_threshold);
  analyze->add_option("--mi-bins", a.mi_bins);
  analyze->add_option("--fnn-max-dim", a.fnn_max_dim);
  analyze->add_option("--fnn-rtol", a.fnn_rtol);
  analyze->add_option("--fnn-fraction", a.fnn_fraction);
  analyze->add_flag("--images", a.images, "Compute persistence images");
  analyze->add_option("--image-dim", a.image_dim);
  analyze->add_option("--image-resolution", a.image_resolution, "ROWS COLS")->expected(2);
  analyze->add_option("--image-sigma", a.image_sigma, "Gaussian bandwidth (default: 5% of persistence range)");
  analyze->add_flag("--timing", a.timing, "Add wall-clock timings to the report (breaks byte-reproducibility)");
  analyze->add_option("texts", a.texts, "Text files")->required()->check(CLI::ExistingFile);

  // persistence ------------------------------------------------------------
  std::string cloud_path;
  std::string diagram_out;
  std::string plot_out;
  int pers_max_dim = 1;
  double pers_radius = kInfinity;
  auto* persistence = app.add_subcommand("persistence", "Point-cloud CSV to persistence diagram JSON");
  persistence->add_option("cloud", cloud_path, "CSV, one point per row ('-' for stdin)")->required();
  persistence->add_option("--max-homology-dim", pers_max_dim)->check(CLI::IsMember({1, 2}));
  persistence->add_option("--max-radius", pers_radius);
  persistence->add_option("--out", diagram_out, "Output file (default: stdout)");
  persistence->add_option("--plot", plot_out, "Also write an SVG plot here");

  // delay-params -----------------------------------------------------------
  std::string series_path;
  std::string delay_out;
  std::string delay_tau = "auto-acf";
  std::string delay_dim = "auto-fnn";
  std::size_t delay_bins = 16;
  FnnOptions delay_fnn;
  double delay_acf = 1.0 / std::numbers::e;
  auto* delay = app.add_subcommand("delay-params", "Series CSV to selected embedding dimension and delay");
  delay->add_option("series", series_path, "CSV, one value per row ('-' for stdin)")->required();
  delay->add_option("--tau", delay_tau, "auto-acf | auto-mi | INT");
  delay->add_option("--dim", delay_dim, "auto-fnn | INT");
  delay->add_option("--mi-bins", delay_bins);
  delay->add_option("--acf-threshold", delay_acf);
  delay->add_option("--fnn-max-dim", delay_fnn.max_dimension);
  delay->add_option("--fnn-rtol", delay_fnn.r_tol);
  delay->add_option("--fnn-fraction", delay_fnn.fraction_threshold);
  delay->add_option("--out", delay_out, "Output file (default: stdout)");

  // image ------------------------------------------------------------------
  std::string image_in;
  std::string image_out;
  int image_dim = 1;
  std::vector<std::size_t> image_res{20, 20};
  double image_sigma = 0.0;
  std::vector<double> image_extent;
  auto* image = app.add_subcommand("image", "Diagram JSON to persistence-image CSV");
  image->add_option("diagram", image_in, "Diagram JSON ('-' for stdin)")->required();
  image->add_option("--dim", image_dim);
  image->add_option("--resolution", image_res, "ROWS COLS")->expected(2);
  image->add_option("--sigma", image_sigma, "Gaussian bandwidth (default: 5% of persistence range)");
  image->add_option("--extent", image_extent, "BIRTH_MIN BIRTH_MAX PERS_MIN PERS_MAX")->expected(4);
  image->add_option("--out", image_out, "CSV output (metadata goes to the same path with .json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze) return run_analyze(a);

    if (*persistence) {
      const auto cloud = read_input<PointCloud>(cloud_path, [](std::istream& in) { return read_point_cloud_csv(in); });
      auto dgm = rips_persistence(pairwise_distances(cloud), {pers_max_dim, pers_radius});
      dgm.metadata["source"] = cloud_path;
      write_output(diagram_out, to_json(dgm).dump(2) + "\n");
      if (!plot_out.empty()) emit_plot(dgm, plot_out, fs::path(cloud_path).filename().string());
      return 0;
    }

    if (*delay) {
      const auto series = read_input<TimeSeries>(series_path, [](std::istream& in) { return read_series_csv(in); });
      RunConfig c;
      c.tau = parse_tau(delay_tau);
      c.dim = parse_dim(delay_dim);
      c.mi_bins = delay_bins;
      c.fnn = delay_fnn;
      c.acf_threshold = delay_acf;
      c.validate();
      const auto p = detail::select_delay_parameters(c, series);
      Json j;
      j["samples"] = series.size();
      j["dimension"] = p.dimension;
      j["tau"] = p.tau;
      j["points"] = series.size() - (p.dimension - 1) * p.tau;
      j["dimension_selection"] = detail::selection_json(p.dimension_selection);
      j["tau_selection"] = detail::selection_json(p.tau_selection);
      write_output(delay_out, j.dump(2) + "\n");
      return 0;
    }

    if (*image) {
      const auto dgm = read_input<PersistenceDiagram>(image_in, [](std::istream& in) { return read_diagram_json(in); });
      ImageOptions opts;
      opts.rows = image_res.at(0);
      opts.cols = image_res.at(1);
      if (image_sigma > 0.0) opts.sigma = image_sigma;
      if (!image_extent.empty()) opts.extent = ImageExtent{image_extent[0], image_extent[1], image_extent[2], image_extent[3]};
      const auto img = persistence_image(dgm, image_dim, opts);
      std::ostringstream csv;
      write_image_csv(img, csv);
      write_output(image_out, csv.str());
      if (!image_out.empty() && image_out != "-") {
        fs::path meta(image_out);
        meta.replace_extension(".json");
        write_file_atomic(meta, image_metadata(img).dump(2) + "\n");
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
