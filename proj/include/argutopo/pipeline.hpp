#pragma once

// End-to-end analysis of a text: tokens -> word vectors -> random projection
// -> delay embedding -> Rips persistence (the word-delay embedding, "wde"),
// and the baseline that runs persistence directly on the word-vector cloud.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "argutopo/error.hpp"
#include "argutopo/features.hpp"
#include "argutopo/io.hpp"
#include "argutopo/signal.hpp"
#include "argutopo/tda.hpp"
#include "argutopo/text_embedding.hpp"

namespace argutopo {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Mode { wde, baseline, both };

struct TauPolicy {
  enum class Kind { auto_acf, auto_mi, fixed } kind = Kind::auto_acf;
  std::size_t value = 0;  // used when kind == fixed
};

struct DimPolicy {
  enum class Kind { auto_fnn, fixed } kind = Kind::auto_fnn;
  std::size_t value = 0;
};

struct RunConfig {
  std::string model_path;
  EmbeddingFormat model_format = EmbeddingFormat::glove_text;
  TokenizerPolicy tokenizer{};
  OovPolicy oov = OovPolicy::skip;
  std::uint64_t seed = 0;
  /// Draw a separate projection direction per text (seed + text index)
  /// instead of sharing one direction across the run.
  bool direction_per_text = false;
  std::size_t replicates = 1;
  TauPolicy tau{};
  DimPolicy dim{};
  double acf_threshold = 1.0 / std::numbers::e;
  std::size_t mi_bins = 16;
  FnnOptions fnn{};
  int max_homology_dim = 1;
  double max_radius = kInfinity;
  std::vector<double> noise_thresholds{0.0};
  Mode mode = Mode::both;
  bool images = false;
  int image_dim = 1;
  std::size_t image_rows = 20;
  std::size_t image_cols = 20;
  std::optional<double> image_sigma;

  /// Throws UsageError on an inconsistent configuration.
  void validate() const {
    if (tau.kind == TauPolicy::Kind::fixed && tau.value == 0) throw UsageError("fixed tau must be positive");
    if (dim.kind == DimPolicy::Kind::fixed && dim.value == 0) throw UsageError("fixed dimension must be positive");
    if (replicates == 0) throw UsageError("replicates must be at least 1");
    if (max_homology_dim < 1 || max_homology_dim > 2) throw UsageError("max homology dimension must be 1 or 2");
    if (std::isnan(max_radius) || max_radius <= 0.0) throw UsageError("max radius must be positive");
    if (mi_bins == 0) throw UsageError("mutual-information bins must be positive");
    if (fnn.max_dimension == 0) throw UsageError("FNN max dimension must be positive");
    if (noise_thresholds.empty()) throw UsageError("at least one noise threshold is required");
    for (double t : noise_thresholds) {
      if (!(t >= 0.0) || !std::isfinite(t)) throw UsageError("noise thresholds must be finite and non-negative");
    }
    if (image_dim < 0 || image_dim > max_homology_dim) throw UsageError("image dimension out of range");
    if (image_rows == 0 || image_cols == 0) throw UsageError("image resolution must be at least 1x1");
    if (image_sigma && !(*image_sigma > 0.0)) throw UsageError("image sigma must be positive");
  }
};

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::wde: return "wde";
    case Mode::baseline: return "baseline";
    case Mode::both: return "both";
  }
  return "both";
}

// ---------------------------------------------------------------------------
// Config echo
// ---------------------------------------------------------------------------

inline Json config_to_json(const RunConfig& c) {
  Json j;
  j["model_path"] = c.model_path;
  j["model_format"] = std::string(to_string(c.model_format));
  j["tokenizer"] = {{"lowercase", c.tokenizer.lowercase}, {"strip_punctuation", c.tokenizer.strip_punctuation}};
  j["oov"] = c.oov == OovPolicy::skip ? "skip" : "fail";
  j["seed"] = c.seed;
  j["direction"] = c.direction_per_text ? "per-text" : "shared";
  j["replicates"] = c.replicates;
  switch (c.tau.kind) {
    case TauPolicy::Kind::auto_acf: j["tau"] = "auto-acf"; break;
    case TauPolicy::Kind::auto_mi: j["tau"] = "auto-mi"; break;
    case TauPolicy::Kind::fixed: j["tau"] = c.tau.value; break;
  }
  if (c.dim.kind == DimPolicy::Kind::auto_fnn) {
    j["dim"] = "auto-fnn";
  } else {
    j["dim"] = c.dim.value;
  }
  j["acf_threshold"] = c.acf_threshold;
  j["mi_bins"] = c.mi_bins;
  j["fnn"] = {{"max_dimension", c.fnn.max_dimension},
              {"r_tol", c.fnn.r_tol},
              {"fraction_threshold", c.fnn.fraction_threshold}};
  j["max_homology_dim"] = c.max_homology_dim;
  j["max_radius"] = std::isinf(c.max_radius) ? Json(nullptr) : Json(c.max_radius);
  j["noise_thresholds"] = c.noise_thresholds;
  j["mode"] = std::string(to_string(c.mode));
  Json img;
  img["enabled"] = c.images;
  img["dim"] = c.image_dim;
  img["rows"] = c.image_rows;
  img["cols"] = c.image_cols;
  img["sigma"] = c.image_sigma ? Json(*c.image_sigma) : Json(nullptr);
  j["images"] = std::move(img);
  return j;
}

inline RunConfig config_from_json(const Json& j) {
  try {
    RunConfig c;
    c.model_path = j.at("model_path").get<std::string>();
    const auto fmt = j.at("model_format").get<std::string>();
    if (fmt == "glove-text") {
      c.model_format = EmbeddingFormat::glove_text;
    } else if (fmt == "word2vec-bin") {
      c.model_format = EmbeddingFormat::word2vec_binary;
    } else {
      throw UsageError("unknown model format '" + fmt + "'");
    }
    c.tokenizer.lowercase = j.at("tokenizer").at("lowercase").get<bool>();
    c.tokenizer.strip_punctuation = j.at("tokenizer").at("strip_punctuation").get<bool>();
    c.oov = j.at("oov").get<std::string>() == "fail" ? OovPolicy::fail : OovPolicy::skip;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.direction_per_text = j.at("direction").get<std::string>() == "per-text";
    c.replicates = j.at("replicates").get<std::size_t>();
    const auto& tau = j.at("tau");
    if (tau.is_number()) {
      c.tau = {TauPolicy::Kind::fixed, tau.get<std::size_t>()};
    } else {
      c.tau.kind = tau.get<std::string>() == "auto-mi" ? TauPolicy::Kind::auto_mi : TauPolicy::Kind::auto_acf;
    }
    const auto& dim = j.at("dim");
    if (dim.is_number()) c.dim = {DimPolicy::Kind::fixed, dim.get<std::size_t>()};
    c.acf_threshold = j.at("acf_threshold").get<double>();
    c.mi_bins = j.at("mi_bins").get<std::size_t>();
    c.fnn.max_dimension = j.at("fnn").at("max_dimension").get<std::size_t>();
    c.fnn.r_tol = j.at("fnn").at("r_tol").get<double>();
    c.fnn.fraction_threshold = j.at("fnn").at("fraction_threshold").get<double>();
    c.max_homology_dim = j.at("max_homology_dim").get<int>();
    c.max_radius = j.at("max_radius").is_null() ? kInfinity : j.at("max_radius").get<double>();
    c.noise_thresholds = j.at("noise_thresholds").get<std::vector<double>>();
    const auto mode = j.at("mode").get<std::string>();
    c.mode = mode == "wde" ? Mode::wde : mode == "baseline" ? Mode::baseline : Mode::both;
    const auto& img = j.at("images");
    c.images = img.at("enabled").get<bool>();
    c.image_dim = img.at("dim").get<int>();
    c.image_rows = img.at("rows").get<std::size_t>();
    c.image_cols = img.at("cols").get<std::size_t>();
    if (!img.at("sigma").is_null()) c.image_sigma = img.at("sigma").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config echo: ") + e.what());
  }
}

/// FNV-1a over the serialized config echo, as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Per-text analysis
// ---------------------------------------------------------------------------

namespace detail {

/// Runs `f`, prefixing any library error with the stage name while keeping
/// its category (and therefore its exit code).
template <typename F>
auto run_stage(std::string_view stage, F&& f) -> decltype(f()) {
  const std::string prefix = std::string(stage) + ": ";
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const UsageError& e) {
    throw UsageError(prefix + e.what());
  }
}

}  // namespace detail

struct TokenReport {
  std::size_t token_count = 0;
  std::vector<SkippedToken> oov;
  std::size_t kept = 0;
};

struct DiagramSection {
  std::size_t cloud_points = 0;
  std::size_t cloud_dimension = 0;
  PersistenceDiagram diagram;
  std::vector<DiagramStats> stats;  // one per noise threshold
  std::optional<PersistenceImage> image;
};

struct ReplicateSummary {
  std::uint64_t seed = 0;
  std::size_t tau = 0;
  std::size_t dimension = 0;
  std::optional<double> max_h1_persistence;
  std::size_t h1_count = 0;
};

struct TextReport {
  std::string name;
  TokenReport tokens;
  std::optional<std::uint64_t> projection_seed;
  std::vector<double> series;
  std::optional<DelayParameters> delay;
  std::optional<DiagramSection> wde;
  std::optional<DiagramSection> baseline;
  std::vector<ReplicateSummary> replicates;
};

struct AnalysisReport {
  RunConfig config;
  std::string config_hash;
  std::string model_description;
  std::size_t model_dimension = 0;
  std::size_t model_vocabulary = 0;
  std::vector<std::string> model_warnings;
  std::vector<TextReport> texts;
};

namespace detail {

struct Embedded {
  TokenReport report;
  VectorSequence vectors;
};

inline Embedded embed_text(const RunConfig& config, const EmbeddingModel& model, std::string_view text) {
  const auto tokens = run_stage("tokenize", [&] { return tokenize(text, config.tokenizer); });
  auto vectors = run_stage("embed", [&] { return embed_tokens(model, tokens, config.oov); });
  Embedded e;
  e.report.token_count = tokens.size();
  e.report.oov = vectors.skipped;
  e.report.kept = vectors.size();
  e.vectors = std::move(vectors);
  if (e.vectors.size() == 0) {
    throw DataError("embed: no in-vocabulary tokens (" + std::to_string(tokens.size()) + " tokens read)");
  }
  return e;
}

inline DiagramSection analyze_cloud(const RunConfig& config, const PointCloud& cloud, const std::string& hash,
                                    const std::string& kind) {
  DiagramSection s;
  s.cloud_points = cloud.size();
  s.cloud_dimension = cloud.dimension();
  s.diagram = run_stage("persistence", [&] {
    return rips_persistence(pairwise_distances(cloud), {config.max_homology_dim, config.max_radius});
  });
  s.diagram.metadata["config_hash"] = hash;
  s.diagram.metadata["source"] = kind;
  for (double t : config.noise_thresholds) s.stats.push_back(diagram_stats(s.diagram, t));
  if (config.images) {
    ImageOptions opts;
    opts.rows = config.image_rows;
    opts.cols = config.image_cols;
    opts.sigma = config.image_sigma;
    s.image = run_stage("image", [&] { return persistence_image(s.diagram, config.image_dim, opts); });
  }
  return s;
}

inline DelayParameters select_delay_parameters(const RunConfig& config, const TimeSeries& z) {
  DelayParameters p;
  const std::size_t n = z.size();
  run_stage("delay", [&] {
    switch (config.tau.kind) {
      case TauPolicy::Kind::fixed:
        p.tau_selection = {config.tau.value, "fixed", 1, {}, {}};
        break;
      case TauPolicy::Kind::auto_acf:
        p.tau_selection = select_delay_acf(z, config.acf_threshold);
        break;
      case TauPolicy::Kind::auto_mi: {
        std::size_t bins = config.mi_bins;
        std::string note;
        if (n < 4 * bins) {
          bins = std::max<std::size_t>(1, n / 4);
          note = "series has " + std::to_string(n) + " samples; mutual-information bins reduced from " +
                 std::to_string(config.mi_bins) + " to " + std::to_string(bins);
        }
        p.tau_selection = select_delay_mi(z, bins);
        if (!note.empty()) p.tau_selection.warnings.insert(p.tau_selection.warnings.begin(), note);
        break;
      }
    }
  });
  p.tau = p.tau_selection.value;

  run_stage("dimension", [&] {
    if (config.dim.kind == DimPolicy::Kind::fixed) {
      p.dimension_selection = {config.dim.value, "fixed", 1, {}, {}};
      return;
    }
    if (n < 2) throw NumericalError("false nearest neighbours need at least 2 samples");
    FnnOptions opts = config.fnn;
    const std::size_t feasible = (n - 2) / p.tau + 1;
    std::string note;
    if (opts.max_dimension > feasible) {
      note = "max FNN dimension reduced from " + std::to_string(opts.max_dimension) + " to " +
             std::to_string(feasible) + " to fit " + std::to_string(n) + " samples at tau=" +
             std::to_string(p.tau);
      opts.max_dimension = feasible;
    }
    p.dimension_selection = select_dimension_fnn(z, p.tau, opts);
    if (!note.empty()) p.dimension_selection.warnings.insert(p.dimension_selection.warnings.begin(), note);
  });
  p.dimension = p.dimension_selection.value;

  if (n < (p.dimension - 1) * p.tau + 2) {
    throw NumericalError("embedding: " + std::to_string(n) + " in-vocabulary tokens are too few for D=" +
                         std::to_string(p.dimension) + ", tau=" + std::to_string(p.tau) + " (need at least " +
                         std::to_string((p.dimension - 1) * p.tau + 2) + ")");
  }
  return p;
}

struct WdeRun {
  TimeSeries series;
  DelayParameters delay;
  PointCloud cloud;
};

inline WdeRun wde_cloud(const RunConfig& config, const VectorSequence& vectors, std::uint64_t seed) {
  WdeRun r;
  const auto direction = run_stage("projection", [&] { return sample_direction(vectors.dimension, seed); });
  r.series = run_stage("projection", [&] { return project_series(vectors, direction); });
  r.delay = select_delay_parameters(config, r.series);
  r.cloud = run_stage("embedding", [&] { return delay_embed(r.series, r.delay.dimension, r.delay.tau); });
  return r;
}

inline std::uint64_t direction_seed(const RunConfig& config, std::size_t text_index) {
  return config.direction_per_text ? config.seed + text_index : config.seed;
}

}  // namespace detail

/// Word-delay embedding analysis of one text. `text_index` only matters when
/// the config asks for a per-text projection direction.
inline TextReport run_wde(const RunConfig& config, const EmbeddingModel& model, std::string_view text,
                          std::string name = "text", std::size_t text_index = 0) {
  config.validate();
  const std::string hash = config_hash(config);
  TextReport report;
  report.name = std::move(name);
  auto embedded = detail::embed_text(config, model, text);
  report.tokens = embedded.report;

  const std::uint64_t seed = detail::direction_seed(config, text_index);
  auto run = detail::wde_cloud(config, embedded.vectors, seed);
  report.projection_seed = seed;
  report.series.assign(run.series.values().begin(), run.series.values().end());
  report.wde = detail::analyze_cloud(config, run.cloud, hash, "wde");
  report.delay = std::move(run.delay);

  if (config.replicates > 1) {
    auto summarize = [](std::uint64_t s, const DelayParameters& delay, const PersistenceDiagram& diagram) {
      const auto stats = diagram_stats(diagram, 0.0);
      return ReplicateSummary{s, delay.tau, delay.dimension, stats.at(1).max_persistence, stats.at(1).count};
    };
    report.replicates.push_back(summarize(seed, *report.delay, report.wde->diagram));
    for (std::size_t k = 1; k < config.replicates; ++k) {
      const auto r = detail::wde_cloud(config, embedded.vectors, seed + k);
      const auto section = detail::analyze_cloud(config, r.cloud, hash, "wde");
      report.replicates.push_back(summarize(seed + k, r.delay, section.diagram));
    }
  }
  return report;
}

/// Persistence of the word-vector cloud itself (one point per kept token,
/// repeated words kept as duplicate points).
inline TextReport run_baseline(const RunConfig& config, const EmbeddingModel& model, std::string_view text,
                               std::string name = "text") {
  config.validate();
  TextReport report;
  report.name = std::move(name);
  auto embedded = detail::embed_text(config, model, text);
  report.tokens = embedded.report;
  const auto cloud = PointCloud::from_rows(embedded.vectors.vectors);
  report.baseline = detail::analyze_cloud(config, cloud, config_hash(config), "baseline");
  return report;
}

/// Runs the configured mode on one text. In mode `both`, the baseline and the
/// word-delay embedding share one tokenization and one projection seed.
inline TextReport analyze_text(const RunConfig& config, const EmbeddingModel& model, std::string_view text,
                               std::string name, std::size_t text_index) {
  switch (config.mode) {
    case Mode::wde:
      return run_wde(config, model, text, std::move(name), text_index);
    case Mode::baseline:
      return run_baseline(config, model, text, std::move(name));
    case Mode::both: {
      auto report = run_wde(config, model, text, name, text_index);
      report.baseline = run_baseline(config, model, text, name).baseline;
      return report;
    }
  }
  throw UsageError("unknown mode");
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

namespace detail {

inline Json selection_json(const Selection& s) {
  Json j;
  j["value"] = s.value;
  j["method"] = s.method;
  j["trace_start"] = s.trace_start;
  j["trace"] = s.trace;
  j["warnings"] = s.warnings;
  return j;
}

inline Json section_json(const DiagramSection& s) {
  Json j;
  j["cloud_points"] = s.cloud_points;
  j["cloud_dimension"] = s.cloud_dimension;
  j["diagram"] = to_json(s.diagram);
  Json stats = Json::array();
  for (const auto& st : s.stats) stats.push_back(to_json(st));
  j["stats"] = std::move(stats);
  if (s.image) {
    Json img = image_metadata(*s.image);
    img["pixels"] = s.image->pixels;
    j["image"] = std::move(img);
  }
  return j;
}

}  // namespace detail

inline Json to_json(const TextReport& t) {
  Json j;
  j["name"] = t.name;
  Json tok;
  tok["count"] = t.tokens.token_count;
  tok["kept"] = t.tokens.kept;
  Json oov = Json::array();
  for (const auto& s : t.tokens.oov) oov.push_back({{"position", s.position}, {"token", s.token}});
  tok["oov"] = std::move(oov);
  j["tokens"] = std::move(tok);
  if (t.projection_seed) j["projection_seed"] = *t.projection_seed;
  if (t.delay) {
    j["series"] = t.series;
    j["delay"] = {{"dimension", t.delay->dimension},
                  {"tau", t.delay->tau},
                  {"dimension_selection", detail::selection_json(t.delay->dimension_selection)},
                  {"tau_selection", detail::selection_json(t.delay->tau_selection)}};
  }
  if (t.wde) j["wde"] = detail::section_json(*t.wde);
  if (t.baseline) j["baseline"] = detail::section_json(*t.baseline);
  if (!t.replicates.empty()) {
    Json reps = Json::array();
    for (const auto& r : t.replicates) {
      reps.push_back({{"seed", r.seed},
                      {"tau", r.tau},
                      {"dimension", r.dimension},
                      {"max_h1_persistence", r.max_h1_persistence ? Json(*r.max_h1_persistence) : Json(nullptr)},
                      {"h1_count", r.h1_count}});
    }
    j["replicates"] = std::move(reps);
  }
  return j;
}

inline Json to_json(const AnalysisReport& r) {
  Json j;
  j["tool"] = "argutopo";
  j["version"] = std::string(kVersion);
  j["config_hash"] = r.config_hash;
  j["config"] = config_to_json(r.config);
  j["model"] = {{"description", r.model_description},
                {"dimension", r.model_dimension},
                {"vocabulary_size", r.model_vocabulary},
                {"warnings", r.model_warnings}};
  Json texts = Json::array();
  for (const auto& t : r.texts) texts.push_back(to_json(t));
  j["texts"] = std::move(texts);
  return j;
}

}  // namespace argutopo
