#pragma once

// Diagram post-processing: noise separation by distance from the diagonal,
// per-dimension summaries, and persistence images.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "argutopo/error.hpp"
#include "argutopo/tda.hpp"

namespace argutopo {

/// Points of dimension `dim` with persistence >= min_persistence, plus every
/// essential point of that dimension.
inline PersistenceDiagram significant_features(const PersistenceDiagram& diagram, int dim,
                                               double min_persistence) {
  if (!(min_persistence >= 0.0)) throw UsageError("min_persistence must be non-negative");
  PersistenceDiagram out;
  out.max_dim = diagram.max_dim;
  out.metadata = diagram.metadata;
  for (const auto& p : diagram.points) {
    if (p.dim != dim) continue;
    if (p.essential() || p.persistence() >= min_persistence) out.points.push_back(p);
  }
  return out;
}

struct DimensionStats {
  int dim = 0;
  std::size_t count = 0;
  std::size_t essential = 0;
  /// Largest d - b over finite points; empty when there are none.
  std::optional<double> max_persistence;
  /// Gap between the two most persistent finite points, when there are two.
  std::optional<double> persistence_gap;
  std::size_t above_threshold = 0;
};

struct DiagramStats {
  double noise_threshold = 0.0;
  std::vector<DimensionStats> dims;  // one entry per dimension 0..max_dim

  [[nodiscard]] const DimensionStats& at(int dim) const { return dims.at(static_cast<std::size_t>(dim)); }
};

/// `above_threshold` counts finite points with persistence strictly greater
/// than `noise_threshold`.
inline DiagramStats diagram_stats(const PersistenceDiagram& diagram, double noise_threshold) {
  if (!(noise_threshold >= 0.0)) throw UsageError("noise threshold must be non-negative");
  DiagramStats stats;
  stats.noise_threshold = noise_threshold;
  for (int dim = 0; dim <= diagram.max_dim; ++dim) {
    DimensionStats s;
    s.dim = dim;
    std::vector<double> finite;
    for (const auto& p : diagram.points) {
      if (p.dim != dim) continue;
      ++s.count;
      if (p.essential()) {
        ++s.essential;
        continue;
      }
      finite.push_back(p.persistence());
      if (p.persistence() > noise_threshold) ++s.above_threshold;
    }
    std::sort(finite.begin(), finite.end(), std::greater<>());
    if (!finite.empty()) s.max_persistence = finite[0];
    if (finite.size() >= 2) s.persistence_gap = finite[0] - finite[1];
    stats.dims.push_back(s);
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Persistence images
// ---------------------------------------------------------------------------

struct ImageExtent {
  double birth_min = 0.0;
  double birth_max = 1.0;
  double persistence_min = 0.0;
  double persistence_max = 1.0;
};

struct ImageOptions {
  std::size_t rows = 20;  // persistence axis
  std::size_t cols = 20;  // birth axis
  /// Gaussian bandwidth; defaults to 5% of the persistence range.
  std::optional<double> sigma;
  /// Defaults to the range of the diagram's finite points (see default_extent).
  std::optional<ImageExtent> extent;
};

/// Raster over birth (columns, left to right) x persistence (rows, row 0 at
/// the lowest persistence). Pixel (r, c) holds
///   sum_p w(p) * integral over the cell of N((b_p, pers_p), sigma^2 I),
/// with w(p) = clamp(pers_p / persistence_max, 0, 1).
struct PersistenceImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double sigma = 0.0;
  ImageExtent extent;
  int dim = 1;
  std::string weight = "linear";
  std::vector<double> pixels;  // row-major

  [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
  [[nodiscard]] double total_mass() const {
    double s = 0.0;
    for (double v : pixels) s += v;
    return s;
  }
};

inline double persistence_weight(double persistence, const ImageExtent& extent) {
  if (persistence <= 0.0) return 0.0;
  return std::min(1.0, persistence / extent.persistence_max);
}

/// Birth range of the finite points of `dim` and persistence range [0, max],
/// each padded by 10%; the unit box when there is nothing to cover.
inline ImageExtent default_extent(const PersistenceDiagram& diagram, int dim) {
  double bmin = kInfinity;
  double bmax = -kInfinity;
  double pmax = 0.0;
  for (const auto& p : diagram.points) {
    if (p.dim != dim || p.essential()) continue;
    bmin = std::min(bmin, p.birth);
    bmax = std::max(bmax, p.birth);
    pmax = std::max(pmax, p.persistence());
  }
  if (!(pmax > 0.0)) return {};
  const double pad = 0.1 * pmax;
  return {bmin - pad, std::max(bmax, bmin + pmax) + pad, 0.0, pmax * 1.1};
}

namespace detail {

/// Mass of N(mean, sigma^2) on [lo, hi]. Uses the tail on the far side of
/// the mean so that distant cells do not cancel to noise.
inline double interval_mass(double lo, double hi, double mean, double sigma) {
  const double scale = sigma * std::numbers::sqrt2;
  double mass = 0.0;
  if (lo >= mean) {
    mass = 0.5 * (std::erfc((lo - mean) / scale) - std::erfc((hi - mean) / scale));
  } else if (hi <= mean) {
    mass = 0.5 * (std::erfc((mean - hi) / scale) - std::erfc((mean - lo) / scale));
  } else {
    mass = 0.5 * (std::erf((hi - mean) / scale) + std::erf((mean - lo) / scale));
  }
  return std::max(mass, 0.0);
}

}  // namespace detail

inline PersistenceImage persistence_image(const PersistenceDiagram& diagram, int dim,
                                          const ImageOptions& options = {}) {
  if (options.rows == 0 || options.cols == 0) throw UsageError("image resolution must be at least 1x1");
  const ImageExtent extent = options.extent.value_or(default_extent(diagram, dim));
  if (!(extent.birth_max > extent.birth_min) || !(extent.persistence_max > extent.persistence_min) ||
      !(extent.persistence_max > 0.0)) {
    throw UsageError("image extent must be a non-empty box with positive persistence range");
  }
  const double sigma =
      options.sigma.value_or(0.05 * (extent.persistence_max - extent.persistence_min));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw UsageError("image sigma must be positive");

  PersistenceImage img;
  img.rows = options.rows;
  img.cols = options.cols;
  img.sigma = sigma;
  img.extent = extent;
  img.dim = dim;
  img.pixels.assign(img.rows * img.cols, 0.0);

  const double bw = (extent.birth_max - extent.birth_min) / static_cast<double>(img.cols);
  const double pw = (extent.persistence_max - extent.persistence_min) / static_cast<double>(img.rows);
  std::vector<double> col_mass(img.cols);
  std::vector<double> row_mass(img.rows);

  for (const auto& p : diagram.points) {
    if (p.dim != dim || p.essential()) continue;
    const double w = persistence_weight(p.persistence(), extent);
    if (w == 0.0) continue;
    for (std::size_t c = 0; c < img.cols; ++c) {
      const double lo = extent.birth_min + bw * static_cast<double>(c);
      col_mass[c] = detail::interval_mass(lo, lo + bw, p.birth, sigma);
    }
    for (std::size_t r = 0; r < img.rows; ++r) {
      const double lo = extent.persistence_min + pw * static_cast<double>(r);
      row_mass[r] = detail::interval_mass(lo, lo + pw, p.persistence(), sigma);
    }
    for (std::size_t r = 0; r < img.rows; ++r) {
      for (std::size_t c = 0; c < img.cols; ++c) img.pixels[r * img.cols + c] += w * row_mass[r] * col_mass[c];
    }
  }
  return img;
}

}  // namespace argutopo
