#pragma once

// Scalar series from word vectors, delay-parameter selection, and the
// time-delay embedding itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "argutopo/error.hpp"
#include "argutopo/text_embedding.hpp"

namespace argutopo {

/// Ordered finite real sequence z_1..z_N.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DataError("time series value " + std::to_string(i) + " is not finite");
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
};

/// N x D matrix of finite reals, row-major.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dimension, std::vector<double> coords)
      : dimension_(dimension), coords_(std::move(coords)) {
    if (dimension_ == 0) throw DataError("point cloud dimension must be positive");
    if (coords_.size() % dimension_ != 0) {
      throw DataError("point cloud storage is not a multiple of the dimension");
    }
    for (double c : coords_) {
      if (!std::isfinite(c)) throw DataError("point cloud contains a non-finite coordinate");
    }
  }

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw DataError("point cloud needs at least one point");
    const std::size_t dim = rows.front().size();
    std::vector<double> coords;
    coords.reserve(rows.size() * dim);
    for (const auto& r : rows) {
      if (r.size() != dim) throw DataError("point cloud rows have inconsistent dimension");
      coords.insert(coords.end(), r.begin(), r.end());
    }
    return PointCloud(dim, std::move(coords));
  }

  [[nodiscard]] std::size_t size() const noexcept {
    return dimension_ == 0 ? 0 : coords_.size() / dimension_;
  }
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dimension_, dimension_};
  }
  [[nodiscard]] double operator()(std::size_t i, std::size_t k) const {
    return coords_[i * dimension_ + k];
  }
  [[nodiscard]] std::span<const double> data() const noexcept { return coords_; }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<double> coords_;
};

// ---------------------------------------------------------------------------
// Random projection
// ---------------------------------------------------------------------------

struct UnitVector {
  std::vector<double> components;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t dimension() const noexcept { return components.size(); }
};

namespace detail {

/// Standard normal deviates via Box-Muller over mt19937_64. The engine's
/// output sequence is fixed by the standard, unlike std::normal_distribution,
/// so the same seed gives the same direction on every platform.
class PortableNormal {
 public:
  explicit PortableNormal(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Uniform in (0, 1]: 53 random bits, offset by one ulp step.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace detail

/// Isotropic random unit vector, a pure function of (dimension, seed).
inline UnitVector sample_direction(std::size_t dimension, std::uint64_t seed) {
  if (dimension == 0) throw UsageError("projection direction dimension must be at least 1");
  detail::PortableNormal normal(seed);
  UnitVector v{std::vector<double>(dimension), seed};
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& c : v.components) {
      c = normal();
      norm2 += c * c;
    }
  } while (norm2 == 0.0);
  const double norm = std::sqrt(norm2);
  for (double& c : v.components) c /= norm;
  return v;
}

/// z_n = <v_n, direction>, in token order.
inline TimeSeries project_series(const VectorSequence& vectors, const UnitVector& direction) {
  if (vectors.vectors.empty()) throw NumericalError("cannot project an empty vector sequence");
  std::vector<double> z;
  z.reserve(vectors.size());
  for (const auto& v : vectors.vectors) {
    if (v.size() != direction.dimension()) {
      throw UsageError("projection direction has dimension " +
                       std::to_string(direction.dimension()) + " but word vectors have dimension " +
                       std::to_string(v.size()));
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) dot += v[k] * direction.components[k];
    z.push_back(dot);
  }
  return TimeSeries(std::move(z));
}

// ---------------------------------------------------------------------------
// Delay selection
// ---------------------------------------------------------------------------

/// Outcome of an automatic parameter selector, with the evaluated statistic
/// at each probed value (trace[k] belongs to parameter value k + trace_start).
struct Selection {
  std::size_t value = 0;
  std::string method;
  std::size_t trace_start = 1;
  std::vector<double> trace;
  std::vector<std::string> warnings;
};

namespace detail {

inline double centered_energy(std::span<const double> z, double mean) {
  double s = 0.0;
  for (double v : z) s += (v - mean) * (v - mean);
  return s;
}

inline double mean_of(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v;
  return s / static_cast<double>(z.size());
}

}  // namespace detail

/// Biased sample autocorrelation
///   rho(lag) = sum_{n<N-lag} (z_n - m)(z_{n+lag} - m) / sum_n (z_n - m)^2.
inline double autocorrelation(const TimeSeries& series, std::size_t lag) {
  const auto z = series.values();
  if (lag >= z.size()) {
    throw NumericalError("autocorrelation lag " + std::to_string(lag) +
                         " must be smaller than series length " + std::to_string(z.size()));
  }
  const double mean = detail::mean_of(z);
  const double denom = detail::centered_energy(z, mean);
  if (!(denom > 0.0)) throw NumericalError("autocorrelation: zero variance");
  double num = 0.0;
  for (std::size_t n = 0; n + lag < z.size(); ++n) num += (z[n] - mean) * (z[n + lag] - mean);
  return num / denom;
}

/// Smallest tau >= 1 with rho(tau) < threshold, searched over tau < N/2.
/// Falls back to floor(N/4) with a warning.
inline Selection select_delay_acf(const TimeSeries& series,
                                  double threshold = 1.0 / std::numbers::e) {
  const std::size_t n = series.size();
  if (n < 4) {
    throw NumericalError("delay selection needs at least 4 samples, got " + std::to_string(n));
  }
  Selection sel;
  sel.method = "acf";
  for (std::size_t tau = 1; 2 * tau < n; ++tau) {
    const double rho = autocorrelation(series, tau);
    sel.trace.push_back(rho);
    if (rho < threshold) {
      sel.value = tau;
      return sel;
    }
  }
  sel.value = std::max<std::size_t>(1, n / 4);
  sel.warnings.push_back("autocorrelation never dropped below " + detail::format_shortest(threshold) +
                         " for tau < N/2; using floor(N/4) = " + std::to_string(sel.value));
  return sel;
}

/// Mutual information (nats) between z_n and z_{n+tau} from a bins x bins
/// equal-width histogram over the series range.
inline double delayed_mutual_information(const TimeSeries& series, std::size_t tau,
                                         std::size_t bins) {
  const auto z = series.values();
  if (bins == 0) throw UsageError("mutual information needs at least one bin");
  if (tau >= z.size()) throw NumericalError("mutual information delay exceeds series length");
  const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
  const double lo = *lo_it;
  const double width = *hi_it - lo;
  if (!(width > 0.0)) throw NumericalError("mutual information: zero variance");

  auto bin_of = [&](double v) {
    const auto b = static_cast<std::size_t>((v - lo) / width * static_cast<double>(bins));
    return std::min(b, bins - 1);
  };
  const std::size_t pairs = z.size() - tau;
  std::vector<double> joint(bins * bins, 0.0);
  std::vector<double> px(bins, 0.0);
  std::vector<double> py(bins, 0.0);
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t a = bin_of(z[k]);
    const std::size_t b = bin_of(z[k + tau]);
    joint[a * bins + b] += 1.0;
    px[a] += 1.0;
    py[b] += 1.0;
  }
  const double total = static_cast<double>(pairs);
  double mi = 0.0;
  for (std::size_t a = 0; a < bins; ++a) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double c = joint[a * bins + b];
      if (c == 0.0) continue;
      mi += (c / total) * std::log(c * total / (px[a] * py[b]));
    }
  }
  return std::max(mi, 0.0);
}

/// First local minimum of the delayed mutual information: the first tau with
/// I(tau) < I(tau + 1). Falls back to the autocorrelation selector.
inline Selection select_delay_mi(const TimeSeries& series, std::size_t bins = 16) {
  const std::size_t n = series.size();
  if (bins == 0 || n < 4 * bins) {
    throw NumericalError("mutual-information delay selection needs N >= 4*bins (N=" +
                         std::to_string(n) + ", bins=" + std::to_string(bins) + ")");
  }
  Selection sel;
  sel.method = "mutual-information";
  for (std::size_t tau = 1; 2 * tau < n; ++tau) {
    sel.trace.push_back(delayed_mutual_information(series, tau, bins));
    if (sel.trace.size() >= 2 && sel.trace[sel.trace.size() - 2] < sel.trace.back()) {
      sel.value = tau - 1;
      return sel;
    }
  }
  Selection fallback = select_delay_acf(series);
  fallback.warnings.insert(fallback.warnings.begin(),
                           "mutual information has no local minimum for tau < N/2; "
                           "falling back to autocorrelation");
  fallback.method = "mutual-information->acf";
  return fallback;
}

// ---------------------------------------------------------------------------
// Embedding dimension
// ---------------------------------------------------------------------------

struct FnnOptions {
  std::size_t max_dimension = 10;
  double r_tol = 10.0;
  double fraction_threshold = 0.01;
};

/// Fraction of false nearest neighbours when going from dimension `dim` to
/// dim + 1 (Kennel's distance-ratio criterion).
///
/// Duplicate points (distance zero, up to 1e-9 of the series range) are not
/// neighbour candidates: repeated words make them common and the ratio is
/// undefined for them. A point whose every other point is a duplicate is left
/// out of the count. Returns 0 if no point counts.
inline double false_neighbor_fraction(const TimeSeries& series, std::size_t dim,
                                      std::size_t tau, double r_tol) {
  const auto z = series.values();
  if (z.size() < dim * tau + 2) {
    throw NumericalError("false nearest neighbours at D=" + std::to_string(dim) +
                         " need N >= D*tau + 2 (N=" + std::to_string(z.size()) +
                         ", tau=" + std::to_string(tau) + ")");
  }
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  const double zero_tol = 1e-9 * (*hi - *lo);
  const double zero_tol2 = zero_tol * zero_tol;

  // Points that also own the (dim+1)-th coordinate.
  const std::size_t m = z.size() - dim * tau;
  std::size_t counted = 0;
  std::size_t false_count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = i;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = z[i + k * tau] - z[j + k * tau];
        d2 += diff * diff;
        if (d2 >= best) break;
      }
      if (d2 < best && d2 > zero_tol2) {
        best = d2;
        best_j = j;
      }
    }
    if (best_j == i) continue;
    ++counted;
    const double extra = std::abs(z[i + dim * tau] - z[best_j + dim * tau]);
    if (extra / std::sqrt(best) > r_tol) ++false_count;
  }
  return counted == 0 ? 0.0 : static_cast<double>(false_count) / static_cast<double>(counted);
}

/// Smallest D in 1..max_dimension whose false-neighbour fraction falls below
/// the threshold; max_dimension with a warning otherwise.
inline Selection select_dimension_fnn(const TimeSeries& series, std::size_t tau,
                                      const FnnOptions& options = {}) {
  const std::size_t n = series.size();
  if (tau == 0 || options.max_dimension == 0) {
    throw UsageError("false nearest neighbours need tau >= 1 and max dimension >= 1");
  }
  if (n < (options.max_dimension - 1) * tau + 2) {
    throw NumericalError("series too short for false nearest neighbours: need N - (max_D-1)*tau "
                         ">= 2, got N=" + std::to_string(n) +
                         ", max_D=" + std::to_string(options.max_dimension) +
                         ", tau=" + std::to_string(tau));
  }
  Selection sel;
  sel.method = "false-nearest-neighbors";
  for (std::size_t dim = 1; dim <= options.max_dimension; ++dim) {
    if (n < dim * tau + 2) {
      sel.value = dim;
      sel.warnings.push_back("series too short to test D=" + std::to_string(dim) +
                             " against D+1; stopping there");
      return sel;
    }
    const double frac = false_neighbor_fraction(series, dim, tau, options.r_tol);
    sel.trace.push_back(frac);
    if (frac < options.fraction_threshold) {
      sel.value = dim;
      return sel;
    }
  }
  sel.value = options.max_dimension;
  sel.warnings.push_back("false-neighbour fraction never fell below " +
                         detail::format_shortest(options.fraction_threshold) + "; using max D = " +
                         std::to_string(options.max_dimension));
  return sel;
}

// ---------------------------------------------------------------------------
// Delay embedding
// ---------------------------------------------------------------------------

struct DelayParameters {
  std::size_t dimension = 1;
  std::size_t tau = 1;
  Selection dimension_selection;
  Selection tau_selection;
};

/// Points (z_n, z_{n+tau}, ..., z_{n+(D-1)tau}) for n = 1..N-(D-1)tau.
inline PointCloud delay_embed(const TimeSeries& series, std::size_t dimension, std::size_t tau) {
  const std::size_t n = series.size();
  if (dimension == 0 || tau == 0 || n < (dimension - 1) * tau + 1) {
    throw NumericalError("delay embedding needs N - (D-1)*tau >= 1 with D, tau >= 1 (N=" +
                         std::to_string(n) + ", D=" + std::to_string(dimension) +
                         ", tau=" + std::to_string(tau) + ")");
  }
  const std::size_t points = n - (dimension - 1) * tau;
  std::vector<double> coords;
  coords.reserve(points * dimension);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t k = 0; k < dimension; ++k) coords.push_back(series[i + k * tau]);
  }
  return PointCloud(dimension, std::move(coords));
}

}  // namespace argutopo
