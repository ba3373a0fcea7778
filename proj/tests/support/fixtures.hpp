#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "argutopo/signal.hpp"

namespace argutopo::testing {

inline PointCloud unit_square() {
  return PointCloud::from_rows({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

inline PointCloud circle(std::size_t n, double radius) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    rows.push_back({radius * std::cos(t), radius * std::sin(t)});
  }
  return PointCloud::from_rows(rows);
}

inline PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> coords(n * dim);
  for (double& c : coords) c = u(rng);
  return PointCloud(dim, std::move(coords));
}

inline std::vector<double> sine_wave(std::size_t n, double period) {
  std::vector<double> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = std::sin(2.0 * std::numbers::pi * static_cast<double>(k + 1) / period);
  }
  return z;
}

/// Random rotation (Gram-Schmidt on a Gaussian matrix) plus translation.
inline PointCloud random_rigid_motion(std::mt19937_64& rng, const PointCloud& cloud) {
  const std::size_t dim = cloud.dimension();
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> q(dim, std::vector<double>(dim));
  for (auto& row : q)
    for (double& x : row) x = g(rng);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += q[i][k] * q[j][k];
      for (std::size_t k = 0; k < dim; ++k) q[i][k] -= dot * q[j][k];
    }
    double norm = 0.0;
    for (double x : q[i]) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : q[i]) x /= norm;
  }
  std::vector<double> shift(dim);
  for (double& s : shift) s = 5.0 * g(rng);

  std::vector<double> coords;
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    for (std::size_t i = 0; i < dim; ++i) {
      double v = shift[i];
      for (std::size_t k = 0; k < dim; ++k) v += q[i][k] * cloud(p, k);
      coords.push_back(v);
    }
  }
  return PointCloud(dim, std::move(coords));
}

}  // namespace argutopo::testing
