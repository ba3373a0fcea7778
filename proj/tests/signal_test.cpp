#include "argutopo/signal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "argutopo/csv.hpp"
#include "support/fixtures.hpp"

namespace argutopo {
namespace {

using testing::sine_wave;

TimeSeries alternating(std::size_t n) {
  std::vector<double> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = k % 2 == 0 ? 1.0 : -1.0;
  return TimeSeries(z);
}

TimeSeries noise(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> z(n);
  for (double& v : z) v = u(rng);
  return TimeSeries(z);
}

TEST(TimeSeries, RejectsNonFiniteValues) {
  EXPECT_THROW(TimeSeries({1.0, std::nan("")}), DataError);
  EXPECT_THROW(TimeSeries({std::numeric_limits<double>::infinity()}), DataError);
}

TEST(SampleDirection, DeterministicAndNormalized) {
  for (std::size_t dim : {1u, 2u, 4u, 300u}) {
    for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xFFFFFFFFFFFFFFFFull}) {
      const auto a = sample_direction(dim, seed);
      const auto b = sample_direction(dim, seed);
      EXPECT_EQ(a.components, b.components);
      EXPECT_EQ(a.seed, seed);
      double n2 = 0.0;
      for (double c : a.components) n2 += c * c;
      EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-12);
    }
  }
}

TEST(SampleDirection, DifferentSeedsGiveDifferentDirections) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    EXPECT_NE(sample_direction(300, s).components, sample_direction(300, s + 1).components);
  }
}

TEST(SampleDirection, ZeroDimensionIsAUsageError) {
  EXPECT_THROW((void)sample_direction(0, 1), UsageError);
}

TEST(SampleDirection, RoughlyIsotropic) {
  // Mean of each coordinate over many seeds stays near zero.
  std::vector<double> mean(3, 0.0);
  const int n = 4000;
  for (int s = 0; s < n; ++s) {
    const auto v = sample_direction(3, static_cast<std::uint64_t>(s));
    for (int k = 0; k < 3; ++k) mean[k] += v.components[k] / n;
  }
  for (double m : mean) EXPECT_NEAR(m, 0.0, 0.05);
}

VectorSequence vectors(std::vector<std::vector<double>> rows) {
  VectorSequence v;
  v.dimension = rows.empty() ? 0 : rows.front().size();
  v.vectors = std::move(rows);
  return v;
}

TEST(ProjectSeries, BasisProjection) {
  const auto s = project_series(vectors({{1, 0}, {0, 1}, {1, 0}}), UnitVector{{1.0, 0.0}, 0});
  EXPECT_EQ(std::vector<double>(s.values().begin(), s.values().end()), (std::vector<double>{1, 0, 1}));
}

TEST(ProjectSeries, OrthogonalDirectionGivesZeros) {
  const auto s = project_series(vectors({{1, 0, 0}, {0, 2, 0}, {3, -1, 0}}), UnitVector{{0.0, 0.0, 1.0}, 0});
  for (double v : s.values()) EXPECT_EQ(v, 0.0);
}

TEST(ProjectSeries, IsLinear) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> rows(20, std::vector<double>(6));
  for (auto& r : rows)
    for (double& x : r) x = g(rng);
  auto doubled = rows;
  for (auto& r : doubled)
    for (double& x : r) x *= 2.0;
  const auto u = sample_direction(6, 77);
  const auto a = project_series(vectors(rows), u);
  const auto b = project_series(vectors(doubled), u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 2.0 * a[i], 1e-12);
}

TEST(ProjectSeries, Errors) {
  EXPECT_THROW((void)project_series(vectors({}), UnitVector{{1.0}, 0}), NumericalError);
  EXPECT_THROW((void)project_series(vectors({{1, 0}}), UnitVector{{1.0, 0.0, 0.0}, 0}), UsageError);
}

TEST(Autocorrelation, LagZeroIsOne) {
  EXPECT_DOUBLE_EQ(autocorrelation(noise(1, 57), 0), 1.0);
  EXPECT_DOUBLE_EQ(autocorrelation(TimeSeries(sine_wave(100, 13)), 0), 1.0);
}

TEST(Autocorrelation, AlternatingSeriesUsesBiasedNormalization) {
  // The biased estimator sums N - 1 products over N squares.
  for (std::size_t n : {2u, 10u, 1000u}) {
    const double expected = -static_cast<double>(n - 1) / static_cast<double>(n);
    EXPECT_NEAR(autocorrelation(alternating(n), 1), expected, 1e-12);
  }
}

TEST(Autocorrelation, SineFollowsCosine) {
  const TimeSeries s(sine_wave(400, 40));
  for (std::size_t lag = 0; lag <= 10; ++lag) {
    EXPECT_NEAR(autocorrelation(s, lag), std::cos(2.0 * std::numbers::pi * lag / 40.0), 0.05) << lag;
  }
}

TEST(Autocorrelation, Errors) {
  EXPECT_THROW((void)autocorrelation(TimeSeries({2.0, 2.0, 2.0}), 1), NumericalError);
  EXPECT_THROW((void)autocorrelation(noise(2, 5), 5), NumericalError);
}

TEST(SelectDelayAcf, AlternatingGivesOne) {
  const auto sel = select_delay_acf(alternating(20));
  EXPECT_EQ(sel.value, 1u);
  EXPECT_TRUE(sel.warnings.empty());
}

TEST(SelectDelayAcf, SineGivesFirstCrossingOfOneOverE) {
  const auto sel = select_delay_acf(TimeSeries(sine_wave(400, 40)));
  EXPECT_EQ(sel.value, 8u);
  EXPECT_EQ(sel.method, "acf");
  ASSERT_GE(sel.trace.size(), 8u);
  EXPECT_LT(sel.trace[7], 1.0 / std::numbers::e);
  EXPECT_GE(sel.trace[6], 1.0 / std::numbers::e);
}

TEST(SelectDelayAcf, FallsBackToQuarterLengthWithWarning) {
  // The biased estimator never drops below -1.
  std::vector<double> ramp(40);
  for (std::size_t k = 0; k < ramp.size(); ++k) ramp[k] = static_cast<double>(k);
  const auto sel = select_delay_acf(TimeSeries(ramp), -1.0);
  EXPECT_EQ(sel.value, 10u);
  EXPECT_FALSE(sel.warnings.empty());
}

TEST(SelectDelayAcf, Errors) {
  EXPECT_THROW((void)select_delay_acf(TimeSeries({1.0, 2.0, 3.0})), NumericalError);
  EXPECT_THROW((void)select_delay_acf(TimeSeries({1.0, 1.0, 1.0, 1.0})), NumericalError);
}

TEST(MutualInformation, SineMatchesHistogramOracle) {
  // First values of I(tau) in nats, from an independent numpy histogram2d
  // evaluation. Samples that land exactly on a bin edge may fall either way,
  // hence the tolerance.
  const TimeSeries s(sine_wave(800, 40));
  const std::vector<std::pair<std::size_t, double>> oracle{
      {1, 1.978787}, {5, 1.506020}, {6, 1.435187}, {7, 1.435695}, {10, 1.441946}, {15, 1.516286}};
  for (const auto& [tau, expected] : oracle) {
    EXPECT_NEAR(delayed_mutual_information(s, tau, 16), expected, 1e-2) << tau;
  }
}

TEST(SelectDelayMi, SineFirstLocalMinimum) {
  // I(tau) for this sampled sine falls until tau = 6 and then stays on a
  // plateau up to the quarter period; the first local minimum is 6.
  const auto sel = select_delay_mi(TimeSeries(sine_wave(800, 40)), 16);
  EXPECT_EQ(sel.value, 6u);
  EXPECT_EQ(sel.method, "mutual-information");
  EXPECT_TRUE(sel.warnings.empty());
  ASSERT_EQ(sel.trace.size(), 7u);
  const TimeSeries s(sine_wave(800, 40));
  EXPECT_LT(std::abs(delayed_mutual_information(s, 10, 16) - sel.trace[5]), 0.01);
}

TEST(SelectDelayMi, NoiseReturnsOneWhenSecondLagIsLarger) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = noise(seed, 4000);
    const double i1 = delayed_mutual_information(s, 1, 16);
    const double i2 = delayed_mutual_information(s, 2, 16);
    EXPECT_LT(i1, 0.1);
    if (i1 < i2) {
      EXPECT_EQ(select_delay_mi(s, 16).value, 1u) << seed;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(SelectDelayMi, FlatTraceFallsBackToAcf) {
  // A single bin carries no information at any lag.
  const auto sel = select_delay_mi(alternating(64), 1);
  EXPECT_EQ(sel.method, "mutual-information->acf");
  EXPECT_EQ(sel.value, 1u);
  EXPECT_FALSE(sel.warnings.empty());
}

TEST(SelectDelayMi, Errors) {
  EXPECT_THROW((void)select_delay_mi(TimeSeries(std::vector<double>(100, 1.0)), 16), NumericalError);
  EXPECT_THROW((void)select_delay_mi(noise(1, 20), 16), NumericalError);
}

TEST(SelectDimensionFnn, SineUnfoldsInThePlane) {
  for (std::size_t tau : {8u, 10u}) {
    const auto sel = select_dimension_fnn(TimeSeries(sine_wave(400, 40)), tau);
    EXPECT_EQ(sel.value, 2u) << tau;
    EXPECT_EQ(sel.method, "false-nearest-neighbors");
    EXPECT_TRUE(sel.warnings.empty());
  }
}

TEST(SelectDimensionFnn, DuplicatePointsAreNotNeighbours) {
  // Every point has exact duplicates; without the guard the ratio divides by 0.
  std::vector<double> z;
  for (int rep = 0; rep < 10; ++rep)
    for (double v : {0.0, 1.0, 3.0, 7.0}) z.push_back(v);
  const TimeSeries s(z);
  const double frac = false_neighbor_fraction(s, 1, 1, 10.0);
  EXPECT_TRUE(std::isfinite(frac));
  EXPECT_GE(frac, 0.0);
  EXPECT_LE(frac, 1.0);
  EXPECT_EQ(false_neighbor_fraction(TimeSeries(std::vector<double>(10, 2.0)), 1, 1, 10.0), 0.0);
}

TEST(SelectDimensionFnn, TooShortSeriesNamesConstraint) {
  try {
    (void)select_dimension_fnn(TimeSeries(sine_wave(20, 40)), 5);
    FAIL() << "expected an error";
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("N=20"), std::string::npos) << msg;
    EXPECT_NE(msg.find("tau=5"), std::string::npos) << msg;
  }
}

TEST(DelayEmbed, WorkedExample) {
  const auto cloud = delay_embed(TimeSeries({1, 2, 3, 4, 5}), 2, 2);
  EXPECT_EQ(cloud, PointCloud::from_rows({{1, 3}, {2, 4}, {3, 5}}));
}

TEST(DelayEmbed, DimensionOneIsTheSeries) {
  const auto s = noise(3, 17);
  const auto cloud = delay_embed(s, 1, 4);
  ASSERT_EQ(cloud.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(cloud(i, 0), s[i]);
}

TEST(DelayEmbed, CountLawAndColumnShift) {
  std::mt19937_64 rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng() % 6;
    const std::size_t tau = 1 + rng() % 6;
    const std::size_t n = (d - 1) * tau + 1 + rng() % 40;
    const auto s = noise(rng(), n);
    const auto cloud = delay_embed(s, d, tau);
    ASSERT_EQ(cloud.size(), n - (d - 1) * tau);
    ASSERT_EQ(cloud.dimension(), d);
    for (std::size_t i = 0; i < cloud.size(); ++i)
      for (std::size_t k = 0; k < d; ++k) ASSERT_EQ(cloud(i, k), s[i + k * tau]);
  }
}

TEST(DelayEmbed, ViolatedPreconditionReportsParameters) {
  try {
    (void)delay_embed(TimeSeries({1, 2, 3}), 3, 2);
    FAIL() << "expected an error";
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    for (const char* part : {"N=3", "D=3", "tau=2"}) EXPECT_NE(msg.find(part), std::string::npos) << msg;
  }
  EXPECT_THROW((void)delay_embed(TimeSeries({1, 2, 3}), 0, 1), Error);
  EXPECT_THROW((void)delay_embed(TimeSeries({1, 2, 3}), 1, 0), Error);
}

TEST(Csv, SeriesRoundTripIsExact) {
  const auto s = noise(12, 50);
  std::stringstream ss;
  write_series_csv(s, ss);
  EXPECT_EQ(read_series_csv(ss), s);
}

TEST(Csv, PointCloudRoundTripIsExact) {
  std::mt19937_64 rng(13);
  const auto cloud = testing::random_cloud(rng, 25, 3);
  std::stringstream ss;
  write_point_cloud_csv(cloud, ss);
  EXPECT_EQ(read_point_cloud_csv(ss), cloud);
}

TEST(Csv, MalformedRowsAreParseErrors) {
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW((void)read_point_cloud_csv(ragged), ParseError);
  std::istringstream junk("1\nabc\n");
  EXPECT_THROW((void)read_series_csv(junk), ParseError);
}

}  // namespace
}  // namespace argutopo
