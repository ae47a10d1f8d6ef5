#include <cmath>
#include <random>

#include "freqfuse/features.hpp"
#include "test_util.hpp"

namespace freqfuse {
namespace {

FeatureVector vec(std::vector<double> v, Branch b = Branch::Spatial) { return FeatureVector(std::move(v), b); }

TEST(FeatureVector, RejectsNonFinite) {
  EXPECT_FREQFUSE_ERROR(vec({1.0, NAN}), ErrorCode::NonFinite);
  EXPECT_FREQFUSE_ERROR(vec({INFINITY}), ErrorCode::NonFinite);
}

TEST(Pool, ConstantChannelHasZeroSpread) {
  const FrequencyCube cube(3, 3, 8, {{PlaneTag::Y, 0, 0}}, std::vector<double>(9, 5.0));
  const auto f = pool_statistics(cube);
  ASSERT_EQ(f.dim(), 2u);
  EXPECT_DOUBLE_EQ(f[0], 5.0);
  EXPECT_DOUBLE_EQ(f[1], 0.0);
  EXPECT_EQ(f.branch(), Branch::Frequency);
}

TEST(Pool, PopulationStandardDeviation) {
  const FrequencyCube cube(1, 2, 8, {{PlaneTag::Cb, 0, 1}}, {0.0, 2.0});
  const auto f = pool_statistics(cube);
  EXPECT_DOUBLE_EQ(f[0], 1.0);
  EXPECT_DOUBLE_EQ(f[1], 1.0);
}

TEST(Pool, DimensionIsTwicePerChannel) {
  std::vector<ChannelLabel> labels;
  for (std::uint8_t u = 0; u < 4; ++u)
    for (std::uint8_t v = 0; v < 4; ++v) labels.push_back({PlaneTag::Y, u, v});
  for (std::uint8_t u = 0; u < 2; ++u)
    for (std::uint8_t v = 0; v < 2; ++v) {
      labels.push_back({PlaneTag::Cb, u, v});
      labels.push_back({PlaneTag::Cr, u, v});
    }
  EXPECT_EQ(pool_statistics(FrequencyCube(56, 56, 8, labels)).dim(), 48u);
}

TEST(Pool, SpatialImageGivesSixStats) {
  RgbImage img(2, 1);
  img.at(0, 0, 0) = 10;
  img.at(1, 0, 0) = 30;
  img.at(0, 0, 2) = 7;
  img.at(1, 0, 2) = 7;
  const auto f = pool_statistics(img);
  ASSERT_EQ(f.dim(), 6u);
  EXPECT_EQ(f.branch(), Branch::Spatial);
  EXPECT_DOUBLE_EQ(f[0], 20.0);
  EXPECT_DOUBLE_EQ(f[1], 10.0);
  EXPECT_DOUBLE_EQ(f[4], 7.0);
  EXPECT_DOUBLE_EQ(f[5], 0.0);
}

TEST(Pool, EmptyInputs) {
  EXPECT_FREQFUSE_ERROR(pool_statistics(FrequencyCube()), ErrorCode::EmptyCube);
  EXPECT_FREQFUSE_ERROR(pool_statistics(RgbImage()), ErrorCode::EmptyCube);
}

TEST(L2Normalize, Examples) {
  const auto a = l2_normalize(vec({3, 4}));
  EXPECT_DOUBLE_EQ(a[0], 0.6);
  EXPECT_DOUBLE_EQ(a[1], 0.8);
  EXPECT_EQ(l2_normalize(vec({0, 1, 0})), vec({0, 1, 0}));
  EXPECT_EQ(l2_normalize(vec({0, 0})), vec({0, 0}));
}

TEST(L2Normalize, NormIsZeroOrOneAndScaleInvariant) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 10.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 20);
    for (double& x : v) x = g(rng);
    const auto n = l2_normalize(vec(v));
    EXPECT_NEAR(l2_norm(n.values()), 1.0, 1e-9);
    const double lambda = scale(rng);
    std::vector<double> scaled = v;
    for (double& x : scaled) x *= lambda;
    const auto ns = l2_normalize(vec(scaled));
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(ns[i], n[i], 1e-12);
  }
}

TEST(Fuse, ConcatenatesNormalizedHalves) {
  std::vector<double> s(6, 1.0), f(48, 2.0);
  const auto fused = fuse(vec(s, Branch::Spatial), vec(f, Branch::Frequency));
  EXPECT_EQ(fused.dim(), 54u);
  EXPECT_EQ(fused.branch(), Branch::Fused);
  EXPECT_NEAR(l2_norm(fused.values()), std::sqrt(2.0), 1e-9);
}

TEST(Fuse, ZeroFrequencyHalf) {
  const auto fused = fuse(vec({3, 4}, Branch::Spatial), vec({0, 0, 0}, Branch::Frequency));
  EXPECT_NEAR(l2_norm(fused.values()), 1.0, 1e-12);
  for (std::size_t i = 2; i < 5; ++i) EXPECT_EQ(fused[i], 0.0);
}

TEST(Fuse, PrefixEqualsNormalizedSpatial) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(1 + rng() % 10), f(1 + rng() % 30);
    for (double& x : s) x = g(rng);
    for (double& x : f) x = g(rng);
    const auto fused = fuse(vec(s, Branch::Spatial), vec(f, Branch::Frequency));
    const auto ns = l2_normalize(vec(s));
    for (std::size_t i = 0; i < s.size(); ++i) ASSERT_EQ(fused[i], ns[i]);
  }
}

TEST(Fuse, BranchMismatch) {
  EXPECT_FREQFUSE_ERROR(fuse(vec({1}, Branch::Frequency), vec({1}, Branch::Frequency)), ErrorCode::BranchMismatch);
  EXPECT_FREQFUSE_ERROR(fuse(vec({1}, Branch::Spatial), vec({1}, Branch::Fused)), ErrorCode::BranchMismatch);
}

struct ToySet {
  std::vector<FeatureVector> x;
  std::vector<std::string> y;
};

ToySet two_points() {
  return {{vec({-1, 0}), vec({1, 0})}, {"left", "right"}};
}

TEST(Probe, SeparableToyReachesFullAccuracy) {
  const auto toy = two_points();
  const auto probe = train_linear_probe(toy.x, toy.y, {200, 0.5, 7});
  EXPECT_EQ(probe.class_names, (std::vector<std::string>{"left", "right"}));
  EXPECT_EQ(predict(probe, toy.x[0]), 0u);
  EXPECT_EQ(predict(probe, toy.x[1]), 1u);
  const auto logits = embed(probe, toy.x[0]);
  EXPECT_GT(logits[0], logits[1]);
}

TEST(Probe, DeterministicGivenSeed) {
  const auto toy = two_points();
  EXPECT_EQ(train_linear_probe(toy.x, toy.y, {50, 0.5, 3}), train_linear_probe(toy.x, toy.y, {50, 0.5, 3}));
  EXPECT_NE(train_linear_probe(toy.x, toy.y, {50, 0.5, 3}).weights,
            train_linear_probe(toy.x, toy.y, {50, 0.5, 4}).weights);
}

TEST(Probe, InitialWeightsWithinRange) {
  const auto toy = two_points();
  // One step at lr 0 leaves the initialization in place.
  const auto probe = train_linear_probe(toy.x, toy.y, {1, 0.0, 9});
  for (double w : probe.weights) {
    EXPECT_GE(w, -0.01);
    EXPECT_LE(w, 0.01);
  }
  for (double b : probe.bias) EXPECT_EQ(b, 0.0);
}

TEST(Probe, Errors) {
  const std::vector<FeatureVector> x{vec({1}), vec({2})};
  const std::vector<std::string> same{"a", "a"};
  EXPECT_FREQFUSE_ERROR(train_linear_probe(x, same, {}), ErrorCode::SingleClass);
  const std::vector<FeatureVector> ragged{vec({1}), vec({2, 3})};
  const std::vector<std::string> two{"a", "b"};
  EXPECT_FREQFUSE_ERROR(train_linear_probe(ragged, two, {}), ErrorCode::DimMismatch);
  const auto probe = train_linear_probe(x, two, {1, 0.1, 0});
  EXPECT_FREQFUSE_ERROR(embed(probe, vec({1, 2})), ErrorCode::DimMismatch);
}

TEST(Embed, LinearMap) {
  LinearProbe zero{3, {"a", "b"}, std::vector<double>(6, 0.0), {0.0, 0.0}};
  EXPECT_EQ(embed(zero, vec({1, 2, 3})), vec({0, 0}));
  LinearProbe eye{2, {"a", "b"}, {1, 0, 0, 1}, {0.5, -0.5}};
  EXPECT_EQ(embed(eye, vec({1, 0})), vec({1.5, -0.5}));
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

TEST(Probe, AnalyticGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + rng() % 10, k = 2 + rng() % 3, n = 3 + rng() % 8;
    LinearProbe probe{dim, {}, std::vector<double>(k * dim), std::vector<double>(k)};
    for (std::size_t c = 0; c < k; ++c) probe.class_names.push_back("c" + std::to_string(c));
    for (double& w : probe.weights) w = g(rng);
    for (double& b : probe.bias) b = g(rng);
    std::vector<FeatureVector> x;
    std::vector<std::size_t> y;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      for (double& e : v) e = g(rng);
      x.push_back(vec(v));
      y.push_back(rng() % k);
    }
    const auto analytic = probe_loss_and_gradient(probe, x, y);
    constexpr double h = 1e-5;
    auto numeric = [&](std::vector<double>& params) {
      std::vector<double> out(params.size());
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double up = probe_loss_and_gradient(probe, x, y).loss;
        params[i] = keep - h;
        const double down = probe_loss_and_gradient(probe, x, y).loss;
        params[i] = keep;
        out[i] = (up - down) / (2 * h);
      }
      return out;
    };
    EXPECT_LT(relative_error(analytic.weights, numeric(probe.weights)), 1e-4);
    EXPECT_LT(relative_error(analytic.bias, numeric(probe.bias)), 1e-4);
  }
}

TEST(Probe, LossNonIncreasingAtSmallLearningRate) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t dim = 2 + rng() % 5, k = 2 + rng() % 3;
    std::vector<std::vector<double>> centers(k, std::vector<double>(dim));
    for (auto& c : centers)
      for (double& e : c) e = 3.0 * g(rng) / 0.3;
    std::vector<FeatureVector> x;
    std::vector<std::string> y;
    for (std::size_t i = 0; i < 40; ++i) {
      const std::size_t c = i % k;
      std::vector<double> v = centers[c];
      for (double& e : v) e += g(rng);
      x.push_back(vec(v));
      y.push_back("k" + std::to_string(c));
    }
    std::vector<double> trace;
    train_linear_probe(x, y, {300, 0.01, static_cast<std::uint64_t>(trial)}, &trace);
    ASSERT_EQ(trace.size(), 300u);
    for (std::size_t i = 1; i < trace.size(); ++i) ASSERT_LE(trace[i], trace[i - 1] + 1e-12);
    EXPECT_LT(trace.back(), trace.front());
  }
}

}  // namespace
}  // namespace freqfuse
