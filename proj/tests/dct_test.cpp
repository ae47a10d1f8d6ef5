#include <cmath>
#include <random>

#include "freqfuse/dct.hpp"
#include "test_util.hpp"

namespace freqfuse {
namespace {

// Oracle: D[u][v] = sum_r sum_c a(u) a(v) cos((2r+1)u pi/2n) cos((2c+1)v pi/2n) (M[r][c] - 128),
// evaluated term by term without any matrix products.
double basis(std::size_t i, std::size_t j, std::size_t n) {
  const double scale = i == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  return scale * std::cos(M_PI * static_cast<double>((2 * j + 1) * i) / (2.0 * static_cast<double>(n)));
}

Block oracle_forward(const Block& m) {
  const std::size_t n = m.size();
  Block d(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) acc += basis(u, r, n) * basis(v, c, n) * (m(r, c) - 128.0);
      d(u, v) = acc;
    }
  return d;
}

Block random_block(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 255.0);
  Block b(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) b(r, c) = dist(rng);
  return b;
}

double max_abs_diff(const Block& a, const Block& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

TEST(DctMatrix, TwoPoint) {
  const DctMatrix t(2);
  EXPECT_NEAR(t(0, 0), 0.70711, 1e-5);
  EXPECT_NEAR(t(0, 1), 0.70711, 1e-5);
  EXPECT_NEAR(t(1, 0), 0.70711, 1e-5);
  EXPECT_NEAR(t(1, 1), -0.70711, 1e-5);
}

TEST(DctMatrix, EightPointDcRow) {
  const DctMatrix t(8);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(t(0, j), 0.35355, 1e-5);
}

TEST(DctMatrix, MatchesOracleBasis) {
  for (std::size_t n : {3u, 8u, 17u}) {
    const DctMatrix t(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(t(i, j), basis(i, j, n), 1e-15);
  }
}

TEST(DctMatrix, Orthonormal) {
  for (std::size_t n : {2u, 4u, 6u, 8u, 16u, 32u, 64u}) {
    const DctMatrix t(n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += t(i, j) * t(k, j);
        worst = std::max(worst, std::abs(acc - (i == k ? 1.0 : 0.0)));
      }
    EXPECT_LT(worst, 1e-10) << "n=" << n;
  }
}

TEST(DctMatrix, BadBlockSize) {
  EXPECT_FREQFUSE_ERROR(DctMatrix(1), ErrorCode::BadBlockSize);
  EXPECT_FREQFUSE_ERROR(DctMatrix(65), ErrorCode::BadBlockSize);
}

TEST(ForwardDct, MidGrayIsAllZero) {
  for (std::size_t n : {2u, 5u, 8u}) {
    const auto d = forward_dct_block(Block(n, 128.0), DctMatrix(n));
    for (double v : d.values()) EXPECT_NEAR(v, 0.0, 1e-12);
  }
}

TEST(ForwardDct, ConstantWhiteBlock) {
  const Block white(8, 255.0);
  const auto d = forward_dct_block(white, DctMatrix(8));
  EXPECT_NEAR(d(0, 0), 1016.0, 1e-9);
  EXPECT_NEAR(oracle_forward(white)(0, 0), 1016.0, 1e-9);
  for (std::size_t u = 0; u < 8; ++u)
    for (std::size_t v = 0; v < 8; ++v)
      if (u || v) EXPECT_NEAR(d(u, v), 0.0, 1e-9);
}

TEST(ForwardDct, TwoByTwoCheckerboard) {
  const Block m(2, {0, 255, 255, 0});
  const auto d = forward_dct_block(m, DctMatrix(2));
  const Block expected(2, {-1, 0, 0, -255});
  EXPECT_LT(max_abs_diff(d, expected), 1e-12);
  EXPECT_LT(max_abs_diff(oracle_forward(m), expected), 1e-12);
}

TEST(ForwardDct, MatchesOracleOnRandomBlocks) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {2u, 4u, 6u, 8u, 16u}) {
    const DctMatrix t(n);
    for (int trial = 0; trial < 20; ++trial) {
      const auto b = random_block(n, rng);
      EXPECT_LT(max_abs_diff(forward_dct_block(b, t), oracle_forward(b)), 1e-9) << "n=" << n;
    }
  }
}

TEST(InverseDct, ZeroCoefficientsGiveMidGray) {
  const auto m = inverse_dct_block(Block(4), DctMatrix(4));
  EXPECT_LT(max_abs_diff(m, Block(4, 128.0)), 1e-12);
}

TEST(InverseDct, InvertsCheckerboardExample) {
  const auto m = inverse_dct_block(Block(2, {-1, 0, 0, -255}), DctMatrix(2));
  EXPECT_LT(max_abs_diff(m, Block(2, {0, 255, 255, 0})), 1e-12);
}

TEST(Dct, SizeMismatch) {
  EXPECT_FREQFUSE_ERROR(forward_dct_block(Block(4), DctMatrix(8)), ErrorCode::SizeMismatch);
  EXPECT_FREQFUSE_ERROR(inverse_dct_block(Block(8), DctMatrix(4)), ErrorCode::SizeMismatch);
  EXPECT_FREQFUSE_ERROR(Block(3, std::vector<double>(8)), ErrorCode::SizeMismatch);
}

TEST(Dct, RoundTripParsevalLinearity) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (std::size_t n : {2u, 4u, 6u, 8u, 16u, 32u}) {
    const DctMatrix t(n);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto a = random_block(n, rng);
      const auto da = forward_dct_block(a, t);
      ASSERT_LT(max_abs_diff(inverse_dct_block(da, t), a), 1e-9);

      double spatial = 0.0, freq = 0.0;
      for (double v : a.values()) spatial += (v - 128.0) * (v - 128.0);
      for (double v : da.values()) freq += v * v;
      ASSERT_NEAR(freq, spatial, 1e-9 * spatial);

      if (trial % 50 == 0) {
        const auto b = random_block(n, rng);
        const double alpha = coef(rng), beta = coef(rng);
        Block mix(n);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t c = 0; c < n; ++c)
            mix(r, c) = alpha * a(r, c) + beta * b(r, c) + 128.0 * (1.0 - alpha - beta);
        const auto dm = forward_dct_block(mix, t);
        const auto db = forward_dct_block(b, t);
        for (std::size_t i = 0; i < n * n; ++i) {
          ASSERT_NEAR(dm.values()[i], alpha * da.values()[i] + beta * db.values()[i], 1e-9);
        }
      }
    }
  }
}

TEST(BlockwiseDct, GridShapes) {
  const DctMatrix t(8);
  const auto luma = blockwise_dct(Plane(448, 448, 128.0), t);
  EXPECT_EQ(luma.rows(), 56u);
  EXPECT_EQ(luma.cols(), 56u);
  const auto chroma = blockwise_dct(Plane(224, 224, 128.0), t);
  EXPECT_EQ(chroma.rows(), 28u);
  EXPECT_EQ(chroma.cols(), 28u);
}

TEST(BlockwiseDct, NotDivisible) {
  EXPECT_FREQFUSE_ERROR(blockwise_dct(Plane(448, 448), DctMatrix(6)), ErrorCode::NotDivisible);
  EXPECT_FREQFUSE_ERROR(blockwise_dct(Plane(16, 12), DctMatrix(8)), ErrorCode::NotDivisible);
}

TEST(BlockwiseDct, EachBlockIsTransformOfItsPatch) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(0.0, 255.0);
  Plane p(12, 8);
  for (double& v : p.data()) v = dist(rng);
  const DctMatrix t(4);
  const auto grid = blockwise_dct(p, t);
  ASSERT_EQ(grid.rows(), 2u);
  ASSERT_EQ(grid.cols(), 3u);
  for (std::size_t br = 0; br < 2; ++br)
    for (std::size_t bc = 0; bc < 3; ++bc) {
      Block patch(4);
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) patch(r, c) = p(bc * 4 + c, br * 4 + r);
      EXPECT_EQ(grid.at(br, bc), forward_dct_block(patch, t));
    }
}

}  // namespace
}  // namespace freqfuse
