#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "freqfuse/plane.hpp"

namespace freqfuse {

/// Orthonormal DCT-II basis of size n: row 0 is 1/sqrt(n), row i > 0 is
/// sqrt(2/n) * cos((2j+1) i pi / 2n). Immutable once built.
class DctMatrix {
 public:
  static constexpr std::size_t kMinSize = 2;
  static constexpr std::size_t kMaxSize = 64;

  explicit DctMatrix(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return t_[i * n_ + j]; }
  std::span<const double> data() const noexcept { return t_; }

 private:
  std::size_t n_;
  std::vector<double> t_;
};

/// Square n x n block, row-major. Used both for samples and coefficients;
/// for coefficients entry (u, v) is row u, column v and (0, 0) is DC.
class Block {
 public:
  Block() = default;
  explicit Block(std::size_t n, double fill = 0.0) : n_(n), v_(n * n, fill) {}
  Block(std::size_t n, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t r, std::size_t c) const { return v_[r * n_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return v_[r * n_ + c]; }
  std::span<const double> values() const noexcept { return v_; }

  friend bool operator==(const Block&, const Block&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> v_;
};

/// D = T (M - 128) T'.
Block forward_dct_block(const Block& samples, const DctMatrix& t);

/// M = T' D T + 128.
Block inverse_dct_block(const Block& coeffs, const DctMatrix& t);

/// Coefficient blocks of a plane, row-major over block positions.
class BlockGrid {
 public:
  BlockGrid() = default;
  BlockGrid(std::size_t rows, std::size_t cols, std::size_t n)
      : rows_(rows), cols_(cols), n_(n), blocks_(rows * cols, Block(n)) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t block_size() const noexcept { return n_; }
  bool empty() const noexcept { return blocks_.empty(); }

  const Block& at(std::size_t r, std::size_t c) const { return blocks_[r * cols_ + c]; }
  Block& at(std::size_t r, std::size_t c) { return blocks_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t n_ = 0;
  std::vector<Block> blocks_;
};

/// Non-overlapping n x n transform aligned at (0, 0). Both plane sides must
/// be multiples of n; nothing is padded.
BlockGrid blockwise_dct(const Plane& plane, const DctMatrix& t);

}  // namespace freqfuse
