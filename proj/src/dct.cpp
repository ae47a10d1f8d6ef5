#include "freqfuse/dct.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "freqfuse/error.hpp"

namespace freqfuse {

DctMatrix::DctMatrix(std::size_t n) : n_(n) {
  if (n < kMinSize || n > kMaxSize) {
    throw Error(ErrorCode::BadBlockSize, "block size " + std::to_string(n) + " outside [2, 64]");
  }
  t_.resize(n * n);
  const double dn = static_cast<double>(n);
  const double dc = 1.0 / std::sqrt(dn);
  const double ac = std::sqrt(2.0 / dn);
  for (std::size_t j = 0; j < n; ++j) t_[j] = dc;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      t_[i * n + j] = ac * std::cos(static_cast<double>((2 * j + 1) * i) * std::numbers::pi / (2.0 * dn));
    }
  }
}

Block::Block(std::size_t n, std::vector<double> values) : n_(n), v_(std::move(values)) {
  if (v_.size() != n_ * n_) {
    throw Error(ErrorCode::SizeMismatch, "block of side " + std::to_string(n_) + " needs " +
                                             std::to_string(n_ * n_) + " values");
  }
}

namespace {

void check_size(const Block& b, const DctMatrix& t) {
  if (b.size() != t.size()) {
    throw Error(ErrorCode::SizeMismatch, "block side " + std::to_string(b.size()) +
                                             " vs transform size " + std::to_string(t.size()));
  }
}

}  // namespace

Block forward_dct_block(const Block& samples, const DctMatrix& t) {
  check_size(samples, t);
  const std::size_t n = t.size();
  // tmp = (M - 128) T'
  Block tmp(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += (samples(r, k) - 128.0) * t(v, k);
      tmp(r, v) = acc;
    }
  }
  Block out(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += t(u, k) * tmp(k, v);
      out(u, v) = acc;
    }
  }
  return out;
}

Block inverse_dct_block(const Block& coeffs, const DctMatrix& t) {
  check_size(coeffs, t);
  const std::size_t n = t.size();
  // tmp = D T
  Block tmp(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += coeffs(u, k) * t(k, c);
      tmp(u, c) = acc;
    }
  }
  Block out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += t(k, r) * tmp(k, c);
      out(r, c) = acc + 128.0;
    }
  }
  return out;
}

BlockGrid blockwise_dct(const Plane& plane, const DctMatrix& t) {
  const std::size_t n = t.size();
  if (plane.width() % n != 0 || plane.height() % n != 0) {
    throw Error(ErrorCode::NotDivisible, "plane " + std::to_string(plane.width()) + "x" +
                                             std::to_string(plane.height()) +
                                             " is not a multiple of block size " + std::to_string(n));
  }
  BlockGrid grid(plane.height() / n, plane.width() / n, n);
  Block patch(n);
  for (std::size_t br = 0; br < grid.rows(); ++br) {
    for (std::size_t bc = 0; bc < grid.cols(); ++bc) {
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) patch(r, c) = plane(bc * n + c, br * n + r);
      }
      grid.at(br, bc) = forward_dct_block(patch, t);
    }
  }
  return grid;
}

}  // namespace freqfuse
