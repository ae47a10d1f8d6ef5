#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace freqfuse {

/// Row-major real-valued sample plane.
class Plane {
 public:
  Plane() = default;
  Plane(std::size_t width, std::size_t height, double fill = 0.0)
      : width_(width), height_(height), data_(width * height, fill) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }

  double operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  double& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

}  // namespace freqfuse
