#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace freqfuse {

/// 8-bit interleaved RGB image, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(std::size_t width, std::size_t height, std::uint8_t fill = 0);
  RgbImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  std::uint8_t at(std::size_t x, std::size_t y, std::size_t channel) const {
    return pixels_[(y * width_ + x) * 3 + channel];
  }
  std::uint8_t& at(std::size_t x, std::size_t y, std::size_t channel) {
    return pixels_[(y * width_ + x) * 3 + channel];
  }

  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Decodes an 8-bit PNG (RGB or RGBA, alpha dropped) or a binary PPM (P6,
/// maxval 255). The format is chosen by file signature, not extension.
RgbImage load_image(const std::filesystem::path& path);

void write_ppm(const RgbImage& img, const std::filesystem::path& path);
void write_png(const RgbImage& img, const std::filesystem::path& path);

/// Bilinear resample with pixel-center alignment and clamped borders.
/// Same-size input is returned unchanged.
RgbImage resize_bilinear(const RgbImage& img, std::size_t width, std::size_t height);

/// Loads an image and resamples it to a `target`x`target` square.
/// `target` must be even and at least 2 so that 4:2:0 chroma is well defined.
RgbImage load_and_resize(const std::filesystem::path& path, std::size_t target);

/// Same contract as load_and_resize for an already decoded image.
RgbImage resize_square(const RgbImage& img, std::size_t target);

}  // namespace freqfuse
