#include "freqfuse/colorspace.hpp"

#include <algorithm>
#include <string>

#include "freqfuse/error.hpp"

namespace freqfuse {

YCbCr rgb_to_ycbcr(double r, double g, double b) noexcept {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  const double cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
  const double cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
  return {std::clamp(y, 0.0, 255.0), std::clamp(cb, 0.0, 255.0), std::clamp(cr, 0.0, 255.0)};
}

YCbCrPlanes rgb_to_ycbcr(const RgbImage& img) {
  YCbCrPlanes out{Plane(img.width(), img.height()), Plane(img.width(), img.height()),
                  Plane(img.width(), img.height())};
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const auto p = rgb_to_ycbcr(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      out.y(x, y) = p.y;
      out.cb(x, y) = p.cb;
      out.cr(x, y) = p.cr;
    }
  }
  return out;
}

Plane box_downsample_2x(const Plane& plane) {
  if (plane.width() % 2 != 0 || plane.height() % 2 != 0) {
    throw Error(ErrorCode::OddDimension, "plane " + std::to_string(plane.width()) + "x" +
                                             std::to_string(plane.height()) +
                                             " cannot be 2x2 subsampled");
  }
  Plane out(plane.width() / 2, plane.height() / 2);
  for (std::size_t y = 0; y < out.height(); ++y) {
    for (std::size_t x = 0; x < out.width(); ++x) {
      out(x, y) = 0.25 * (plane(2 * x, 2 * y) + plane(2 * x + 1, 2 * y) +
                          plane(2 * x, 2 * y + 1) + plane(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

YCbCrPlanes subsample_420(const YCbCrPlanes& full) {
  if (full.y.width() % 2 != 0 || full.y.height() % 2 != 0) {
    throw Error(ErrorCode::OddDimension, "luma plane sides must be even");
  }
  return {full.y, box_downsample_2x(full.cb), box_downsample_2x(full.cr)};
}

}  // namespace freqfuse
