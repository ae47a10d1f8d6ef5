#pragma once

#include "freqfuse/image.hpp"
#include "freqfuse/plane.hpp"

namespace freqfuse {

/// Luma/chroma planes. After 4:2:0 subsampling the chroma planes are half
/// the luma size on each axis; before it all three share the image size.
struct YCbCrPlanes {
  Plane y;
  Plane cb;
  Plane cr;
};

struct YCbCr {
  double y, cb, cr;
};

/// JFIF full-range BT.601 transform of one pixel, clamped to [0,255].
YCbCr rgb_to_ycbcr(double r, double g, double b) noexcept;

/// Full-resolution Y, Cb and Cr planes. Samples stay real-valued.
YCbCrPlanes rgb_to_ycbcr(const RgbImage& img);

/// 2x2 box-filter chroma decimation. Luma passes through untouched.
YCbCrPlanes subsample_420(const YCbCrPlanes& full);

/// Mean of each 2x2 block; both sides must be even.
Plane box_downsample_2x(const Plane& plane);

}  // namespace freqfuse
