#include "freqfuse/image.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "freqfuse/error.hpp"

namespace freqfuse {

RgbImage::RgbImage(std::size_t width, std::size_t height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(width * height * 3, fill) {}

RgbImage::RgbImage(std::size_t width, std::size_t height,
                   std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != width_ * height_ * 3) {
    throw Error(ErrorCode::SizeMismatch, "pixel buffer does not match " +
                                             std::to_string(width_) + "x" +
                                             std::to_string(height_));
  }
}

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::DecodeFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RgbImage decode_png(const std::vector<std::uint8_t>& bytes,
                    const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::DecodeFailure, path.string() + ": " + image.message);
  }
  // Alpha is dropped without compositing; the simplified API would otherwise
  // blend against a background.
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::DecodeFailure, path.string() + ": " + msg);
  }
  const std::size_t w = image.width, h = image.height;
  if (w == 0 || h == 0) throw Error(ErrorCode::DecodeFailure, path.string() + ": empty image");
  std::vector<std::uint8_t> rgb(w * h * 3);
  for (std::size_t i = 0; i < w * h; ++i) {
    rgb[i * 3 + 0] = rgba[i * 4 + 0];
    rgb[i * 3 + 1] = rgba[i * 4 + 1];
    rgb[i * 3 + 2] = rgba[i * 4 + 2];
  }
  return RgbImage(w, h, std::move(rgb));
}

// Reads one whitespace-delimited header token, skipping '#' comments.
bool next_token(const std::vector<std::uint8_t>& b, std::size_t& pos, std::string& out) {
  out.clear();
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') out.push_back(static_cast<char>(b[pos++]));
  return !out.empty();
}

RgbImage decode_ppm(const std::vector<std::uint8_t>& bytes,
                    const std::filesystem::path& path) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::DecodeFailure, path.string() + ": " + why);
  };
  std::size_t pos = 2;
  std::string tok;
  std::array<long, 3> fields{};
  for (auto& f : fields) {
    if (!next_token(bytes, pos, tok)) throw fail("truncated PPM header");
    try {
      f = std::stol(tok);
    } catch (const std::exception&) {
      throw fail("bad PPM header field '" + tok + "'");
    }
  }
  if (fields[0] <= 0 || fields[1] <= 0) throw fail("non-positive PPM dimensions");
  if (fields[2] != 255) throw fail("only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw fail("missing raster separator");
  ++pos;
  const auto w = static_cast<std::size_t>(fields[0]);
  const auto h = static_cast<std::size_t>(fields[1]);
  if (bytes.size() - pos < w * h * 3) throw fail("truncated PPM raster");
  std::vector<std::uint8_t> rgb(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                bytes.begin() + static_cast<std::ptrdiff_t>(pos + w * h * 3));
  return RgbImage(w, h, std::move(rgb));
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  static constexpr std::array<std::uint8_t, 8> kPngSig = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (bytes.size() >= 8 && std::equal(kPngSig.begin(), kPngSig.end(), bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    return decode_ppm(bytes, path);
  }
  throw Error(ErrorCode::DecodeFailure, path.string() + ": not a PNG or binary PPM file");
}

void write_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.pixels().size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

void write_png(const RgbImage& img, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + image.message);
  }
}

RgbImage resize_bilinear(const RgbImage& img, std::size_t width, std::size_t height) {
  if (img.empty() || width == 0 || height == 0) {
    throw Error(ErrorCode::SizeMismatch, "resize of or to an empty image");
  }
  if (img.width() == width && img.height() == height) return img;

  const double sx = static_cast<double>(img.width()) / static_cast<double>(width);
  const double sy = static_cast<double>(img.height()) / static_cast<double>(height);
  const auto max_x = static_cast<double>(img.width() - 1);
  const auto max_y = static_cast<double>(img.height() - 1);

  RgbImage out(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - static_cast<double>(x0);
      for (std::size_t c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0, c) * (1.0 - wx) + img.at(x1, y0, c) * wx;
        const double bot = img.at(x0, y1, c) * (1.0 - wx) + img.at(x1, y1, c) * wx;
        const double v = top * (1.0 - wy) + bot * wy;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

RgbImage resize_square(const RgbImage& img, std::size_t target) {
  if (target < 2 || target % 2 != 0) {
    throw Error(ErrorCode::OddTarget, "target size " + std::to_string(target) + " must be even and >= 2");
  }
  return resize_bilinear(img, target, target);
}

RgbImage load_and_resize(const std::filesystem::path& path, std::size_t target) {
  if (target < 2 || target % 2 != 0) {
    throw Error(ErrorCode::OddTarget, "target size " + std::to_string(target) + " must be even and >= 2");
  }
  return resize_square(load_image(path), target);
}

}  // namespace freqfuse
