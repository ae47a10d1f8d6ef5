#include "freqfuse/freqcube.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <utility>

#include "freqfuse/binary.hpp"
#include "freqfuse/colorspace.hpp"
#include "freqfuse/error.hpp"

namespace freqfuse {

std::string_view to_string(PlaneTag tag) noexcept {
  switch (tag) {
    case PlaneTag::Y: return "Y";
    case PlaneTag::Cb: return "Cb";
    case PlaneTag::Cr: return "Cr";
  }
  return "?";
}

std::size_t zigzag_index(std::size_t u, std::size_t v, std::size_t n) {
  if (n == 0 || u >= n || v >= n) {
    throw Error(ErrorCode::OutOfRange, "(" + std::to_string(u) + "," + std::to_string(v) +
                                           ") outside a " + std::to_string(n) + "x" +
                                           std::to_string(n) + " block");
  }
  const std::size_t diag = u + v;
  std::size_t before = 0;
  for (std::size_t d = 0; d < diag; ++d) before += d < n ? d + 1 : 2 * n - 1 - d;
  const std::size_t row_min = diag >= n ? diag - n + 1 : 0;
  const std::size_t row_max = std::min(diag, n - 1);
  // Odd diagonals run down-left (row increasing), even ones up-right.
  return before + (diag % 2 == 1 ? u - row_min : row_max - u);
}

FrequencyCube::FrequencyCube(std::size_t height, std::size_t width, std::size_t block_size,
                             std::vector<ChannelLabel> labels)
    : FrequencyCube(height, width, block_size, labels,
                    std::vector<double>(labels.size() * height * width, 0.0)) {}

FrequencyCube::FrequencyCube(std::size_t height, std::size_t width, std::size_t block_size,
                             std::vector<ChannelLabel> labels, std::vector<double> data)
    : height_(height), width_(width), block_size_(block_size),
      labels_(std::move(labels)), data_(std::move(data)) {
  if (data_.size() != labels_.size() * height_ * width_) {
    throw Error(ErrorCode::SizeMismatch, "cube data does not match C x H x W");
  }
  std::set<std::array<std::uint8_t, 3>> seen;
  for (const auto& l : labels_) {
    if (!seen.insert({static_cast<std::uint8_t>(l.plane), l.u, l.v}).second) {
      throw Error(ErrorCode::BadConfig, "duplicate channel label " + std::string(to_string(l.plane)) +
                                            "(" + std::to_string(l.u) + "," + std::to_string(l.v) + ")");
    }
  }
}

std::size_t ChannelSelection::channel_count(std::size_t n) const noexcept {
  if (rule == Rule::All) return 3 * n * n;
  return y_side * y_side + 2 * chroma_side * chroma_side;
}

void DctConfig::validate() const {
  if (s_dct < DctMatrix::kMinSize || s_dct > DctMatrix::kMaxSize) {
    throw Error(ErrorCode::BadBlockSize, "filter size " + std::to_string(s_dct) + " outside [2, 64]");
  }
  if (s_image == 0 || s_image % s_dct != 0) {
    throw Error(ErrorCode::BadConfig, "image size " + std::to_string(s_image) +
                                          " is not a multiple of filter size " + std::to_string(s_dct));
  }
  if ((s_image / s_dct) % 2 != 0) {
    throw Error(ErrorCode::BadConfig, "image size / filter size must be even for 4:2:0 chroma");
  }
  if (selection.rule == ChannelSelection::Rule::TopLeftSquare) {
    if (selection.y_side == 0 || selection.chroma_side == 0) {
      throw Error(ErrorCode::BadConfig, "selection sides must be positive");
    }
    if (selection.y_side > s_dct || selection.chroma_side > s_dct) {
      throw Error(ErrorCode::SelectionTooLarge, "selection exceeds filter size " + std::to_string(s_dct));
    }
  }
}

FrequencyCube regroup_to_cube(const BlockGrid& grid, PlaneTag plane) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "no coefficient blocks");
  const std::size_t n = grid.block_size();
  std::vector<std::pair<std::size_t, std::size_t>> order(n * n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) order[zigzag_index(u, v, n)] = {u, v};
  }
  std::vector<ChannelLabel> labels;
  labels.reserve(n * n);
  for (const auto& [u, v] : order) {
    labels.push_back({plane, static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(v)});
  }
  FrequencyCube cube(grid.rows(), grid.cols(), n, std::move(labels));
  for (std::size_t ch = 0; ch < order.size(); ++ch) {
    const auto [u, v] = order[ch];
    for (std::size_t r = 0; r < grid.rows(); ++r) {
      for (std::size_t c = 0; c < grid.cols(); ++c) {
        const Block& b = grid.at(r, c);
        if (b.size() != n) throw Error(ErrorCode::SizeMismatch, "non-uniform block size in grid");
        cube(ch, r, c) = b(u, v);
      }
    }
  }
  return cube;
}

FrequencyCube select_channels(const FrequencyCube& cube, const ChannelSelection& selection) {
  if (selection.rule == ChannelSelection::Rule::All) return cube;
  const std::size_t n = cube.block_size();
  if (n != 0 && (selection.y_side > n || selection.chroma_side > n)) {
    throw Error(ErrorCode::SelectionTooLarge, "selection sides " + std::to_string(selection.y_side) +
                                                  "/" + std::to_string(selection.chroma_side) +
                                                  " exceed block size " + std::to_string(n));
  }
  std::vector<ChannelLabel> labels;
  std::vector<std::size_t> kept;
  for (std::size_t ch = 0; ch < cube.channels(); ++ch) {
    const auto& l = cube.labels()[ch];
    const std::size_t side = l.plane == PlaneTag::Y ? selection.y_side : selection.chroma_side;
    if (l.u < side && l.v < side) {
      labels.push_back(l);
      kept.push_back(ch);
    }
  }
  std::vector<double> data;
  data.reserve(kept.size() * cube.height() * cube.width());
  for (std::size_t ch : kept) {
    const auto src = cube.channel(ch);
    data.insert(data.end(), src.begin(), src.end());
  }
  return FrequencyCube(cube.height(), cube.width(), n, std::move(labels), std::move(data));
}

namespace {

void upsample_channel_2x(std::span<const double> src, std::size_t h, std::size_t w,
                         ChromaUpsampling method, std::vector<double>& out) {
  const std::size_t oh = 2 * h, ow = 2 * w;
  auto at = [&](std::size_t r, std::size_t c) { return src[r * w + c]; };
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      if (method == ChromaUpsampling::Nearest) {
        out.push_back(at(r / 2, c / 2));
        continue;
      }
      const double fy = std::clamp((static_cast<double>(r) + 0.5) / 2.0 - 0.5, 0.0, static_cast<double>(h - 1));
      const double fx = std::clamp((static_cast<double>(c) + 0.5) / 2.0 - 0.5, 0.0, static_cast<double>(w - 1));
      const auto r0 = static_cast<std::size_t>(fy);
      const auto c0 = static_cast<std::size_t>(fx);
      const std::size_t r1 = std::min(r0 + 1, h - 1);
      const std::size_t c1 = std::min(c0 + 1, w - 1);
      const double wy = fy - static_cast<double>(r0);
      const double wx = fx - static_cast<double>(c0);
      const double top = at(r0, c0) + (at(r0, c1) - at(r0, c0)) * wx;
      const double bot = at(r1, c0) + (at(r1, c1) - at(r1, c0)) * wx;
      out.push_back(top + (bot - top) * wy);
    }
  }
}

void expect_plane(const FrequencyCube& cube, PlaneTag tag) {
  for (const auto& l : cube.labels()) {
    if (l.plane != tag) {
      throw Error(ErrorCode::BadConfig, "expected only " + std::string(to_string(tag)) +
                                            " channels, found " + std::string(to_string(l.plane)));
    }
  }
}

}  // namespace

FrequencyCube upsample_and_merge(const FrequencyCube& y, const FrequencyCube& cb,
                                 const FrequencyCube& cr, ChromaUpsampling method) {
  for (const FrequencyCube* c : {&cb, &cr}) {
    if (c->height() * 2 != y.height() || c->width() * 2 != y.width()) {
      throw Error(ErrorCode::SizeMismatch,
                  "chroma " + std::to_string(c->height()) + "x" + std::to_string(c->width()) +
                      " is not half of luma " + std::to_string(y.height()) + "x" + std::to_string(y.width()));
    }
  }
  expect_plane(y, PlaneTag::Y);
  expect_plane(cb, PlaneTag::Cb);
  expect_plane(cr, PlaneTag::Cr);

  std::vector<ChannelLabel> labels = y.labels();
  labels.insert(labels.end(), cb.labels().begin(), cb.labels().end());
  labels.insert(labels.end(), cr.labels().begin(), cr.labels().end());

  std::vector<double> data(y.data().begin(), y.data().end());
  data.reserve(labels.size() * y.height() * y.width());
  for (const FrequencyCube* c : {&cb, &cr}) {
    for (std::size_t ch = 0; ch < c->channels(); ++ch) {
      upsample_channel_2x(c->channel(ch), c->height(), c->width(), method, data);
    }
  }
  return FrequencyCube(y.height(), y.width(), y.block_size(), std::move(labels), std::move(data));
}

FrequencyCube dct_pipeline(const RgbImage& img, const DctConfig& cfg) {
  cfg.validate();
  const RgbImage resized = resize_square(img, cfg.s_image);
  const YCbCrPlanes planes = subsample_420(rgb_to_ycbcr(resized));
  const DctMatrix t(cfg.s_dct);
  auto plane_cube = [&](const Plane& p, PlaneTag tag) {
    return select_channels(regroup_to_cube(blockwise_dct(p, t), tag), cfg.selection);
  };
  return upsample_and_merge(plane_cube(planes.y, PlaneTag::Y), plane_cube(planes.cb, PlaneTag::Cb),
                            plane_cube(planes.cr, PlaneTag::Cr), cfg.upsampling);
}

void write_cube(const FrequencyCube& cube, const std::filesystem::path& path) {
  ByteWriter w;
  w.bytes("FQC1");
  w.u32(static_cast<std::uint32_t>(cube.channels()));
  w.u32(static_cast<std::uint32_t>(cube.height()));
  w.u32(static_cast<std::uint32_t>(cube.width()));
  for (double v : cube.data()) w.f32(static_cast<float>(v));
  for (const auto& l : cube.labels()) {
    w.u8(static_cast<std::uint8_t>(l.plane));
    w.u8(l.u);
    w.u8(l.v);
  }
  write_file_atomically(path, w.buffer());
}

FrequencyCube read_cube(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  ByteReader r(bytes);
  if (r.remaining() < 4 || r.bytes(4) != "FQC1") throw Error(ErrorCode::BadMagic, path.string() + " is not an FQC1 cube");
  const std::size_t c = r.u32(), h = r.u32(), w = r.u32();
  if (r.remaining() < c * h * w * 4 + c * 3) throw Error(ErrorCode::TruncatedFile, path.string());
  std::vector<double> data(c * h * w);
  for (auto& v : data) v = r.f32();
  std::vector<ChannelLabel> labels(c);
  for (auto& l : labels) {
    const auto plane = r.u8();
    if (plane > 2) throw Error(ErrorCode::BadConfig, "bad plane code " + std::to_string(plane));
    l.plane = static_cast<PlaneTag>(plane);
    l.u = r.u8();
    l.v = r.u8();
  }
  return FrequencyCube(h, w, 0, std::move(labels), std::move(data));
}

}  // namespace freqfuse
