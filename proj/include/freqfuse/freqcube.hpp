#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "freqfuse/dct.hpp"
#include "freqfuse/image.hpp"

namespace freqfuse {

enum class PlaneTag : std::uint8_t { Y = 0, Cb = 1, Cr = 2 };

std::string_view to_string(PlaneTag tag) noexcept;

struct ChannelLabel {
  PlaneTag plane;
  std::uint8_t u;  // vertical frequency (block row)
  std::uint8_t v;  // horizontal frequency (block column)

  friend bool operator==(const ChannelLabel&, const ChannelLabel&) = default;
};

/// Zigzag ordinal of coefficient (u, v) in an n x n block: 0 at DC, n*n-1 at
/// the highest frequency, walking anti-diagonals in alternating direction.
std::size_t zigzag_index(std::size_t u, std::size_t v, std::size_t n);

/// Stack of same-frequency sub-channels, stored channel-major (C x H x W).
class FrequencyCube {
 public:
  FrequencyCube() = default;
  FrequencyCube(std::size_t height, std::size_t width, std::size_t block_size,
                std::vector<ChannelLabel> labels);
  FrequencyCube(std::size_t height, std::size_t width, std::size_t block_size,
                std::vector<ChannelLabel> labels, std::vector<double> data);

  std::size_t channels() const noexcept { return labels_.size(); }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  /// DCT block size the coefficients came from.
  std::size_t block_size() const noexcept { return block_size_; }

  const std::vector<ChannelLabel>& labels() const noexcept { return labels_; }

  double operator()(std::size_t ch, std::size_t row, std::size_t col) const {
    return data_[(ch * height_ + row) * width_ + col];
  }
  double& operator()(std::size_t ch, std::size_t row, std::size_t col) {
    return data_[(ch * height_ + row) * width_ + col];
  }

  std::span<const double> channel(std::size_t ch) const {
    return std::span<const double>(data_).subspan(ch * height_ * width_, height_ * width_);
  }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const FrequencyCube&, const FrequencyCube&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t block_size_ = 0;
  std::vector<ChannelLabel> labels_;
  std::vector<double> data_;
};

/// Static selection: keep u < side and v < side per plane, or everything.
struct ChannelSelection {
  enum class Rule { TopLeftSquare, All };

  Rule rule = Rule::TopLeftSquare;
  std::size_t y_side = 4;
  std::size_t chroma_side = 2;

  static ChannelSelection all() { return {Rule::All, 0, 0}; }
  static ChannelSelection top_left(std::size_t y_side, std::size_t chroma_side) {
    return {Rule::TopLeftSquare, y_side, chroma_side};
  }
  /// Y 4x4 plus Cb/Cr 2x2: 24 channels.
  static ChannelSelection top24() { return top_left(4, 2); }

  /// Channels kept for a block size of n.
  std::size_t channel_count(std::size_t n) const noexcept;

  friend bool operator==(const ChannelSelection&, const ChannelSelection&) = default;
};

enum class ChromaUpsampling { Bilinear, Nearest };

struct DctConfig {
  std::size_t s_image = 448;
  std::size_t s_dct = 8;
  ChannelSelection selection = ChannelSelection::top24();
  ChromaUpsampling upsampling = ChromaUpsampling::Bilinear;

  /// Throws BadConfig / BadBlockSize / SelectionTooLarge.
  void validate() const;
  std::size_t grid_side() const noexcept { return s_image / s_dct; }
};

/// Channel (u, v) at (r, c) is grid block (r, c) entry (u, v); channels are
/// ordered by zigzag index.
FrequencyCube regroup_to_cube(const BlockGrid& grid, PlaneTag plane);

FrequencyCube select_channels(const FrequencyCube& cube, const ChannelSelection& selection);

/// Upsamples chroma channels x2 and stacks Y, then Cb, then Cr.
FrequencyCube upsample_and_merge(const FrequencyCube& y, const FrequencyCube& cb,
                                 const FrequencyCube& cr,
                                 ChromaUpsampling method = ChromaUpsampling::Bilinear);

/// Resize, YCbCr 4:2:0, blockwise DCT, regroup, select and merge.
FrequencyCube dct_pipeline(const RgbImage& img, const DctConfig& cfg);

// Debug dump: "FQC1", u32 C, u32 H, u32 W, C*H*W float32 channel-major,
// then C x (u8 plane, u8 u, u8 v). Little-endian.
void write_cube(const FrequencyCube& cube, const std::filesystem::path& path);

/// Values come back at float32 precision. The block size is not stored and is
/// reported as 0.
FrequencyCube read_cube(const std::filesystem::path& path);

}  // namespace freqfuse
