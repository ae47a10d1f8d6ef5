#pragma once

#include <filesystem>
#include <string_view>

#include "freqfuse/featureio.hpp"
#include "freqfuse/features.hpp"
#include "freqfuse/freqcube.hpp"
#include "freqfuse/manifest.hpp"

namespace freqfuse {

enum class ExtractMode { Spatial, Frequency };

ExtractMode parse_extract_mode(std::string_view name);

/// `top24`, `all` or `square:a,b`. `top24` is exactly `square:4,2`.
ChannelSelection parse_channel_selection(std::string_view spec);

struct ExtractConfig {
  ExtractMode mode = ExtractMode::Frequency;
  /// Working image side. For the frequency branch this is also dct.s_image.
  std::size_t image_size = 448;
  DctConfig dct;
};

/// Pooled statistics of the resized RGB image (spatial) or of its frequency
/// cube (frequency).
FeatureVector extract_features(const RgbImage& img, const ExtractConfig& cfg);

/// Runs extract_features over every manifest entry, images resolved against
/// `root`. Rows keep manifest order; item_id is the manifest path.
FeatureDump extract_dataset(const DatasetManifest& manifest, const std::filesystem::path& root,
                            const ExtractConfig& cfg, unsigned threads = 1);

}  // namespace freqfuse
