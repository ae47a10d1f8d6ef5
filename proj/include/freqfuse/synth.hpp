#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "freqfuse/image.hpp"
#include "freqfuse/manifest.hpp"

namespace freqfuse {

/// Synthetic class families:
///  - gratings: gray sinusoidal gratings; classes differ only in spatial
///    frequency (phase, orientation jitter, contrast and noise are shared).
///  - colors: flat colors under a luminance texture of random frequency and
///    contrast; classes differ only in mean hue.
///  - mixed: first half gratings, remainder colors.
enum class SynthPreset { Gratings, Colors, Mixed };

SynthPreset parse_synth_preset(std::string_view name);
std::string_view to_string(SynthPreset preset) noexcept;

struct SynthConfig {
  SynthPreset preset = SynthPreset::Mixed;
  std::size_t classes = 10;
  std::size_t per_class = 100;
  std::size_t size = 112;
  std::uint64_t seed = 0;
};

struct SynthSample {
  std::string item_id;  // relative image path, e.g. "grating_00/0007.ppm"
  std::string class_name;
  RgbImage image;
};

std::vector<SynthSample> generate_synthetic(const SynthConfig& cfg);

/// Class names in generation order; grating classes start with "grating_".
std::vector<std::string> synthetic_class_names(const SynthConfig& cfg);

/// Writes every sample as binary PPM under `dir` plus `dir/manifest.csv`.
/// All classes go to the novel split. Returns the manifest.
DatasetManifest write_synthetic_dataset(const std::vector<SynthSample>& samples,
                                        const std::filesystem::path& dir);

}  // namespace freqfuse
