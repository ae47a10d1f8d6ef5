#include "freqfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "freqfuse/error.hpp"

namespace freqfuse {

SynthPreset parse_synth_preset(std::string_view name) {
  if (name == "gratings") return SynthPreset::Gratings;
  if (name == "colors") return SynthPreset::Colors;
  if (name == "mixed") return SynthPreset::Mixed;
  throw Error(ErrorCode::BadConfig, "unknown preset '" + std::string(name) + "'");
}

std::string_view to_string(SynthPreset preset) noexcept {
  switch (preset) {
    case SynthPreset::Gratings: return "gratings";
    case SynthPreset::Colors: return "colors";
    case SynthPreset::Mixed: return "mixed";
  }
  return "unknown";
}

namespace {

constexpr double kMinCycles = 4.0;   // cycles per image width
constexpr double kMaxCycles = 26.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    // Box-Muller; std::normal_distribution is not reproducible across libraries.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 eng_;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

struct Grating {
  double cycles, angle, phase, amplitude;
  double at(double x, double y, double size) const {
    const double t = (x * std::cos(angle) + y * std::sin(angle)) / size;
    return amplitude * std::sin(kTwoPi * cycles * t + phase);
  }
};

double class_cycles(std::size_t index, std::size_t count) {
  if (count <= 1) return std::sqrt(kMinCycles * kMaxCycles);
  const double t = static_cast<double>(index) / static_cast<double>(count - 1);
  return kMinCycles * std::pow(kMaxCycles / kMinCycles, t);
}

RgbImage grating_image(double cycles, std::size_t size, Rng& rng) {
  const Grating g{cycles, rng.uniform(-0.15, 0.15), rng.uniform(0.0, kTwoPi), 60.0 * rng.uniform(0.9, 1.1)};
  const double mean = 128.0 + rng.uniform(-6.0, 6.0);
  const double s = static_cast<double>(size);
  RgbImage img(size, size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const auto v = to_byte(mean + g.at(static_cast<double>(x), static_cast<double>(y), s) + 4.0 * rng.normal());
      for (std::size_t c = 0; c < 3; ++c) img.at(x, y, c) = v;
    }
  }
  return img;
}

RgbImage color_image(std::size_t index, std::size_t count, std::size_t size, Rng& rng) {
  const double hue = kTwoPi * static_cast<double>(index) / static_cast<double>(std::max<std::size_t>(count, 1));
  double base[3];
  for (int c = 0; c < 3; ++c) base[c] = 128.0 + 25.0 * std::cos(hue - kTwoPi * c / 3.0) + rng.uniform(-6.0, 6.0);
  const double log_cycles = rng.uniform(std::log(kMinCycles), std::log(kMaxCycles));
  const Grating texture{std::exp(log_cycles), rng.uniform(0.0, std::numbers::pi), rng.uniform(0.0, kTwoPi), rng.uniform(10.0, 50.0)};
  const double s = static_cast<double>(size);
  RgbImage img(size, size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double t = texture.at(static_cast<double>(x), static_cast<double>(y), s);
      for (std::size_t c = 0; c < 3; ++c) img.at(x, y, c) = to_byte(base[c] + t + 4.0 * rng.normal());
    }
  }
  return img;
}

std::size_t grating_class_count(const SynthConfig& cfg) {
  switch (cfg.preset) {
    case SynthPreset::Gratings: return cfg.classes;
    case SynthPreset::Colors: return 0;
    case SynthPreset::Mixed: return (cfg.classes + 1) / 2;
  }
  return 0;
}

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%02zu", prefix, i);
  return buf;
}

}  // namespace

std::vector<std::string> synthetic_class_names(const SynthConfig& cfg) {
  const std::size_t gratings = grating_class_count(cfg);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cfg.classes; ++i) {
    names.push_back(i < gratings ? numbered("grating", i) : numbered("color", i - gratings));
  }
  return names;
}

std::vector<SynthSample> generate_synthetic(const SynthConfig& cfg) {
  if (cfg.classes < 1 || cfg.per_class < 1) throw Error(ErrorCode::BadConfig, "classes and per-class must be >= 1");
  if (cfg.size < 8) throw Error(ErrorCode::BadConfig, "image size must be >= 8");
  const std::size_t gratings = grating_class_count(cfg);
  const std::size_t colors = cfg.classes - gratings;
  const auto names = synthetic_class_names(cfg);

  std::vector<SynthSample> out;
  out.reserve(cfg.classes * cfg.per_class);
  for (std::size_t cls = 0; cls < cfg.classes; ++cls) {
    for (std::size_t i = 0; i < cfg.per_class; ++i) {
      Rng rng(mix(mix(cfg.seed) ^ mix(cls * 0x10000 + i)));
      char file[32];
      std::snprintf(file, sizeof file, "/%04zu.ppm", i);
      SynthSample s{names[cls] + file, names[cls], {}};
      s.image = cls < gratings ? grating_image(class_cycles(cls, gratings), cfg.size, rng)
                               : color_image(cls - gratings, colors, cfg.size, rng);
      out.push_back(std::move(s));
    }
  }
  return out;
}

DatasetManifest write_synthetic_dataset(const std::vector<SynthSample>& samples, const std::filesystem::path& dir) {
  std::vector<ManifestEntry> entries;
  for (const auto& s : samples) {
    const auto path = dir / s.item_id;
    std::filesystem::create_directories(path.parent_path());
    write_ppm(s.image, path);
    entries.push_back({s.item_id, s.class_name, Split::Novel});
  }
  DatasetManifest manifest(std::move(entries));
  write_manifest(manifest, dir / "manifest.csv");
  return manifest;
}

}  // namespace freqfuse
