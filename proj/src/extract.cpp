#include "freqfuse/extract.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <string>
#include <thread>

#include "freqfuse/error.hpp"

namespace freqfuse {

ExtractMode parse_extract_mode(std::string_view name) {
  if (name == "spatial") return ExtractMode::Spatial;
  if (name == "frequency") return ExtractMode::Frequency;
  throw Error(ErrorCode::BadConfig, "unknown mode '" + std::string(name) + "'");
}

ChannelSelection parse_channel_selection(std::string_view spec) {
  if (spec == "top24") return ChannelSelection::top24();
  if (spec == "all") return ChannelSelection::all();
  constexpr std::string_view prefix = "square:";
  if (spec.starts_with(prefix)) {
    const auto body = spec.substr(prefix.size());
    const auto comma = body.find(',');
    std::size_t a = 0, b = 0;
    if (comma != std::string_view::npos) {
      const auto first = body.substr(0, comma), second = body.substr(comma + 1);
      const auto ra = std::from_chars(first.data(), first.data() + first.size(), a);
      const auto rb = std::from_chars(second.data(), second.data() + second.size(), b);
      if (ra.ec == std::errc{} && ra.ptr == first.data() + first.size() && rb.ec == std::errc{} &&
          rb.ptr == second.data() + second.size() && a > 0 && b > 0) {
        return ChannelSelection::top_left(a, b);
      }
    }
  }
  throw Error(ErrorCode::BadConfig, "channel selection '" + std::string(spec) +
                                        "' is not top24, all or square:a,b");
}

FeatureVector extract_features(const RgbImage& img, const ExtractConfig& cfg) {
  if (cfg.mode == ExtractMode::Spatial) return pool_statistics(resize_square(img, cfg.image_size));
  DctConfig dct = cfg.dct;
  dct.s_image = cfg.image_size;
  return pool_statistics(dct_pipeline(img, dct));
}

FeatureDump extract_dataset(const DatasetManifest& manifest, const std::filesystem::path& root,
                            const ExtractConfig& cfg, unsigned threads) {
  if (cfg.mode == ExtractMode::Frequency) {
    DctConfig dct = cfg.dct;
    dct.s_image = cfg.image_size;
    dct.validate();
  } else if (cfg.image_size < 2 || cfg.image_size % 2 != 0) {
    throw Error(ErrorCode::OddTarget, "image size must be even and >= 2");
  }

  const auto& entries = manifest.entries();
  FeatureDump dump;
  dump.branch = cfg.mode == ExtractMode::Spatial ? Branch::Spatial : Branch::Frequency;
  dump.rows.resize(entries.size());

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(entries.size(), 1))));
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned worker) {
    try {
      for (std::size_t i = worker; i < entries.size(); i += threads) {
        const auto f = extract_features(load_image(root / entries[i].image_path), cfg);
        dump.rows[i] = {entries[i].image_path, entries[i].class_name, {f.values().begin(), f.values().end()}};
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  dump.dim = dump.rows.empty() ? (cfg.mode == ExtractMode::Spatial ? 6 : 2 * cfg.dct.selection.channel_count(cfg.dct.s_dct))
                               : dump.rows.front().values.size();
  return dump;
}

}  // namespace freqfuse
