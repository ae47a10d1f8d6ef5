#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "freqfuse/features.hpp"
#include "freqfuse/fewshot.hpp"

namespace freqfuse {

struct FeatureRow {
  std::string item_id;
  std::string class_name;
  std::vector<double> values;

  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

/// Labeled feature matrix persisted between runs.
struct FeatureDump {
  std::size_t dim = 0;
  Branch branch = Branch::Spatial;
  std::vector<FeatureRow> rows;

  /// Throws DimMismatch or DuplicateId.
  void validate() const;

  friend bool operator==(const FeatureDump&, const FeatureDump&) = default;
};

inline constexpr std::uint16_t kFsfdVersion = 1;

// FSFD v1, little-endian:
//   "FSFD" | u16 version | u8 branch | u32 dim | u64 rows
//   u32 class count, then per class: u32 byte length + UTF-8 name
//   per row: u32 class index | u16 id length | UTF-8 id | dim x f32
std::vector<std::uint8_t> encode_dump(const FeatureDump& dump);
FeatureDump decode_dump(std::span<const std::uint8_t> bytes);

/// Validates, then writes through a temporary file and rename.
void write_dump(const FeatureDump& dump, const std::filesystem::path& path);
FeatureDump read_dump(const std::filesystem::path& path);

/// Human-readable mirror: header `item_id,class,v0..v{dim-1}`. Values are
/// printed with enough digits to round-trip float32.
void write_dump_csv(const FeatureDump& dump, const std::filesystem::path& path);
FeatureDump read_dump_csv(const std::filesystem::path& path, Branch branch);

/// Per item, fuse(spatial row, frequency row). Output rows are sorted by
/// item_id so the result does not depend on input row order.
FeatureDump merge_dumps(const FeatureDump& spatial, const FeatureDump& frequency);

/// Rows for which `keep(class_name)` holds (all rows when `keep` is empty).
FeatureSet to_feature_set(const FeatureDump& dump,
                          const std::function<bool(const std::string&)>& keep = {});

}  // namespace freqfuse
