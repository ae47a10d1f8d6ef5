#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace freqfuse {

enum class Split { Base, Val, Novel };

std::string_view to_string(Split split) noexcept;

struct ManifestEntry {
  std::string image_path;  // relative to the dataset root
  std::string class_name;
  Split split;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Dataset listing with class-disjoint base/val/novel splits. Construction
/// validates path uniqueness and split disjointness.
class DatasetManifest {
 public:
  DatasetManifest() = default;
  explicit DatasetManifest(std::vector<ManifestEntry> entries);

  const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Distinct class names of a split in first-appearance order.
  std::vector<std::string> classes(Split split) const;

  /// Split that owns a class, if the class appears at all.
  const Split* split_of(std::string_view class_name) const;

 private:
  std::vector<ManifestEntry> entries_;
  std::vector<std::pair<std::string, Split>> class_splits_;
};

/// Parses CSV text with header `path,class,split`. LF or CRLF line endings.
DatasetManifest parse_manifest(std::string_view csv);

DatasetManifest load_manifest(const std::filesystem::path& path);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace freqfuse
