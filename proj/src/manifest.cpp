#include "freqfuse/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "freqfuse/error.hpp"

namespace freqfuse {

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Base: return "base";
    case Split::Val: return "val";
    case Split::Novel: return "novel";
  }
  return "unknown";
}

DatasetManifest::DatasetManifest(std::vector<ManifestEntry> entries)
    : entries_(std::move(entries)) {
  std::unordered_set<std::string> paths;
  std::unordered_map<std::string, Split> owner;
  for (const auto& e : entries_) {
    if (!paths.insert(e.image_path).second) {
      throw Error(ErrorCode::DuplicatePath, "'" + e.image_path + "' listed twice");
    }
    auto [it, inserted] = owner.emplace(e.class_name, e.split);
    if (inserted) {
      class_splits_.emplace_back(e.class_name, e.split);
    } else if (it->second != e.split) {
      throw Error(ErrorCode::SplitOverlap,
                  "class '" + e.class_name + "' appears in both " +
                      std::string(to_string(it->second)) + " and " +
                      std::string(to_string(e.split)));
    }
  }
}

std::vector<std::string> DatasetManifest::classes(Split split) const {
  std::vector<std::string> out;
  for (const auto& [name, s] : class_splits_) {
    if (s == split) out.push_back(name);
  }
  return out;
}

const Split* DatasetManifest::split_of(std::string_view class_name) const {
  for (const auto& [name, s] : class_splits_) {
    if (name == class_name) return &s;
  }
  return nullptr;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin(), e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return {b, e};
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Split parse_split(const std::string& raw, std::size_t line_no) {
  std::string s = raw;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "base") return Split::Base;
  if (s == "val") return Split::Val;
  if (s == "novel") return Split::Novel;
  throw Error(ErrorCode::UnknownSplit,
              "line " + std::to_string(line_no) + ": split '" + raw + "'");
}

}  // namespace

DatasetManifest parse_manifest(std::string_view csv) {
  std::vector<ManifestEntry> entries;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    auto nl = csv.find('\n', pos);
    if (nl == std::string_view::npos) nl = csv.size();
    std::string_view line = csv.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    const auto fields = split_fields(line);
    if (!saw_header) {
      if (fields != std::vector<std::string>{"path", "class", "split"}) {
        throw Error(ErrorCode::MalformedRow, "expected header 'path,class,split'");
      }
      saw_header = true;
      continue;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": expected 3 non-empty columns");
    }
    entries.push_back({fields[0], fields[1], parse_split(fields[2], line_no)});
  }
  if (!saw_header) throw Error(ErrorCode::MalformedRow, "missing header 'path,class,split'");
  return DatasetManifest(std::move(entries));
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open manifest " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_manifest(text);
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << "path,class,split\n";
  for (const auto& e : manifest.entries()) {
    out << e.image_path << ',' << e.class_name << ',' << to_string(e.split) << '\n';
  }
}

}  // namespace freqfuse
