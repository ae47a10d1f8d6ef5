#include "freqfuse/featureio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "freqfuse/binary.hpp"
#include "freqfuse/error.hpp"

namespace freqfuse {

void FeatureDump::validate() const {
  std::unordered_set<std::string_view> ids;
  for (const auto& r : rows) {
    if (r.values.size() != dim) {
      throw Error(ErrorCode::DimMismatch, "row '" + r.item_id + "' has " + std::to_string(r.values.size()) +
                                              " values, dump dim is " + std::to_string(dim));
    }
    if (!ids.insert(r.item_id).second) throw Error(ErrorCode::DuplicateId, "item '" + r.item_id + "' repeated");
  }
}

std::vector<std::uint8_t> encode_dump(const FeatureDump& dump) {
  dump.validate();
  std::vector<std::string_view> classes;
  std::unordered_map<std::string_view, std::uint32_t> class_index;
  for (const auto& r : dump.rows) {
    if (class_index.emplace(r.class_name, static_cast<std::uint32_t>(classes.size())).second) {
      classes.push_back(r.class_name);
    }
  }

  ByteWriter w;
  w.bytes("FSFD");
  w.u16(kFsfdVersion);
  w.u8(static_cast<std::uint8_t>(dump.branch));
  w.u32(static_cast<std::uint32_t>(dump.dim));
  w.u64(dump.rows.size());
  w.u32(static_cast<std::uint32_t>(classes.size()));
  for (auto name : classes) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name);
  }
  for (const auto& r : dump.rows) {
    if (r.item_id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::IoFailure, "item id longer than 65535 bytes");
    }
    w.u32(class_index.at(r.class_name));
    w.u16(static_cast<std::uint16_t>(r.item_id.size()));
    w.bytes(r.item_id);
    for (double v : r.values) w.f32(static_cast<float>(v));
  }
  return w.buffer();
}

FeatureDump decode_dump(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.remaining() < 4 || r.bytes(4) != "FSFD") throw Error(ErrorCode::BadMagic, "not an FSFD file");
  const auto version = r.u16();
  if (version != kFsfdVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "FSFD version " + std::to_string(version));
  }
  FeatureDump dump;
  const auto branch = r.u8();
  if (branch > 2) throw Error(ErrorCode::CorruptFile, "branch code " + std::to_string(branch));
  dump.branch = static_cast<Branch>(branch);
  dump.dim = r.u32();
  const std::uint64_t row_count = r.u64();

  const std::uint32_t class_count = r.u32();
  std::vector<std::string> classes;
  for (std::uint32_t i = 0; i < class_count; ++i) classes.push_back(r.bytes(r.u32()));

  // Each row needs at least 6 + 4*dim bytes; reject impossible counts before
  // reserving memory for them.
  const std::uint64_t min_row = 6 + 4ULL * dump.dim;
  if (row_count > r.remaining() / min_row + 1) throw Error(ErrorCode::TruncatedFile, "row count exceeds file size");
  dump.rows.reserve(static_cast<std::size_t>(row_count));
  std::unordered_set<std::string> ids;
  for (std::uint64_t i = 0; i < row_count; ++i) {
    FeatureRow row;
    const auto cls = r.u32();
    if (cls >= classes.size()) throw Error(ErrorCode::CorruptFile, "class index " + std::to_string(cls));
    row.class_name = classes[cls];
    row.item_id = r.bytes(r.u16());
    row.values.resize(dump.dim);
    for (double& v : row.values) v = r.f32();
    if (!ids.insert(row.item_id).second) throw Error(ErrorCode::DuplicateId, "item '" + row.item_id + "' repeated");
    dump.rows.push_back(std::move(row));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::CorruptFile, "trailing bytes after last row");
  return dump;
}

void write_dump(const FeatureDump& dump, const std::filesystem::path& path) {
  write_file_atomically(path, encode_dump(dump));
}

FeatureDump read_dump(const std::filesystem::path& path) { return decode_dump(read_file(path)); }

void write_dump_csv(const FeatureDump& dump, const std::filesystem::path& path) {
  dump.validate();
  std::ostringstream out;
  out << "item_id,class";
  for (std::size_t j = 0; j < dump.dim; ++j) out << ",v" << j;
  out << '\n';
  out << std::setprecision(std::numeric_limits<float>::max_digits10);
  for (const auto& r : dump.rows) {
    out << r.item_id << ',' << r.class_name;
    for (double v : r.values) out << ',' << static_cast<float>(v);
    out << '\n';
  }
  const std::string text = out.str();
  write_file_atomically(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

FeatureDump read_dump_csv(const std::filesystem::path& path, Branch branch) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::TruncatedFile, path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  FeatureDump dump;
  dump.branch = branch;
  dump.dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) - 1;
  if (line.rfind("item_id,class", 0) != 0) throw Error(ErrorCode::BadMagic, path.string() + ": bad CSV header");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    FeatureRow row;
    std::getline(fields, row.item_id, ',');
    std::getline(fields, row.class_name, ',');
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      try {
        row.values.push_back(std::stof(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::CorruptFile, path.string() + ": bad value '" + cell + "'");
      }
    }
    dump.rows.push_back(std::move(row));
  }
  dump.validate();
  return dump;
}

FeatureDump merge_dumps(const FeatureDump& spatial, const FeatureDump& frequency) {
  if (spatial.branch != Branch::Spatial || frequency.branch != Branch::Frequency) {
    throw Error(ErrorCode::BranchMismatch, "merge expects (spatial, frequency) dumps");
  }
  spatial.validate();
  frequency.validate();
  std::unordered_map<std::string_view, const FeatureRow*> freq_rows;
  for (const auto& r : frequency.rows) freq_rows.emplace(r.item_id, &r);
  if (freq_rows.size() != spatial.rows.size()) {
    throw Error(ErrorCode::ItemMismatch, std::to_string(spatial.rows.size()) + " spatial vs " +
                                             std::to_string(frequency.rows.size()) + " frequency rows");
  }

  FeatureDump out;
  out.dim = spatial.dim + frequency.dim;
  out.branch = Branch::Fused;
  out.rows.reserve(spatial.rows.size());
  for (const auto& s : spatial.rows) {
    auto it = freq_rows.find(s.item_id);
    if (it == freq_rows.end()) throw Error(ErrorCode::ItemMismatch, "item '" + s.item_id + "' has no frequency row");
    const FeatureRow& f = *it->second;
    if (f.class_name != s.class_name) {
      throw Error(ErrorCode::LabelConflict, "item '" + s.item_id + "' is '" + s.class_name + "' vs '" +
                                                f.class_name + "'");
    }
    const auto fused = fuse(FeatureVector(s.values, Branch::Spatial), FeatureVector(f.values, Branch::Frequency));
    out.rows.push_back({s.item_id, s.class_name, {fused.values().begin(), fused.values().end()}});
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const FeatureRow& a, const FeatureRow& b) { return a.item_id < b.item_id; });
  return out;
}

FeatureSet to_feature_set(const FeatureDump& dump, const std::function<bool(const std::string&)>& keep) {
  FeatureSet set(dump.dim);
  for (const auto& r : dump.rows) {
    if (!keep || keep(r.class_name)) set.add(r.class_name, r.values);
  }
  return set;
}

}  // namespace freqfuse
