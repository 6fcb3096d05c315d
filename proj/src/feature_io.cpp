#include "partcrop/feature_io.hpp"

#include <fstream>

#include "partcrop/binary_io.hpp"

namespace partcrop {

void write_feature_file(std::ostream& out, const FeatureSet& set) {
  binary::put_magic(out, "PCF1");
  binary::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.kind));
  binary::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.records.size()));
  binary::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.length));
  for (const auto& r : set.records) {
    if (r.values.size() != set.length) throw InvalidInput("feature record length differs from set length");
    binary::put_le<std::uint64_t>(out, r.source_id);
    binary::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(r.label));
    for (double v : r.values) binary::put_f32(out, v);
  }
}

void write_feature_file(const std::filesystem::path& path, const FeatureSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_feature_file(out, set);
}

FeatureSet read_feature_file(std::istream& in) {
  binary::expect_magic(in, "PCF1");
  FeatureSet set;
  const auto kind = binary::get_le<std::uint32_t>(in);
  if (kind > 3) throw FormatError("unknown feature kind tag " + std::to_string(kind));
  set.kind = static_cast<FeatureKind>(kind);
  const auto count = binary::get_le<std::uint32_t>(in);
  set.length = binary::get_le<std::uint32_t>(in);
  set.records.resize(count);
  for (auto& r : set.records) {
    r.kind = set.kind;
    r.source_id = binary::get_le<std::uint64_t>(in);
    const auto label = binary::get_le<std::uint8_t>(in);
    if (label > 2) throw FormatError("unknown label tag " + std::to_string(label));
    r.label = static_cast<Membership>(label);
    r.values.resize(set.length);
    for (double& v : r.values) v = binary::get_f32(in);
  }
  return set;
}

FeatureSet read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_feature_file(in);
}

void write_feature_csv(const std::filesystem::path& path, const FeatureSet& set) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "id_hash,label";
  for (std::size_t i = 0; i < set.length; ++i) out << ",f" << i;
  out << '\n';
  out.precision(9);
  for (const auto& r : set.records) {
    out << r.source_id << ',' << to_string(r.label);
    for (double v : r.values) out << ',' << static_cast<float>(v);
    out << '\n';
  }
}

FeatureSet quantize_to_f32(FeatureSet set) {
  for (auto& r : set.records) {
    for (double& v : r.values) v = static_cast<double>(static_cast<float>(v));
  }
  return set;
}

}  // namespace partcrop
