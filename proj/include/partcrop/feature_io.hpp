#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "partcrop/features.hpp"

namespace partcrop {

/// A homogeneous collection of membership features, as stored in a PCF1 file.
struct FeatureSet {
  FeatureKind kind = FeatureKind::partcrop;
  std::size_t length = 0;
  std::vector<MembershipFeature> records;

  bool operator==(const FeatureSet&) const = default;
};

// PCF1 layout (little-endian):
//   "PCF1" | u32 kind | u32 record count | u32 feature length
//   per record: u64 id hash | u8 label | length x f32
void write_feature_file(std::ostream& out, const FeatureSet& set);
void write_feature_file(const std::filesystem::path& path, const FeatureSet& set);
/// Throws FormatError on bad magic, unknown tags or truncation.
FeatureSet read_feature_file(std::istream& in);
FeatureSet read_feature_file(const std::filesystem::path& path);

/// One row per record: id_hash,label,v0,v1,...
void write_feature_csv(const std::filesystem::path& path, const FeatureSet& set);

/// Rounds every value through f32, i.e. what a write/read cycle yields.
FeatureSet quantize_to_f32(FeatureSet set);

}  // namespace partcrop
