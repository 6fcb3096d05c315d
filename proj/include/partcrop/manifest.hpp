#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "partcrop/features.hpp"
#include "partcrop/image.hpp"

namespace partcrop {

/// Procedural image recipe, regenerated on demand instead of stored on disk.
struct GeneratorSpec {
  std::string generator = "textured_shapes";
  std::uint64_t seed = 0;

  bool operator==(const GeneratorSpec&) const = default;
};

struct ManifestEntry {
  std::string id;
  std::optional<std::string> path;  ///< PNG, relative to the manifest's directory
  std::optional<GeneratorSpec> gen;
  Membership membership = Membership::member;

  bool operator==(const ManifestEntry&) const = default;
};

struct ImageSize {
  std::size_t h = 32;
  std::size_t w = 32;
  std::size_t c = 3;

  bool operator==(const ImageSize&) const = default;
};

/// JSON: {"name", "image_size": [h, w, c],
///        "entries": [{"id", "path" | "gen", "membership"}]}
struct DatasetManifest {
  std::string name;
  ImageSize image_size;
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;  ///< resolves relative paths; not serialised

  /// Unique ids, both classes present, each entry has exactly one source.
  void validate() const;
  std::size_t count(Membership m) const;

  bool operator==(const DatasetManifest& o) const {
    return name == o.name && image_size == o.image_size && entries == o.entries;
  }
};

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
/// Throws InvalidInput on schema violations.
DatasetManifest manifest_from_json(const nlohmann::json& j, std::filesystem::path base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

Image load_image(const DatasetManifest& manifest, const ManifestEntry& entry);

/// fnv1a64 of the entry id; the record key used in feature files.
std::uint64_t entry_hash(const ManifestEntry& entry);

/// Fingerprints of every member image, for SyntheticEncoderConfig::member_registry.
std::unordered_set<std::uint64_t> member_fingerprints(const DatasetManifest& manifest);

}  // namespace partcrop
