#pragma once

#include <cstdint>
#include <filesystem>
#include <unordered_set>

#include "partcrop/manifest.hpp"

namespace partcrop {

/// Random textured shapes on a textured background. Every pixel is a multiple
/// of 1/255, so a PNG round trip is lossless.
Image generate_synthetic_image(std::uint64_t seed, const ImageSize& size);

struct SyntheticDatasetSpec {
  std::size_t members = 100;
  std::size_t nonmembers = 100;
  ImageSize image_size{};
  std::uint64_t seed = 0;
  std::string name = "synthetic";
};

struct SyntheticDataset {
  DatasetManifest manifest;
  /// Member fingerprints, ready for SyntheticEncoderConfig::member_registry.
  std::unordered_set<std::uint64_t> registry;
};

/// Members and non-members come from the same generator; membership exists
/// only through the registry.
SyntheticDataset generate_synthetic_dataset(const SyntheticDatasetSpec& spec);

/// Writes every image as PNG to manifest_dir/image_subdir and rewrites the
/// entries to reference them by relative path.
DatasetManifest materialize_pngs(const DatasetManifest& manifest,
                                 const std::filesystem::path& manifest_dir,
                                 const std::string& image_subdir = "images");

}  // namespace partcrop
