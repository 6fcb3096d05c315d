#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "partcrop/image.hpp"
#include "partcrop/rng.hpp"

namespace partcrop {

struct CropBox {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t w = 0;
  std::size_t h = 0;

  bool operator==(const CropBox&) const = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Random-resized-crop geometry: area fraction of the source image and
/// width/height ratio (sampled log-uniformly).
struct CropGeometry {
  Range scale{0.08, 0.2};
  Range aspect{3.0 / 4.0, 4.0 / 3.0};

  void validate() const;
};

struct PartCropConfig {
  std::size_t m = 128;
  CropGeometry geometry{};
  std::size_t patch_h = 16;
  std::size_t patch_w = 16;
  std::uint64_t seed = 0;            ///< crop stream
  std::uint64_t benchmark_seed = 0;  ///< gaussian benchmark stream

  void validate() const;
};

struct Crop {
  CropBox box;
  Image patch;
};

/// Up to 10 rejection-sampling attempts for (area, aspect); afterwards the
/// largest centred box whose area fits under scale.hi, with the aspect ratio
/// clamped into range. Boxes are never smaller than 1x1.
CropBox sample_crop_box(std::size_t image_w, std::size_t image_h, const CropGeometry& geometry,
                        Rng& rng);

/// Exactly cfg.m crops, each resized to patch_h x patch_w. The stream is
/// derive_seed(cfg.seed, stream_key), so distinct images sample independently
/// and reproducibly.
std::vector<Crop> sample_crops(const Image& image, const PartCropConfig& cfg,
                               std::uint64_t stream_key = 0);

double crop_area_fraction(const CropBox& box, std::size_t image_w, std::size_t image_h);

}  // namespace partcrop
