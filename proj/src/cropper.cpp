#include "partcrop/cropper.hpp"

#include <algorithm>
#include <cmath>

#include "partcrop/core_math.hpp"
#include "partcrop/errors.hpp"

namespace partcrop {

namespace {
constexpr int kMaxAttempts = 10;
}

void CropGeometry::validate() const {
  if (!(scale.lo > 0.0 && scale.lo <= scale.hi && scale.hi <= 1.0)) {
    throw InvalidInput("crop scale must satisfy 0 < lo <= hi <= 1");
  }
  if (!(aspect.lo > 0.0 && aspect.lo <= aspect.hi)) {
    throw InvalidInput("aspect range must satisfy 0 < lo <= hi");
  }
}

void PartCropConfig::validate() const {
  geometry.validate();
  if (m == 0) throw InvalidInput("part crop count m must be >= 1");
  if (patch_h == 0 || patch_w == 0) throw InvalidInput("patch size must be at least 1x1");
}

CropBox sample_crop_box(std::size_t image_w, std::size_t image_h, const CropGeometry& geometry,
                        Rng& rng) {
  const double area = static_cast<double>(image_w) * static_cast<double>(image_h);
  const double log_lo = std::log(geometry.aspect.lo);
  const double log_hi = std::log(geometry.aspect.hi);

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double target = area * rng.uniform(geometry.scale.lo, geometry.scale.hi);
    const double ratio = std::exp(rng.uniform(log_lo, log_hi));
    const auto w = static_cast<long long>(std::llround(std::sqrt(target * ratio)));
    const auto h = static_cast<long long>(std::llround(std::sqrt(target / ratio)));
    if (w >= 1 && h >= 1 && w <= static_cast<long long>(image_w) &&
        h <= static_cast<long long>(image_h)) {
      const auto uw = static_cast<std::size_t>(w);
      const auto uh = static_cast<std::size_t>(h);
      const auto x = static_cast<std::size_t>(rng.uniform_int(0, image_w - uw));
      const auto y = static_cast<std::size_t>(rng.uniform_int(0, image_h - uh));
      return {x, y, uw, uh};
    }
  }

  // Largest centred box with area <= scale.hi * area.
  const double ratio = std::clamp(static_cast<double>(image_w) / static_cast<double>(image_h),
                                  geometry.aspect.lo, geometry.aspect.hi);
  const double budget = geometry.scale.hi * area;
  auto w = std::clamp<std::size_t>(static_cast<std::size_t>(std::sqrt(budget * ratio)), 1, image_w);
  auto h = std::clamp<std::size_t>(static_cast<std::size_t>(budget / static_cast<double>(w)), 1, image_h);
  return {(image_w - w) / 2, (image_h - h) / 2, w, h};
}

std::vector<Crop> sample_crops(const Image& image, const PartCropConfig& cfg,
                               std::uint64_t stream_key) {
  cfg.validate();
  if (image.height < 2 || image.width < 2) throw InvalidInput("part cropping needs an image >= 2x2");
  Rng rng(derive_seed(cfg.seed, stream_key));
  std::vector<Crop> crops;
  crops.reserve(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    const auto box = sample_crop_box(image.width, image.height, cfg.geometry, rng);
    crops.push_back({box, bilinear_resize(crop_region(image, box.x, box.y, box.w, box.h),
                                          cfg.patch_h, cfg.patch_w)});
  }
  return crops;
}

double crop_area_fraction(const CropBox& box, std::size_t image_w, std::size_t image_h) {
  return (static_cast<double>(box.w) * static_cast<double>(box.h)) /
         (static_cast<double>(image_w) * static_cast<double>(image_h));
}

}  // namespace partcrop
