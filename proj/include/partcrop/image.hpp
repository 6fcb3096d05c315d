#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace partcrop {

/// Interleaved H x W x C image, row-major, values nominally in [0, 1].
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
      : height(h), width(w), channels(c), pixels(h * w * c, fill) {}

  double& at(std::size_t y, std::size_t x, std::size_t ch) noexcept {
    return pixels[(y * width + x) * channels + ch];
  }
  double at(std::size_t y, std::size_t x, std::size_t ch) const noexcept {
    return pixels[(y * width + x) * channels + ch];
  }

  bool empty() const noexcept { return pixels.empty(); }
  bool operator==(const Image&) const = default;
};

/// Copy of the w x h region whose top-left corner is (x, y). Throws InvalidInput
/// if the region leaves the image.
Image crop_region(const Image& img, std::size_t x, std::size_t y, std::size_t w, std::size_t h);

Image flip_horizontal(const Image& img);

/// Content identifier: FNV-1a over the dimensions and the little-endian f32
/// encoding of every pixel. Stable across the wire protocol, which carries f32.
std::uint64_t fingerprint(const Image& img);

}  // namespace partcrop
