#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "partcrop/matrix.hpp"

namespace partcrop {

/// Spatial encoder output: H x W positions, each a D-dimensional vector.
/// Stored position-major, channel-minor.
struct FeatureMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  FeatureMap() = default;
  FeatureMap(std::size_t h, std::size_t w, std::size_t d)
      : height(h), width(w), dim(d), values(h * w * d, 0.0) {}

  std::size_t positions() const noexcept { return height * width; }

  std::span<double> position(std::size_t j) noexcept { return {values.data() + j * dim, dim}; }
  std::span<const double> position(std::size_t j) const noexcept {
    return {values.data() + j * dim, dim};
  }

  /// N x D view of the map (N = H * W).
  Matrix flatten() const;

  bool operator==(const FeatureMap&) const = default;
};

}  // namespace partcrop
