#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "partcrop/feature_map.hpp"
#include "partcrop/image.hpp"
#include "partcrop/matrix.hpp"

namespace partcrop {

struct MapShape {
  std::size_t height = 4;
  std::size_t width = 4;
  std::size_t dim = 32;

  std::size_t positions() const noexcept { return height * width; }
  bool operator==(const MapShape&) const = default;
};

/// Black-box image encoder. Implementations must be safe to call concurrently
/// and must not mutate state after construction.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual MapShape shape() const = 0;
  virtual std::string name() const = 0;

  /// Spatial feature map of `image`, shaped per shape().
  virtual FeatureMap encode_map(const Image& image) const = 0;

  /// avgpool(encode_map(p)) for every patch, in batch order. All patches must
  /// share one size. The default runs encode_map serially.
  virtual std::vector<std::vector<double>> encode_patch_batch(std::span<const Image> patches) const;
};

/// Throws InvalidInput unless every patch has the dimensions of the first.
void check_uniform_patches(std::span<const Image> patches);

/// Synthetic part-aware encoder.
///
/// The image is bilinearly resized to (H*k) x (W*k); each k x k window is
/// mean-centred, scaled by proj_scale, extended with a constant 1, and pushed
/// through a fixed Gaussian projection keyed by `seed`. Each position is then
/// L2-normalised. Images whose fingerprint is registered as members are scaled
/// by member_sharpness. All other images are scaled by nonmember_sharpness
/// after each position is blended toward the image's mean direction with
/// weight context_blend * (1 - nonmember_sharpness / member_sharpness), which
/// vanishes when the two sharpness values agree.
struct SyntheticEncoderConfig {
  std::uint64_t seed = 0;
  double member_sharpness = 8.0;
  double nonmember_sharpness = 2.0;
  double proj_scale = 1.0;
  double context_blend = 0.5;
  std::unordered_set<std::uint64_t> member_registry;
  MapShape shape{};
  std::size_t window = 4;
  std::size_t channels = 3;

  /// Throws InvalidInput when a field is out of range.
  void validate() const;
};

/// Stateless form: `image_id` is the identifier checked against the registry.
FeatureMap synthetic_encode(const SyntheticEncoderConfig& cfg, const Image& image,
                            std::uint64_t image_id);

class SyntheticEncoder final : public Encoder {
 public:
  explicit SyntheticEncoder(SyntheticEncoderConfig cfg);

  MapShape shape() const override { return cfg_.shape; }
  std::string name() const override { return "synthetic"; }
  const SyntheticEncoderConfig& config() const noexcept { return cfg_; }

  /// Registry lookup uses fingerprint(image).
  FeatureMap encode_map(const Image& image) const override;
  FeatureMap encode_with_id(const Image& image, std::uint64_t image_id) const;

  /// OpenMP over patches; matches Encoder::encode_patch_batch bit for bit.
  std::vector<std::vector<double>> encode_patch_batch(std::span<const Image> patches) const override;

 private:
  SyntheticEncoderConfig cfg_;
  Matrix projection_;  // dim x (window^2 * channels + 1)
};

/// Every position equals `vector`; useful as a degenerate reference backend.
class ConstantEncoder final : public Encoder {
 public:
  ConstantEncoder(MapShape shape, std::vector<double> vector);
  MapShape shape() const override { return shape_; }
  std::string name() const override { return "constant"; }
  FeatureMap encode_map(const Image& image) const override;

 private:
  MapShape shape_;
  std::vector<double> vector_;
};

/// Returns a fixed map regardless of input.
class FixedMapEncoder final : public Encoder {
 public:
  explicit FixedMapEncoder(FeatureMap map);
  MapShape shape() const override { return {map_.height, map_.width, map_.dim}; }
  std::string name() const override { return "fixed"; }
  FeatureMap encode_map(const Image&) const override { return map_; }

 private:
  FeatureMap map_;
};

}  // namespace partcrop
