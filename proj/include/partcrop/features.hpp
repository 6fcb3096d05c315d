#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "partcrop/core_math.hpp"
#include "partcrop/cropper.hpp"
#include "partcrop/encoding.hpp"

namespace partcrop {

enum class FeatureKind : std::uint32_t { partcrop = 0, encodermi = 1, variance = 2, supervised = 3 };
enum class Membership : std::uint8_t { nonmember = 0, member = 1, unknown = 2 };

std::string to_string(FeatureKind kind);
std::string to_string(Membership m);
/// Throws InvalidInput for unknown names.
FeatureKind feature_kind_from_string(const std::string& name);
Membership membership_from_string(const std::string& name);

struct MembershipFeature {
  FeatureKind kind = FeatureKind::partcrop;
  std::vector<double> values;
  std::uint64_t source_id = 0;  ///< fnv1a64 of the manifest id
  Membership label = Membership::unknown;

  bool operator==(const MembershipFeature&) const = default;
};

/// Views for the EncoderMI and Variance-only baselines: random resized crop
/// (resized back to the source size) plus a horizontal flip with probability
/// flip_p. Streams are keyed by (seed, image fingerprint).
struct AugmentConfig {
  std::size_t views = 10;
  CropGeometry geometry{{0.2, 1.0}, {3.0 / 4.0, 4.0 / 3.0}};
  double flip_p = 0.5;
  std::uint64_t seed = 0;
};

std::vector<Image> augmented_views(const Image& image, const AugmentConfig& cfg);

/// Softmax of n standard normals drawn from derive_seed(seed, query_index).
ProbVector gaussian_benchmark(std::uint64_t seed, std::size_t query_index, std::size_t n);

/// Sorted uniform energies followed by sorted gaussian energies (length 2m).
MembershipFeature partcrop_features(const Encoder& encoder, const Image& image,
                                    const PartCropConfig& cfg);

/// Descending pairwise cosine similarities of the n view embeddings, n(n-1)/2 values.
MembershipFeature encodermi_features(const Encoder& encoder, const Image& image,
                                     const AugmentConfig& cfg);

/// Per-channel population variance of the view embeddings.
MembershipFeature variance_features(const Encoder& encoder, const Image& image,
                                    const AugmentConfig& cfg);

/// avgpool of the full-image feature map.
MembershipFeature supervised_features(const Encoder& encoder, const Image& image);

/// Feature length produced for `kind` under the given settings.
std::size_t feature_length(FeatureKind kind, std::size_t m, std::size_t views, std::size_t dim);

}  // namespace partcrop
