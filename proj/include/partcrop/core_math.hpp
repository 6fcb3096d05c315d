#pragma once

// Small deterministic numeric kernels. Everything here is a pure function of
// its arguments and computes in double precision.

#include <cstddef>
#include <span>
#include <vector>

#include "partcrop/feature_map.hpp"
#include "partcrop/image.hpp"
#include "partcrop/matrix.hpp"

namespace partcrop {

/// Probability vector: non-negative entries summing to one (within 1e-6).
class ProbVector {
 public:
  /// Validates; throws InvalidInput on empty, negative, non-finite or
  /// unnormalized input.
  explicit ProbVector(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }
  std::span<const double> values() const noexcept { return probs_; }

  bool operator==(const ProbVector&) const = default;

 private:
  struct Unchecked {};
  ProbVector(std::vector<double> probs, Unchecked) : probs_(std::move(probs)) {}
  friend ProbVector softmax(std::span<const double> v);
  friend ProbVector uniform_distribution(std::size_t n);

  std::vector<double> probs_;
};

/// Lower clamp applied to the reference distribution inside kl_energy.
inline constexpr double kProbabilityFloor = 1e-12;

/// Max-shifted softmax. Throws InvalidInput on empty or non-finite input.
ProbVector softmax(std::span<const double> v);

ProbVector uniform_distribution(std::size_t n);

/// KL(benchmark || v) in nats: sum_j b_j * log(b_j / max(v_j, 1e-12)).
/// Terms with b_j == 0 contribute zero.
double kl_energy(const ProbVector& v, const ProbVector& benchmark);

/// out_j = <chi row j, p>.
std::vector<double> query_similarities(const Matrix& chi, std::span<const double> p);

/// Throws DegenerateInput if either vector has zero norm.
double cosine_sim(std::span<const double> a, std::span<const double> b);

/// Per-channel mean over all H * W positions.
std::vector<double> avgpool_spatial(const FeatureMap& map);

/// Stable descending sort.
std::vector<double> sort_desc(std::vector<double> v);

/// Bilinear resize with half-pixel centres and edge clamping.
Image bilinear_resize(const Image& img, std::size_t out_h, std::size_t out_w);

}  // namespace partcrop
