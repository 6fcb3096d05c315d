#pragma once

#include <cstddef>
#include <span>

#include "partcrop/features.hpp"

namespace partcrop {

/// Member is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct AttackMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;

  bool operator==(const AttackMetrics&) const = default;
};

/// Precision and recall are 0 when their denominators are 0; F1 is 0 when
/// precision + recall is 0.
AttackMetrics metrics_from_counts(const ConfusionCounts& counts);

/// Throws InvalidInput on length mismatch, empty input, or unknown truth labels.
AttackMetrics compute_metrics(std::span<const Membership> predictions,
                              std::span<const Membership> truth);

}  // namespace partcrop
