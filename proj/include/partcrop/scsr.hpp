#pragma once

// Shrinking-crop-scale-range defense: choose the lower bound of the encoder's
// training crop scale that minimises attack accuracy.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "partcrop/experiment.hpp"

namespace partcrop {

struct ScsrSearchConfig {
  std::vector<double> candidates{0.3, 0.4, 0.5};
  double step = 0.02;

  /// Candidates must be ascending, distinct and inside (0, 1); step > 0.
  void validate() const;
};

struct ScsrEvaluation {
  double bound;
  double accuracy;
  int stage;  ///< 1 = coarse candidate, 2 = refinement grid
};

struct ScsrResult {
  double best_bound;
  double best_accuracy;
  std::vector<ScsrEvaluation> trace;
};

/// Raised when the evaluator fails; carries the bound it was asked about.
class DefenseEvaluationError : public std::runtime_error {
 public:
  DefenseEvaluationError(double bound, const std::string& what);
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

using DefenseEvaluator = std::function<double(double lower_bound)>;

/// Stage 1 evaluates every candidate. Stage 2 walks lo + k * step strictly
/// between the two lowest-accuracy candidates (lo < hi). The returned bound has
/// the lowest accuracy of everything evaluated; ties go to the smaller bound.
ScsrResult scsr_search(const DefenseEvaluator& evaluate, const ScsrSearchConfig& cfg = {});

/// Monotone stand-in for retraining with a shrunken crop range: the member
/// sharpness falls linearly from its base value at `floor` to the non-member
/// sharpness at `stop`.
struct DefenseSchedule {
  double floor = 0.08;
  double stop = 0.6;

  double member_sharpness(double lower_bound, double base_member, double nonmember) const;
};

/// Runs a partial-setting attack against the synthetic encoder in `binding`,
/// with its member sharpness set by `schedule` for each bound.
DefenseEvaluator synthetic_defense_evaluator(DatasetManifest manifest, EncoderBinding binding,
                                             AttackConfig attack, DefenseSchedule schedule = {});

/// acc(b) = 0.8 - 0.3 b.
double linear_defense_accuracy(double lower_bound);

}  // namespace partcrop
