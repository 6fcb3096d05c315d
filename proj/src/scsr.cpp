#include "partcrop/scsr.hpp"

#include <algorithm>
#include <cmath>

#include "partcrop/errors.hpp"

namespace partcrop {

namespace {

double tidy(double x) { return std::round(x * 1e10) / 1e10; }

double evaluate_at(const DefenseEvaluator& evaluate, double bound) {
  double acc;
  try {
    acc = evaluate(bound);
  } catch (const std::exception& e) {
    throw DefenseEvaluationError(bound, e.what());
  }
  if (!std::isfinite(acc)) throw DefenseEvaluationError(bound, "evaluator returned a non-finite accuracy");
  return acc;
}

bool better(const ScsrEvaluation& a, const ScsrEvaluation& b) {
  return a.accuracy < b.accuracy || (a.accuracy == b.accuracy && a.bound < b.bound);
}

}  // namespace

DefenseEvaluationError::DefenseEvaluationError(double bound, const std::string& what)
    : std::runtime_error("lower bound " + std::to_string(bound) + ": " + what), bound_(bound) {}

void ScsrSearchConfig::validate() const {
  if (candidates.empty()) throw InvalidInput("scsr needs at least one candidate");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!(candidates[i] > 0.0 && candidates[i] < 1.0)) throw InvalidInput("scsr candidates must lie in (0, 1)");
    if (i > 0 && !(candidates[i] > candidates[i - 1])) throw InvalidInput("scsr candidates must be ascending");
  }
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("scsr step must be positive");
}

ScsrResult scsr_search(const DefenseEvaluator& evaluate, const ScsrSearchConfig& cfg) {
  cfg.validate();
  ScsrResult result;
  for (double b : cfg.candidates) result.trace.push_back({b, evaluate_at(evaluate, b), 1});

  if (result.trace.size() > 1) {
    auto ranked = result.trace;
    std::stable_sort(ranked.begin(), ranked.end(), better);
    const double lo = std::min(ranked[0].bound, ranked[1].bound);
    const double hi = std::max(ranked[0].bound, ranked[1].bound);
    for (std::size_t k = 1;; ++k) {
      const double b = tidy(lo + static_cast<double>(k) * cfg.step);
      if (!(b < hi) || b <= lo) break;
      result.trace.push_back({b, evaluate_at(evaluate, b), 2});
    }
  }

  const auto best = std::min_element(result.trace.begin(), result.trace.end(), better);
  result.best_bound = best->bound;
  result.best_accuracy = best->accuracy;
  return result;
}

double DefenseSchedule::member_sharpness(double lower_bound, double base_member, double nonmember) const {
  if (!(stop > floor)) throw InvalidInput("defense schedule needs stop > floor");
  const double g = std::clamp((stop - lower_bound) / (stop - floor), 0.0, 1.0);
  return nonmember + (base_member - nonmember) * g;
}

DefenseEvaluator synthetic_defense_evaluator(DatasetManifest manifest, EncoderBinding binding,
                                             AttackConfig attack, DefenseSchedule schedule) {
  if (binding.kind != EncoderBinding::Kind::synthetic) {
    throw InvalidInput("the synthetic defense evaluator needs a synthetic encoder");
  }
  return [manifest = std::move(manifest), binding = std::move(binding), attack, schedule](double bound) {
    EncoderBinding defended = binding;
    defended.synthetic.member_sharpness = schedule.member_sharpness(
        bound, binding.synthetic.member_sharpness, binding.synthetic.nonmember_sharpness);
    const auto encoder = make_encoder(defended, &manifest);
    return run_attack_experiment(manifest, *encoder, attack).metrics.accuracy;
  };
}

double linear_defense_accuracy(double lower_bound) { return 0.8 - 0.3 * lower_bound; }

}  // namespace partcrop
