#include "partcrop/metrics.hpp"

#include "partcrop/errors.hpp"

namespace partcrop {

AttackMetrics metrics_from_counts(const ConfusionCounts& c) {
  AttackMetrics m;
  m.counts = c;
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

AttackMetrics compute_metrics(std::span<const Membership> predictions,
                              std::span<const Membership> truth) {
  if (predictions.size() != truth.size()) throw InvalidInput("prediction/truth length mismatch");
  if (truth.empty()) throw InvalidInput("no predictions to score");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == Membership::unknown) throw InvalidInput("ground truth contains an unknown label");
    const bool predicted_member = predictions[i] == Membership::member;
    if (truth[i] == Membership::member) {
      (predicted_member ? c.tp : c.fn) += 1;
    } else {
      (predicted_member ? c.fp : c.tn) += 1;
    }
  }
  return metrics_from_counts(c);
}

}  // namespace partcrop
