#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "partcrop/features.hpp"
#include "partcrop/matrix.hpp"

namespace partcrop {

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 5e-4;
  std::size_t batch_size = 100;
  std::size_t epochs = 100;
  std::size_t hidden = 128;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

/// Two-layer MLP: logits = W2 * relu(W1 * x + b1) + b2. Class 1 is "member".
/// feature_mean/feature_scale standardise raw features before the first layer.
struct AttackerModel {
  std::size_t in_dim = 0;
  std::size_t hidden = 0;
  Matrix w1;  // hidden x in_dim
  std::vector<double> b1;
  Matrix w2;  // 2 x hidden
  std::vector<double> b2;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;

  bool operator==(const AttackerModel&) const = default;
};

/// Same shapes as the model's trainable parameters.
struct Gradients {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;
};

struct AdamState {
  Gradients first;
  Gradients second;
  std::uint64_t step = 0;
};

/// One labelled model input (already standardised).
struct Example {
  std::span<const double> x;
  Membership label;
};

/// Weights ~ N(0, 0.01^2), biases 0. Standardisation is the identity.
AttackerModel init_attacker(std::size_t in_dim, std::size_t hidden, std::uint64_t seed);

Gradients zero_gradients(const AttackerModel& model);
AdamState init_adam(const AttackerModel& model);

/// Trainable parameters in a fixed order: W1, b1, W2, b2.
std::array<std::span<double>, 4> parameter_blocks(AttackerModel& model);
std::array<std::span<double>, 4> parameter_blocks(Gradients& grads);

/// Raw logits; x must already be standardised. Throws InvalidInput on a
/// dimension mismatch.
std::array<double, 2> forward(const AttackerModel& model, std::span<const double> x);

/// Mean softmax cross-entropy over `batch`; when `grads` is non-null it
/// receives the analytic gradient of that mean.
double loss_and_gradients(const AttackerModel& model, std::span<const Example> batch,
                          Gradients* grads);

/// One Adam step with L2 weight decay folded into the gradient. Requires
/// exactly batch_size/2 members and batch_size/2 non-members, otherwise
/// throws ContractViolation. Returns the loss before the update.
double train_step(AttackerModel& model, std::span<const Example> batch, const TrainConfig& cfg,
                  AdamState& state);

struct TrainingLog {
  std::vector<double> epoch_loss;  ///< mean batch loss per epoch
  /// (members, non-members) of every batch, in order.
  std::vector<std::pair<std::size_t, std::size_t>> batch_histograms;
};

/// Fits standardisation statistics on `features`, then trains for cfg.epochs
/// epochs of seed-shuffled balanced batches. Records are first put in a
/// canonical order so the result does not depend on input order. Throws
/// InvalidInput if either class has fewer than batch_size/2 examples.
AttackerModel train_attacker(std::span<const MembershipFeature> features, const TrainConfig& cfg,
                             TrainingLog* log = nullptr);

struct Prediction {
  Membership label;
  double member_probability;
};

Prediction prediction_from_logits(const std::array<double, 2>& logits);

/// Standardises `feature` with the model's statistics, then classifies.
Prediction predict(const AttackerModel& model, std::span<const double> feature);
inline Prediction predict(const AttackerModel& model, const MembershipFeature& feature) {
  return predict(model, feature.values);
}

/// Fraction of labelled features classified correctly.
double accuracy(const AttackerModel& model, std::span<const MembershipFeature> features);

// PCAT layout (little-endian): "PCAT" | u32 version | u32 in_dim | u32 hidden |
// mean[in_dim] f32 | scale[in_dim] f32 | W1 | b1 | W2 | b2 (f32, row-major).
inline constexpr std::uint32_t kModelVersion = 1;
void save_model(std::ostream& out, const AttackerModel& model);
void save_model(const std::filesystem::path& path, const AttackerModel& model);
AttackerModel load_model(std::istream& in);
AttackerModel load_model(const std::filesystem::path& path);

}  // namespace partcrop
