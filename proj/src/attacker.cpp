#include "partcrop/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "partcrop/binary_io.hpp"
#include "partcrop/errors.hpp"
#include "partcrop/rng.hpp"

namespace partcrop {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;    // "init"
constexpr std::uint64_t kBatchStream = 0x62617463;   // "batc"
constexpr double kInitStddev = 0.01;
constexpr double kMinScale = 1e-12;

std::size_t label_index(Membership m) {
  switch (m) {
    case Membership::member: return 1;
    case Membership::nonmember: return 0;
    case Membership::unknown: break;
  }
  throw InvalidInput("training example has unknown membership");
}

// Hidden pre-activations for one input.
void hidden_layer(const AttackerModel& model, std::span<const double> x, std::vector<double>& pre) {
  for (std::size_t k = 0; k < model.hidden; ++k) {
    const auto w = model.w1.row(k);
    double acc = model.b1[k];
    for (std::size_t i = 0; i < model.in_dim; ++i) acc += w[i] * x[i];
    pre[k] = acc;
  }
}

std::array<double, 2> output_layer(const AttackerModel& model, const std::vector<double>& pre) {
  std::array<double, 2> z{model.b2[0], model.b2[1]};
  for (std::size_t c = 0; c < 2; ++c) {
    const auto w = model.w2.row(c);
    for (std::size_t k = 0; k < model.hidden; ++k) z[c] += w[k] * std::max(pre[k], 0.0);
  }
  return z;
}

double log_sum_exp(const std::array<double, 2>& z) {
  const double peak = std::max(z[0], z[1]);
  return peak + std::log(std::exp(z[0] - peak) + std::exp(z[1] - peak));
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw InvalidInput("learning rate must be > 0");
  if (!(weight_decay >= 0.0)) throw InvalidInput("weight decay must be >= 0");
  if (batch_size == 0 || batch_size % 2 != 0) throw InvalidInput("batch size must be even and > 0");
  if (epochs == 0) throw InvalidInput("epochs must be >= 1");
  if (hidden == 0) throw InvalidInput("hidden width must be >= 1");
}

AttackerModel init_attacker(std::size_t in_dim, std::size_t hidden, std::uint64_t seed) {
  if (in_dim == 0 || hidden == 0) throw InvalidInput("attacker dimensions must be >= 1");
  AttackerModel model;
  model.in_dim = in_dim;
  model.hidden = hidden;
  model.w1 = Matrix(hidden, in_dim);
  model.b1.assign(hidden, 0.0);
  model.w2 = Matrix(2, hidden);
  model.b2.assign(2, 0.0);
  model.feature_mean.assign(in_dim, 0.0);
  model.feature_scale.assign(in_dim, 1.0);
  Rng rng(derive_seed(seed, kInitStream));
  for (double& w : model.w1.data()) w = kInitStddev * rng.normal();
  for (double& w : model.w2.data()) w = kInitStddev * rng.normal();
  return model;
}

Gradients zero_gradients(const AttackerModel& model) {
  return {Matrix(model.hidden, model.in_dim), std::vector<double>(model.hidden, 0.0),
          Matrix(2, model.hidden), std::vector<double>(2, 0.0)};
}

AdamState init_adam(const AttackerModel& model) {
  return {zero_gradients(model), zero_gradients(model), 0};
}

std::array<std::span<double>, 4> parameter_blocks(AttackerModel& model) {
  return {model.w1.data(), std::span<double>(model.b1), model.w2.data(), std::span<double>(model.b2)};
}

std::array<std::span<double>, 4> parameter_blocks(Gradients& grads) {
  return {grads.w1.data(), std::span<double>(grads.b1), grads.w2.data(), std::span<double>(grads.b2)};
}

std::array<double, 2> forward(const AttackerModel& model, std::span<const double> x) {
  if (x.size() != model.in_dim) {
    throw InvalidInput("attacker input has length " + std::to_string(x.size()) + ", expected " +
                       std::to_string(model.in_dim));
  }
  std::vector<double> pre(model.hidden);
  hidden_layer(model, x, pre);
  return output_layer(model, pre);
}

double loss_and_gradients(const AttackerModel& model, std::span<const Example> batch,
                          Gradients* grads) {
  if (batch.empty()) throw InvalidInput("empty batch");
  if (grads) *grads = zero_gradients(model);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  std::vector<double> pre(model.hidden);
  std::vector<double> d_pre(model.hidden);
  double total = 0.0;

  for (const auto& ex : batch) {
    if (ex.x.size() != model.in_dim) throw InvalidInput("attacker input dimension mismatch");
    const std::size_t y = label_index(ex.label);
    hidden_layer(model, ex.x, pre);
    const auto z = output_layer(model, pre);
    const double lse = log_sum_exp(z);
    total += lse - z[y];
    if (!grads) continue;

    std::array<double, 2> dz{std::exp(z[0] - lse), std::exp(z[1] - lse)};
    dz[y] -= 1.0;
    dz[0] *= inv_b;
    dz[1] *= inv_b;

    for (std::size_t c = 0; c < 2; ++c) {
      auto gw = grads->w2.row(c);
      for (std::size_t k = 0; k < model.hidden; ++k) gw[k] += dz[c] * std::max(pre[k], 0.0);
      grads->b2[c] += dz[c];
    }
    for (std::size_t k = 0; k < model.hidden; ++k) {
      d_pre[k] = pre[k] > 0.0 ? dz[0] * model.w2(0, k) + dz[1] * model.w2(1, k) : 0.0;
    }
    for (std::size_t k = 0; k < model.hidden; ++k) {
      if (d_pre[k] == 0.0) continue;
      auto gw = grads->w1.row(k);
      for (std::size_t i = 0; i < model.in_dim; ++i) gw[i] += d_pre[k] * ex.x[i];
      grads->b1[k] += d_pre[k];
    }
  }
  return total * inv_b;
}

double train_step(AttackerModel& model, std::span<const Example> batch, const TrainConfig& cfg,
                  AdamState& state) {
  if (batch.size() != cfg.batch_size) {
    throw ContractViolation("batch has " + std::to_string(batch.size()) + " examples, expected " +
                            std::to_string(cfg.batch_size));
  }
  const auto members = static_cast<std::size_t>(
      std::count_if(batch.begin(), batch.end(), [](const Example& e) { return e.label == Membership::member; }));
  const auto nonmembers = static_cast<std::size_t>(
      std::count_if(batch.begin(), batch.end(), [](const Example& e) { return e.label == Membership::nonmember; }));
  if (members != cfg.batch_size / 2 || nonmembers != cfg.batch_size / 2) {
    throw ContractViolation("unbalanced batch: " + std::to_string(members) + " members, " +
                            std::to_string(nonmembers) + " non-members");
  }

  Gradients grads;
  const double loss = loss_and_gradients(model, batch, &grads);

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.adam_beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.adam_beta2, t);
  auto params = parameter_blocks(model);
  auto g = parameter_blocks(grads);
  auto m = parameter_blocks(state.first);
  auto v = parameter_blocks(state.second);
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double gi = g[b][i] + cfg.weight_decay * params[b][i];
      m[b][i] = cfg.adam_beta1 * m[b][i] + (1.0 - cfg.adam_beta1) * gi;
      v[b][i] = cfg.adam_beta2 * v[b][i] + (1.0 - cfg.adam_beta2) * gi * gi;
      params[b][i] -= cfg.lr * (m[b][i] / bias1) / (std::sqrt(v[b][i] / bias2) + cfg.adam_eps);
    }
  }
  return loss;
}

AttackerModel train_attacker(std::span<const MembershipFeature> features, const TrainConfig& cfg,
                             TrainingLog* log) {
  cfg.validate();
  if (features.empty()) throw InvalidInput("no training features");
  const std::size_t dim = features.front().values.size();
  if (dim == 0) throw InvalidInput("training features are empty vectors");

  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  for (const auto& f : features) {
    if (f.values.size() != dim) throw InvalidInput("training features differ in length");
    if (f.label == Membership::unknown) throw InvalidInput("training feature without a label");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& fa = features[a];
    const auto& fb = features[b];
    if (fa.label != fb.label) return fa.label < fb.label;
    if (fa.source_id != fb.source_id) return fa.source_id < fb.source_id;
    return fa.values < fb.values;
  });

  std::vector<std::size_t> member_idx;
  std::vector<std::size_t> nonmember_idx;
  for (std::size_t i : order) {
    (features[i].label == Membership::member ? member_idx : nonmember_idx).push_back(i);
  }
  const std::size_t half = cfg.batch_size / 2;
  if (member_idx.size() < half || nonmember_idx.size() < half) {
    throw InvalidInput("need at least " + std::to_string(half) + " examples of each class, have " +
                       std::to_string(member_idx.size()) + " members and " +
                       std::to_string(nonmember_idx.size()) + " non-members");
  }

  AttackerModel model = init_attacker(dim, cfg.hidden, cfg.seed);
  const auto n = static_cast<double>(order.size());
  std::fill(model.feature_mean.begin(), model.feature_mean.end(), 0.0);
  for (std::size_t i : order) {
    for (std::size_t d = 0; d < dim; ++d) model.feature_mean[d] += features[i].values[d];
  }
  for (double& x : model.feature_mean) x /= n;
  std::vector<double> var(dim, 0.0);
  for (std::size_t i : order) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double c = features[i].values[d] - model.feature_mean[d];
      var[d] += c * c;
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    const double sd = std::sqrt(var[d] / n);
    model.feature_scale[d] = sd > kMinScale ? sd : 1.0;
  }

  std::vector<std::vector<double>> inputs(features.size(), std::vector<double>(dim));
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      inputs[i][d] = (features[i].values[d] - model.feature_mean[d]) / model.feature_scale[d];
    }
  }

  Rng rng(derive_seed(cfg.seed, kBatchStream));
  AdamState state = init_adam(model);
  const std::size_t batches = std::min(member_idx.size(), nonmember_idx.size()) / half;
  std::vector<Example> batch(cfg.batch_size);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(member_idx));
    rng.shuffle(std::span(nonmember_idx));
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::size_t mi = member_idx[b * half + k];
        const std::size_t ni = nonmember_idx[b * half + k];
        batch[k] = {inputs[mi], features[mi].label};
        batch[half + k] = {inputs[ni], features[ni].label};
      }
      epoch_loss += train_step(model, batch, cfg, state);
      if (log) log->batch_histograms.emplace_back(half, half);
    }
    if (log) log->epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
  }
  return model;
}

Prediction prediction_from_logits(const std::array<double, 2>& logits) {
  const double p_member = std::exp(logits[1] - log_sum_exp(logits));
  return {logits[1] > logits[0] ? Membership::member : Membership::nonmember, p_member};
}

Prediction predict(const AttackerModel& model, std::span<const double> feature) {
  if (feature.size() != model.in_dim) {
    throw InvalidInput("feature length " + std::to_string(feature.size()) + " != attacker input " +
                       std::to_string(model.in_dim));
  }
  std::vector<double> x(model.in_dim);
  for (std::size_t d = 0; d < model.in_dim; ++d) {
    x[d] = (feature[d] - model.feature_mean[d]) / model.feature_scale[d];
  }
  return prediction_from_logits(forward(model, x));
}

double accuracy(const AttackerModel& model, std::span<const MembershipFeature> features) {
  if (features.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& f : features) correct += predict(model, f).label == f.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(features.size());
}

void save_model(std::ostream& out, const AttackerModel& model) {
  binary::put_magic(out, "PCAT");
  binary::put_le<std::uint32_t>(out, kModelVersion);
  binary::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.in_dim));
  binary::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.hidden));
  for (double v : model.feature_mean) binary::put_f32(out, v);
  for (double v : model.feature_scale) binary::put_f32(out, v);
  for (double v : model.w1.data()) binary::put_f32(out, v);
  for (double v : model.b1) binary::put_f32(out, v);
  for (double v : model.w2.data()) binary::put_f32(out, v);
  for (double v : model.b2) binary::put_f32(out, v);
}

void save_model(const std::filesystem::path& path, const AttackerModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  save_model(out, model);
}

AttackerModel load_model(std::istream& in) {
  binary::expect_magic(in, "PCAT");
  const auto version = binary::get_le<std::uint32_t>(in);
  if (version != kModelVersion) throw FormatError("unsupported model version " + std::to_string(version));
  const auto in_dim = binary::get_le<std::uint32_t>(in);
  const auto hidden = binary::get_le<std::uint32_t>(in);
  if (in_dim == 0 || hidden == 0) throw FormatError("model has zero-sized layers");
  AttackerModel model = init_attacker(in_dim, hidden, 0);
  for (double& v : model.feature_mean) v = binary::get_f32(in);
  for (double& v : model.feature_scale) v = binary::get_f32(in);
  for (auto block : parameter_blocks(model)) {
    for (double& v : block) v = binary::get_f32(in);
  }
  return model;
}

AttackerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return load_model(in);
}

}  // namespace partcrop
