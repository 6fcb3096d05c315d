#pragma once

// Experiment orchestration: configuration, parallel feature extraction and
// the partial / shadow / knowledge-sweep attack pipelines.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "partcrop/attacker.hpp"
#include "partcrop/cropper.hpp"
#include "partcrop/encoding.hpp"
#include "partcrop/feature_io.hpp"
#include "partcrop/features.hpp"
#include "partcrop/manifest.hpp"
#include "partcrop/metrics.hpp"
#include "partcrop/remote_encoder.hpp"
#include "partcrop/split.hpp"
#include "partcrop/synthetic_data.hpp"

namespace partcrop {

inline constexpr const char* kToolkitVersion = "0.3.0";

struct EncoderBinding {
  enum class Kind { synthetic, remote };
  Kind kind = Kind::synthetic;
  SyntheticEncoderConfig synthetic;
  RemoteEncoderConfig remote;
  /// Synthetic only: add every member of the experiment manifest to the registry.
  bool register_members = true;

  MapShape shape() const { return kind == Kind::synthetic ? synthetic.shape : remote.declared; }
};

/// Builds the backend. For synthetic bindings with register_members set,
/// `manifest` supplies the member fingerprints.
std::unique_ptr<Encoder> make_encoder(const EncoderBinding& binding,
                                      const DatasetManifest* manifest = nullptr);

struct DatasetSource {
  std::optional<std::filesystem::path> manifest_path;
  std::optional<SyntheticDatasetSpec> synthetic;

  DatasetManifest load() const;
};

struct AttackConfig {
  FeatureKind kind = FeatureKind::partcrop;
  PartCropConfig partcrop;
  AugmentConfig augment;
  TrainConfig train;
  double known_fraction = 0.5;
  std::uint64_t split_seed = 0;
  /// Feature-extraction threads; 0 means all available cores.
  std::size_t workers = 0;

  std::size_t feature_length(const MapShape& shape) const;
};

struct ExperimentConfig {
  DatasetSource dataset;
  EncoderBinding encoder;
  AttackConfig attack;
};

// JSON schema (all sections optional except dataset):
//   {"dataset":  {"manifest": path} | {"synthetic": {members, nonmembers, image_size, seed, name}},
//    "encoder":  {"kind": "synthetic", seed, member_sharpness, nonmember_sharpness, proj_scale,
//                 context_blend, map_h, map_w, feature_dim, window, channels, register_members}
//              | {"kind": "remote", url, map_h, map_w, feature_dim, timeout_seconds, verify_info},
//    "attack":   "partcrop" | "encodermi" | "variance" | "supervised",
//    "partcrop": {m, scale: [lo, hi], aspect: [lo, hi], patch_size: [h, w], seed, benchmark_seed},
//    "augment":  {views, scale, aspect, flip_p, seed},
//    "train":    {lr, weight_decay, batch_size, epochs, hidden, seed, adam_beta1, adam_beta2, adam_eps},
//    "split":    {known_fraction, seed},
//    "workers":  n}
// Every seed not given explicitly defaults to `default_seed`. Relative
// manifest paths resolve against `base_dir`.
ExperimentConfig experiment_from_json(const nlohmann::json& j, std::uint64_t default_seed = 0,
                                      const std::filesystem::path& base_dir = {});
nlohmann::json experiment_to_json(const ExperimentConfig& cfg);
EncoderBinding binding_from_json(const nlohmann::json& j, std::uint64_t default_seed = 0);
nlohmann::json binding_to_json(const EncoderBinding& binding);
AttackConfig attack_from_json(const nlohmann::json& j, std::uint64_t default_seed = 0);
nlohmann::json attack_to_json(const AttackConfig& cfg);

/// Features for the given manifest entries, in the order given, computed in
/// parallel. Each record carries the entry hash and its true membership.
FeatureSet extract_features(const Encoder& encoder, const DatasetManifest& manifest,
                            std::span<const std::size_t> indices, const AttackConfig& cfg);

/// Attack outcome plus everything needed to reproduce it.
struct AttackReport {
  AttackMetrics metrics;
  FeatureKind kind = FeatureKind::partcrop;
  nlohmann::json config;  ///< echo of the effective configuration
  nlohmann::json inputs;  ///< hashes of the manifest and produced artifacts
  double seconds = 0.0;   ///< wall-clock; kept out of report.json

  nlohmann::json to_json() const;
};

/// Partial setting: train on the known split, attack the unknown split.
/// With `out_dir`, writes features_known.pcf, features_unknown.pcf,
/// attacker.pcat, report.json and run_manifest.json there.
/// Stage failures surface as StageError.
AttackReport run_attack_experiment(const DatasetManifest& manifest, const Encoder& encoder,
                                   const AttackConfig& cfg,
                                   const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Shadow setting: the attacker is trained on the source pair's known split
/// and evaluated on the target pair's unknown split. Throws InvalidInput if
/// the two configurations yield different feature lengths.
AttackReport run_shadow_experiment(const DatasetManifest& source_manifest, const Encoder& source_encoder,
                                   const AttackConfig& source_cfg,
                                   const DatasetManifest& target_manifest, const Encoder& target_encoder,
                                   const AttackConfig& target_cfg,
                                   const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// One partial-setting experiment per known fraction, all other seeds fixed.
/// With `out_dir`, each run goes to its own subdirectory and sweep.csv
/// collects one row per fraction.
std::vector<AttackReport> knowledge_sweep(const DatasetManifest& manifest, const Encoder& encoder,
                                          const AttackConfig& cfg, std::span<const double> fractions,
                                          const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
/// Header: fraction,accuracy,precision,recall,f1,tp,fp,tn,fn
void write_sweep_csv(const std::filesystem::path& path, std::span<const double> fractions,
                     std::span<const AttackReport> reports);

/// Scores a trained model against labelled features.
AttackMetrics evaluate_model(const AttackerModel& model, const FeatureSet& features);

}  // namespace partcrop
