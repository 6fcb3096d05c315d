#include "partcrop/experiment.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#include "partcrop/errors.hpp"
#include "partcrop/hashing.hpp"

namespace partcrop {

using nlohmann::json;

namespace {

template <typename F>
auto run_stage(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

int worker_count(std::size_t requested) {
  return requested == 0 ? omp_get_max_threads() : static_cast<int>(requested);
}

MembershipFeature features_for(const Encoder& encoder, const Image& image, const AttackConfig& cfg) {
  switch (cfg.kind) {
    case FeatureKind::partcrop: return partcrop_features(encoder, image, cfg.partcrop);
    case FeatureKind::encodermi: return encodermi_features(encoder, image, cfg.augment);
    case FeatureKind::variance: return variance_features(encoder, image, cfg.augment);
    case FeatureKind::supervised: return supervised_features(encoder, image);
  }
  throw InvalidInput("unknown feature kind");
}

std::string serialize_features(const FeatureSet& set) {
  std::ostringstream out(std::ios::binary);
  write_feature_file(out, set);
  return out.str();
}

std::string serialize_model(const AttackerModel& model) {
  std::ostringstream out(std::ios::binary);
  save_model(out, model);
  return out.str();
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct TrainedAttack {
  FeatureSet known;
  std::string known_bytes;
  AttackerModel model;  // as reloaded from its f32 serialisation
  std::string model_bytes;
};

TrainedAttack train_on_known(const DatasetManifest& manifest, const Encoder& encoder,
                             const AttackConfig& cfg) {
  TrainedAttack t;
  const auto plan = run_stage("split", [&] { return split_dataset(manifest, cfg.known_fraction, cfg.split_seed); });
  const auto known_idx = plan.known();
  t.known = run_stage("extract-known", [&] {
    return quantize_to_f32(extract_features(encoder, manifest, known_idx, cfg));
  });
  t.known_bytes = serialize_features(t.known);
  t.model = run_stage("train", [&] {
    auto model = train_attacker(t.known.records, cfg.train);
    std::istringstream in(serialize_model(model), std::ios::binary);
    return load_model(in);
  });
  t.model_bytes = serialize_model(t.model);
  return t;
}

AttackReport evaluate_on_unknown(const TrainedAttack& trained, const DatasetManifest& manifest,
                                 const Encoder& encoder, const AttackConfig& cfg, json config_echo,
                                 const std::optional<std::filesystem::path>& out_dir,
                                 std::chrono::steady_clock::time_point started) {
  const auto plan = run_stage("split", [&] { return split_dataset(manifest, cfg.known_fraction, cfg.split_seed); });
  const auto unknown_idx = plan.unknown();
  const auto unknown = run_stage("extract-unknown", [&] {
    return quantize_to_f32(extract_features(encoder, manifest, unknown_idx, cfg));
  });
  if (unknown.length != trained.model.in_dim) {
    throw InvalidInput("target feature length " + std::to_string(unknown.length) +
                       " differs from attacker input " + std::to_string(trained.model.in_dim));
  }
  const std::string unknown_bytes = serialize_features(unknown);

  AttackReport report;
  report.kind = cfg.kind;
  report.metrics = run_stage("evaluate", [&] { return evaluate_model(trained.model, unknown); });
  report.config = std::move(config_echo);
  report.inputs = {{"manifest_sha256", sha256_hex(manifest_to_json(manifest).dump())},
                   {"encoder", encoder.name()},
                   {"features_known_sha256", sha256_hex(trained.known_bytes)},
                   {"features_unknown_sha256", sha256_hex(unknown_bytes)},
                   {"model_sha256", sha256_hex(trained.model_bytes)}};
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (out_dir) {
    run_stage("write-artifacts", [&] {
      std::filesystem::create_directories(*out_dir);
      write_bytes(*out_dir / "features_known.pcf", trained.known_bytes);
      write_bytes(*out_dir / "features_unknown.pcf", unknown_bytes);
      write_bytes(*out_dir / "attacker.pcat", trained.model_bytes);
      const auto report_json = report.to_json();
      write_json(*out_dir / "report.json", report_json);
      write_json(*out_dir / "run_manifest.json",
                 {{"toolkit_version", kToolkitVersion},
                  {"config_sha256", sha256_hex(report.config.dump())},
                  {"report_sha256", sha256_hex(report_json.dump(2) + "\n")},
                  {"inputs", report.inputs},
                  {"config", report.config},
                  {"wall_seconds", report.seconds}});
      return 0;
    });
  }
  return report;
}

}  // namespace

FeatureSet extract_features(const Encoder& encoder, const DatasetManifest& manifest,
                            std::span<const std::size_t> indices, const AttackConfig& cfg) {
  FeatureSet set;
  set.kind = cfg.kind;
  set.length = cfg.feature_length(encoder.shape());
  set.records.resize(indices.size());
  const auto count = static_cast<std::ptrdiff_t>(indices.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(worker_count(cfg.workers))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      const auto& entry = manifest.entries.at(indices[i]);
      auto feature = features_for(encoder, load_image(manifest, entry), cfg);
      if (feature.values.size() != set.length) {
        throw ShapeMismatch("feature length " + std::to_string(feature.values.size()) +
                            " != expected " + std::to_string(set.length));
      }
      feature.source_id = entry_hash(entry);
      feature.label = entry.membership;
      set.records[i] = std::move(feature);
    } catch (...) {
#pragma omp critical(partcrop_extract_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return set;
}

AttackMetrics evaluate_model(const AttackerModel& model, const FeatureSet& features) {
  std::vector<Membership> predicted;
  std::vector<Membership> truth;
  predicted.reserve(features.records.size());
  truth.reserve(features.records.size());
  for (const auto& r : features.records) {
    predicted.push_back(predict(model, r).label);
    truth.push_back(r.label);
  }
  return compute_metrics(predicted, truth);
}

json AttackReport::to_json() const {
  return {{"attack", partcrop::to_string(kind)},
          {"metrics",
           {{"accuracy", metrics.accuracy},
            {"precision", metrics.precision},
            {"recall", metrics.recall},
            {"f1", metrics.f1}}},
          {"counts",
           {{"tp", metrics.counts.tp},
            {"fp", metrics.counts.fp},
            {"tn", metrics.counts.tn},
            {"fn", metrics.counts.fn}}},
          {"config", config},
          {"inputs", inputs}};
}

AttackReport run_attack_experiment(const DatasetManifest& manifest, const Encoder& encoder,
                                   const AttackConfig& cfg,
                                   const std::optional<std::filesystem::path>& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  manifest.validate();
  const auto trained = train_on_known(manifest, encoder, cfg);
  json echo = attack_to_json(cfg);
  echo["setting"] = "partial";
  echo["dataset"] = manifest.name;
  return evaluate_on_unknown(trained, manifest, encoder, cfg, std::move(echo), out_dir, started);
}

AttackReport run_shadow_experiment(const DatasetManifest& source_manifest, const Encoder& source_encoder,
                                   const AttackConfig& source_cfg,
                                   const DatasetManifest& target_manifest, const Encoder& target_encoder,
                                   const AttackConfig& target_cfg,
                                   const std::optional<std::filesystem::path>& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  if (source_cfg.kind != target_cfg.kind) throw InvalidInput("shadow source and target use different attacks");
  const auto src_len = source_cfg.feature_length(source_encoder.shape());
  const auto dst_len = target_cfg.feature_length(target_encoder.shape());
  if (src_len != dst_len) {
    throw InvalidInput("shadow feature length mismatch: source " + std::to_string(src_len) + ", target " +
                       std::to_string(dst_len));
  }
  source_manifest.validate();
  target_manifest.validate();
  const auto trained = train_on_known(source_manifest, source_encoder, source_cfg);
  json echo = attack_to_json(target_cfg);
  echo["setting"] = "shadow";
  echo["source"] = attack_to_json(source_cfg);
  echo["source"]["dataset"] = source_manifest.name;
  echo["dataset"] = target_manifest.name;
  return evaluate_on_unknown(trained, target_manifest, target_encoder, target_cfg, std::move(echo), out_dir,
                             started);
}

std::vector<AttackReport> knowledge_sweep(const DatasetManifest& manifest, const Encoder& encoder,
                                          const AttackConfig& cfg, std::span<const double> fractions,
                                          const std::optional<std::filesystem::path>& out_dir) {
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) throw InvalidInput("sweep fractions must lie in (0, 1)");
  }
  std::vector<AttackReport> reports;
  reports.reserve(fractions.size());
  for (double f : fractions) {
    AttackConfig run = cfg;
    run.known_fraction = f;
    std::optional<std::filesystem::path> dir;
    if (out_dir) {
      char name[32];
      std::snprintf(name, sizeof name, "fraction_%.2f", f);
      dir = *out_dir / name;
    }
    reports.push_back(run_attack_experiment(manifest, encoder, run, dir));
  }
  if (out_dir) write_sweep_csv(*out_dir / "sweep.csv", fractions, reports);
  return reports;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const double> fractions,
                     std::span<const AttackReport> reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "fraction,accuracy,precision,recall,f1,tp,fp,tn,fn\n";
  out.precision(10);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& m = reports[i].metrics;
    out << fractions[i] << ',' << m.accuracy << ',' << m.precision << ',' << m.recall << ',' << m.f1 << ','
        << m.counts.tp << ',' << m.counts.fp << ',' << m.counts.tn << ',' << m.counts.fn << '\n';
  }
}

}  // namespace partcrop
