#include <cmath>

#include "partcrop/errors.hpp"
#include "partcrop/experiment.hpp"

namespace partcrop {

using nlohmann::json;

namespace {

Range range_from(const json& j, const char* key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2) throw InvalidInput(std::string("'") + key + "' must be [lo, hi]");
  return {r[0].get<double>(), r[1].get<double>()};
}

json range_to(const Range& r) { return json::array({r.lo, r.hi}); }

std::uint64_t seed_from(const json& j, std::uint64_t fallback) {
  return j.contains("seed") ? j.at("seed").get<std::uint64_t>() : fallback;
}

}  // namespace

std::unique_ptr<Encoder> make_encoder(const EncoderBinding& binding, const DatasetManifest* manifest) {
  if (binding.kind == EncoderBinding::Kind::remote) return std::make_unique<RemoteEncoder>(binding.remote);
  SyntheticEncoderConfig cfg = binding.synthetic;
  if (binding.register_members && manifest) {
    const auto members = member_fingerprints(*manifest);
    cfg.member_registry.insert(members.begin(), members.end());
  }
  return std::make_unique<SyntheticEncoder>(std::move(cfg));
}

DatasetManifest DatasetSource::load() const {
  if (manifest_path) return load_manifest(*manifest_path);
  if (synthetic) return generate_synthetic_dataset(*synthetic).manifest;
  throw InvalidInput("dataset needs either 'manifest' or 'synthetic'");
}

std::size_t AttackConfig::feature_length(const MapShape& shape) const {
  return partcrop::feature_length(kind, partcrop.m, augment.views, shape.dim);
}

EncoderBinding binding_from_json(const json& j, std::uint64_t default_seed) {
  EncoderBinding b;
  const auto kind = j.value("kind", std::string("synthetic"));
  MapShape shape{j.value("map_h", std::size_t{4}), j.value("map_w", std::size_t{4}),
                 j.value("feature_dim", std::size_t{32})};
  if (kind == "synthetic") {
    b.kind = EncoderBinding::Kind::synthetic;
    auto& s = b.synthetic;
    s.seed = seed_from(j, default_seed);
    s.member_sharpness = j.value("member_sharpness", s.member_sharpness);
    s.nonmember_sharpness = j.value("nonmember_sharpness", s.nonmember_sharpness);
    s.proj_scale = j.value("proj_scale", s.proj_scale);
    s.context_blend = j.value("context_blend", s.context_blend);
    s.window = j.value("window", s.window);
    s.channels = j.value("channels", s.channels);
    s.shape = shape;
    b.register_members = j.value("register_members", true);
    s.validate();
  } else if (kind == "remote") {
    b.kind = EncoderBinding::Kind::remote;
    b.remote.url = j.at("url").get<std::string>();
    b.remote.declared = shape;
    b.remote.timeout_seconds = j.value("timeout_seconds", b.remote.timeout_seconds);
    b.remote.verify_info = j.value("verify_info", true);
  } else {
    throw InvalidInput("unknown encoder kind '" + kind + "'");
  }
  return b;
}

json binding_to_json(const EncoderBinding& b) {
  const auto shape = b.shape();
  json j = {{"map_h", shape.height}, {"map_w", shape.width}, {"feature_dim", shape.dim}};
  if (b.kind == EncoderBinding::Kind::synthetic) {
    const auto& s = b.synthetic;
    j["kind"] = "synthetic";
    j["seed"] = s.seed;
    j["member_sharpness"] = s.member_sharpness;
    j["nonmember_sharpness"] = s.nonmember_sharpness;
    j["proj_scale"] = s.proj_scale;
    j["context_blend"] = s.context_blend;
    j["window"] = s.window;
    j["channels"] = s.channels;
    j["register_members"] = b.register_members;
  } else {
    j["kind"] = "remote";
    j["url"] = b.remote.url;
    j["timeout_seconds"] = b.remote.timeout_seconds;
    j["verify_info"] = b.remote.verify_info;
  }
  return j;
}

AttackConfig attack_from_json(const json& j, std::uint64_t default_seed) {
  AttackConfig c;
  c.kind = feature_kind_from_string(j.value("attack", std::string("partcrop")));
  c.partcrop.seed = default_seed;
  c.partcrop.benchmark_seed = default_seed;
  c.augment.seed = default_seed;
  c.train.seed = default_seed;
  c.split_seed = default_seed;

  if (j.contains("partcrop")) {
    const auto& p = j.at("partcrop");
    c.partcrop.m = p.value("m", c.partcrop.m);
    c.partcrop.geometry.scale = range_from(p, "scale", c.partcrop.geometry.scale);
    c.partcrop.geometry.aspect = range_from(p, "aspect", c.partcrop.geometry.aspect);
    if (p.contains("patch_size")) {
      c.partcrop.patch_h = p.at("patch_size").at(0).get<std::size_t>();
      c.partcrop.patch_w = p.at("patch_size").at(1).get<std::size_t>();
    }
    c.partcrop.seed = seed_from(p, default_seed);
    c.partcrop.benchmark_seed = p.value("benchmark_seed", default_seed);
  }
  if (j.contains("augment")) {
    const auto& a = j.at("augment");
    c.augment.views = a.value("views", c.augment.views);
    c.augment.geometry.scale = range_from(a, "scale", c.augment.geometry.scale);
    c.augment.geometry.aspect = range_from(a, "aspect", c.augment.geometry.aspect);
    c.augment.flip_p = a.value("flip_p", c.augment.flip_p);
    c.augment.seed = seed_from(a, default_seed);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    c.train.lr = t.value("lr", c.train.lr);
    c.train.weight_decay = t.value("weight_decay", c.train.weight_decay);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.epochs = t.value("epochs", c.train.epochs);
    c.train.hidden = t.value("hidden", c.train.hidden);
    c.train.seed = seed_from(t, default_seed);
    c.train.adam_beta1 = t.value("adam_beta1", c.train.adam_beta1);
    c.train.adam_beta2 = t.value("adam_beta2", c.train.adam_beta2);
    c.train.adam_eps = t.value("adam_eps", c.train.adam_eps);
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    c.known_fraction = s.value("known_fraction", c.known_fraction);
    c.split_seed = seed_from(s, default_seed);
  }
  c.workers = j.value("workers", c.workers);

  c.partcrop.validate();
  c.augment.geometry.validate();
  c.train.validate();
  if (!(c.known_fraction > 0.0 && c.known_fraction < 1.0)) throw InvalidInput("known_fraction must lie in (0, 1)");
  if (c.kind != FeatureKind::partcrop && c.kind != FeatureKind::supervised && c.augment.views < 2) {
    throw InvalidInput("augmentation baselines need at least 2 views");
  }
  return c;
}

json attack_to_json(const AttackConfig& c) {
  return {{"attack", to_string(c.kind)},
          {"partcrop",
           {{"m", c.partcrop.m},
            {"scale", range_to(c.partcrop.geometry.scale)},
            {"aspect", range_to(c.partcrop.geometry.aspect)},
            {"patch_size", {c.partcrop.patch_h, c.partcrop.patch_w}},
            {"seed", c.partcrop.seed},
            {"benchmark_seed", c.partcrop.benchmark_seed}}},
          {"augment",
           {{"views", c.augment.views},
            {"scale", range_to(c.augment.geometry.scale)},
            {"aspect", range_to(c.augment.geometry.aspect)},
            {"flip_p", c.augment.flip_p},
            {"seed", c.augment.seed}}},
          {"train",
           {{"lr", c.train.lr},
            {"weight_decay", c.train.weight_decay},
            {"batch_size", c.train.batch_size},
            {"epochs", c.train.epochs},
            {"hidden", c.train.hidden},
            {"seed", c.train.seed},
            {"adam_beta1", c.train.adam_beta1},
            {"adam_beta2", c.train.adam_beta2},
            {"adam_eps", c.train.adam_eps}}},
          {"split", {{"known_fraction", c.known_fraction}, {"seed", c.split_seed}}}};
}

ExperimentConfig experiment_from_json(const json& j, std::uint64_t default_seed,
                                      const std::filesystem::path& base_dir) {
  try {
    ExperimentConfig cfg;
    const auto& ds = j.at("dataset");
    if (ds.contains("manifest")) {
      std::filesystem::path p = ds.at("manifest").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      cfg.dataset.manifest_path = p;
    } else if (ds.contains("synthetic")) {
      const auto& s = ds.at("synthetic");
      SyntheticDatasetSpec spec;
      spec.members = s.value("members", spec.members);
      spec.nonmembers = s.value("nonmembers", spec.nonmembers);
      if (s.contains("image_size")) {
        const auto& sz = s.at("image_size");
        spec.image_size = {sz.at(0).get<std::size_t>(), sz.at(1).get<std::size_t>(),
                           sz.at(2).get<std::size_t>()};
      }
      spec.seed = seed_from(s, default_seed);
      spec.name = s.value("name", spec.name);
      cfg.dataset.synthetic = spec;
    } else {
      throw InvalidInput("dataset needs either 'manifest' or 'synthetic'");
    }
    cfg.encoder = binding_from_json(j.value("encoder", json::object()), default_seed);
    cfg.attack = attack_from_json(j, default_seed);
    return cfg;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config schema: ") + e.what());
  }
}

json experiment_to_json(const ExperimentConfig& cfg) {
  json j = attack_to_json(cfg.attack);
  if (cfg.dataset.manifest_path) {
    j["dataset"] = {{"manifest", cfg.dataset.manifest_path->string()}};
  } else if (cfg.dataset.synthetic) {
    const auto& s = *cfg.dataset.synthetic;
    j["dataset"] = {{"synthetic",
                     {{"members", s.members},
                      {"nonmembers", s.nonmembers},
                      {"image_size", {s.image_size.h, s.image_size.w, s.image_size.c}},
                      {"seed", s.seed},
                      {"name", s.name}}}};
  }
  j["encoder"] = binding_to_json(cfg.encoder);
  j["workers"] = cfg.attack.workers;
  return j;
}

}  // namespace partcrop
