#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "partcrop/curve.hpp"
#include "partcrop/encoder_service.hpp"
#include "partcrop/errors.hpp"
#include "partcrop/experiment.hpp"
#include "partcrop/hashing.hpp"
#include "partcrop/scsr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace partcrop;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

struct Common {
  std::string config;
  std::string out;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

std::uint64_t default_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("PARTCROP_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput(std::string("PARTCROP_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("config " + path.string() + ": " + e.what());
  }
}

ExperimentConfig load_experiment(const Common& c, const std::string& path) {
  const fs::path p = path.empty() ? fs::path(c.config) : fs::path(path);
  if (p.empty()) throw InvalidInput("--config is required");
  auto cfg = experiment_from_json(read_json(p), default_seed(c), p.parent_path());
  if (c.workers) cfg.attack.workers = c.workers;
  return cfg;
}

fs::path output_dir(const Common& c) {
  if (c.out.empty()) throw InvalidInput("--out is required");
  fs::create_directories(c.out);
  return c.out;
}

void write_run_manifest(const fs::path& dir, const std::string& command, const json& config,
                        const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs,
                        double seconds) {
  json in = json::object();
  for (const auto& p : inputs) in[p.string()] = sha256_file(p);
  json out = json::object();
  for (const auto& p : outputs) out[fs::relative(p, dir).string()] = sha256_file(p);
  write_json(dir / "run_manifest.json", {{"toolkit_version", kToolkitVersion},
                                         {"command", command},
                                         {"config_sha256", sha256_hex(config.dump())},
                                         {"config", config},
                                         {"inputs", in},
                                         {"outputs", out},
                                         {"wall_seconds", seconds}});
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput("not a number list: " + text);
    }
  }
  if (values.empty()) throw InvalidInput("empty number list");
  return values;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_metrics(const AttackMetrics& m) {
  std::printf("accuracy=%.4f precision=%.4f recall=%.4f f1=%.4f tp=%zu fp=%zu tn=%zu fn=%zu\n", m.accuracy,
              m.precision, m.recall, m.f1, m.counts.tp, m.counts.fp, m.counts.tn, m.counts.fn);
}

void add_common(CLI::App* sub, Common& c, bool needs_config, bool needs_out) {
  auto* cfg = sub->add_option("--config", c.config, "experiment JSON");
  if (needs_config) cfg->required()->check(CLI::ExistingFile);
  auto* out = sub->add_option("--out", c.out, "output directory");
  if (needs_out) out->required();
  sub->add_option("--workers", c.workers, "feature-extraction threads (default: all cores)");
  sub->add_option("--seed", c.seed, "global seed (overrides PARTCROP_SEED)");
  sub->add_flag("-v,--verbose", c.verbose, "progress on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PartCrop membership inference toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolkitVersion);
  Common common;
  const auto t0 = std::chrono::steady_clock::now();

  auto* gen = app.add_subcommand("gen-synth", "generate a synthetic member/non-member dataset");
  std::size_t members = 100, nonmembers = 100;
  std::string name = "synthetic";
  bool pngs = false;
  gen->add_option("--members", members)->check(CLI::PositiveNumber);
  gen->add_option("--nonmembers", nonmembers)->check(CLI::PositiveNumber);
  gen->add_option("--name", name);
  gen->add_flag("--png", pngs, "write images as PNG instead of generator references");
  add_common(gen, common, false, true);

  auto* extract = app.add_subcommand("extract-features", "extract membership features to a PCF1 file");
  std::string split = "all";
  extract->add_option("--split", split)->check(CLI::IsMember({"all", "known", "unknown"}));
  add_common(extract, common, true, true);

  auto* train = app.add_subcommand("train-attacker", "train the attacker on a labelled PCF1 file");
  std::string features_path;
  train->add_option("--features", features_path)->required()->check(CLI::ExistingFile);
  add_common(train, common, false, true);

  auto* evaluate = app.add_subcommand("evaluate", "score an attacker on a labelled PCF1 file");
  std::string model_path;
  evaluate->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--features", features_path)->required()->check(CLI::ExistingFile);
  add_common(evaluate, common, false, true);

  auto* attack = app.add_subcommand("attack", "end-to-end partial-setting attack");
  add_common(attack, common, true, true);

  auto* shadow = app.add_subcommand("shadow-attack", "train on a source pair, attack a target pair");
  std::string source_cfg, target_cfg;
  shadow->add_option("--source-config", source_cfg)->required()->check(CLI::ExistingFile);
  shadow->add_option("--target-config", target_cfg)->required()->check(CLI::ExistingFile);
  add_common(shadow, common, false, true);

  auto* sweep = app.add_subcommand("sweep-knowledge", "partial-setting attack over known fractions");
  std::string fractions = "0.1,0.2,0.3,0.4,0.5";
  sweep->add_option("--fractions", fractions);
  add_common(sweep, common, true, true);

  auto* curve = app.add_subcommand("curve", "part-response curve of one image");
  std::string entry_id, box_text;
  curve->add_option("--entry", entry_id, "manifest id (default: first entry)");
  curve->add_option("--box", box_text, "x,y,w,h")->required();
  add_common(curve, common, true, true);

  auto* scsr = app.add_subcommand("scsr-search", "two-stage search for the crop-scale lower bound");
  std::string candidates = "0.3,0.4,0.5";
  double step = 0.02;
  scsr->add_option("--candidates", candidates);
  scsr->add_option("--step", step);
  add_common(scsr, common, false, false);

  auto* serve = app.add_subcommand("serve-synth", "serve the synthetic encoder over HTTP");
  std::string host = "127.0.0.1";
  int port = 8080;
  double duration = 0.0;
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--duration", duration, "seconds before exiting (0: run until killed)");
  add_common(serve, common, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (gen->parsed()) {
      SyntheticDatasetSpec spec;
      spec.members = members;
      spec.nonmembers = nonmembers;
      spec.name = name;
      spec.seed = default_seed(common);
      const auto dir = output_dir(common);
      auto manifest = generate_synthetic_dataset(spec).manifest;
      if (pngs) manifest = materialize_pngs(manifest, dir);
      save_manifest(dir / "manifest.json", manifest);
      const json config = {{"members", members}, {"nonmembers", nonmembers}, {"name", name},
                           {"seed", spec.seed}, {"png", pngs}};
      write_run_manifest(dir, "gen-synth", config, {}, {dir / "manifest.json"}, elapsed(t0));
      std::printf("%zu entries -> %s\n", manifest.entries.size(), (dir / "manifest.json").c_str());
    } else if (extract->parsed()) {
      const auto cfg = load_experiment(common, "");
      const auto dir = output_dir(common);
      const auto manifest = cfg.dataset.load();
      manifest.validate();
      const auto encoder = make_encoder(cfg.encoder, &manifest);
      std::vector<std::size_t> indices;
      if (split == "all") {
        for (std::size_t i = 0; i < manifest.entries.size(); ++i) indices.push_back(i);
      } else {
        const auto plan = split_dataset(manifest, cfg.attack.known_fraction, cfg.attack.split_seed);
        indices = split == "known" ? plan.known() : plan.unknown();
      }
      const auto set = extract_features(*encoder, manifest, indices, cfg.attack);
      write_feature_file(dir / "features.pcf", set);
      write_feature_csv(dir / "features.csv", set);
      auto config = experiment_to_json(cfg);
      config["split_subset"] = split;
      write_run_manifest(dir, "extract-features", config, {common.config},
                         {dir / "features.pcf", dir / "features.csv"}, elapsed(t0));
      std::printf("%zu records of length %zu -> %s\n", set.records.size(), set.length,
                  (dir / "features.pcf").c_str());
    } else if (train->parsed()) {
      const auto seed = default_seed(common);
      AttackConfig attack_cfg = common.config.empty() ? attack_from_json(json::object(), seed)
                                                      : attack_from_json(read_json(common.config), seed);
      const auto dir = output_dir(common);
      const auto set = read_feature_file(fs::path(features_path));
      TrainingLog log;
      const auto model = train_attacker(set.records, attack_cfg.train, &log);
      save_model(dir / "attacker.pcat", model);
      const json config = attack_to_json(attack_cfg)["train"];
      std::vector<fs::path> inputs{features_path};
      if (!common.config.empty()) inputs.emplace_back(common.config);
      write_run_manifest(dir, "train-attacker", config, inputs, {dir / "attacker.pcat"}, elapsed(t0));
      std::printf("final epoch loss %.6f, train accuracy %.4f\n",
                  log.epoch_loss.empty() ? 0.0 : log.epoch_loss.back(), accuracy(model, set.records));
    } else if (evaluate->parsed()) {
      const auto dir = output_dir(common);
      const auto model = load_model(fs::path(model_path));
      const auto set = read_feature_file(fs::path(features_path));
      AttackReport report;
      report.kind = set.kind;
      report.metrics = evaluate_model(model, set);
      report.config = {{"model", model_path}, {"features", features_path}};
      report.inputs = {{"model_sha256", sha256_file(model_path)},
                       {"features_sha256", sha256_file(features_path)}};
      write_json(dir / "report.json", report.to_json());
      write_run_manifest(dir, "evaluate", report.config, {model_path, features_path}, {dir / "report.json"},
                         elapsed(t0));
      print_metrics(report.metrics);
    } else if (attack->parsed()) {
      const auto cfg = load_experiment(common, "");
      const auto dir = output_dir(common);
      const auto manifest = cfg.dataset.load();
      const auto encoder = make_encoder(cfg.encoder, &manifest);
      const auto report = run_attack_experiment(manifest, *encoder, cfg.attack, dir);
      print_metrics(report.metrics);
    } else if (shadow->parsed()) {
      const auto src = load_experiment(common, source_cfg);
      const auto dst = load_experiment(common, target_cfg);
      const auto dir = output_dir(common);
      const auto src_manifest = src.dataset.load();
      const auto dst_manifest = dst.dataset.load();
      const auto src_encoder = make_encoder(src.encoder, &src_manifest);
      const auto dst_encoder = make_encoder(dst.encoder, &dst_manifest);
      const auto report = run_shadow_experiment(src_manifest, *src_encoder, src.attack, dst_manifest,
                                                *dst_encoder, dst.attack, dir);
      print_metrics(report.metrics);
    } else if (sweep->parsed()) {
      const auto cfg = load_experiment(common, "");
      const auto dir = output_dir(common);
      const auto list = parse_list(fractions);
      const auto manifest = cfg.dataset.load();
      const auto encoder = make_encoder(cfg.encoder, &manifest);
      const auto reports = knowledge_sweep(manifest, *encoder, cfg.attack, list, dir);
      auto config = experiment_to_json(cfg);
      config["fractions"] = list;
      write_run_manifest(dir, "sweep-knowledge", config, {common.config}, {dir / "sweep.csv"}, elapsed(t0));
      for (std::size_t i = 0; i < reports.size(); ++i) {
        std::printf("fraction=%.2f ", list[i]);
        print_metrics(reports[i].metrics);
      }
    } else if (curve->parsed()) {
      const auto cfg = load_experiment(common, "");
      const auto dir = output_dir(common);
      const auto box_values = parse_list(box_text);
      if (box_values.size() != 4) throw InvalidInput("--box needs x,y,w,h");
      for (double v : box_values) {
        if (v < 0 || v != std::floor(v)) throw InvalidInput("--box values must be non-negative integers");
      }
      const CropBox box{static_cast<std::size_t>(box_values[0]), static_cast<std::size_t>(box_values[1]),
                        static_cast<std::size_t>(box_values[2]), static_cast<std::size_t>(box_values[3])};
      const auto manifest = cfg.dataset.load();
      manifest.validate();
      const ManifestEntry* entry = &manifest.entries.front();
      if (!entry_id.empty()) {
        entry = nullptr;
        for (const auto& e : manifest.entries) {
          if (e.id == entry_id) entry = &e;
        }
        if (!entry) throw InvalidInput("no manifest entry '" + entry_id + "'");
      }
      const auto encoder = make_encoder(cfg.encoder, &manifest);
      const auto values = part_response_curve(*encoder, load_image(manifest, *entry), box,
                                               cfg.attack.partcrop.patch_h, cfg.attack.partcrop.patch_w);
      write_curve_csv(dir / "curve.csv", values);
      auto config = experiment_to_json(cfg);
      config["entry"] = entry->id;
      config["box"] = {box.x, box.y, box.w, box.h};
      write_run_manifest(dir, "curve", config, {common.config}, {dir / "curve.csv"}, elapsed(t0));
      std::printf("%s: %zu positions, steepness %.6f\n", entry->id.c_str(), values.size(),
                  curve_steepness(values));
    } else if (scsr->parsed()) {
      ScsrSearchConfig search;
      search.candidates = parse_list(candidates);
      search.step = step;
      search.validate();
      DefenseEvaluator evaluator = linear_defense_accuracy;
      json config = {{"candidates", search.candidates}, {"step", search.step}};
      if (!common.config.empty()) {
        const auto cfg = load_experiment(common, "");
        auto manifest = cfg.dataset.load();
        evaluator = synthetic_defense_evaluator(std::move(manifest), cfg.encoder, cfg.attack);
        config["experiment"] = experiment_to_json(cfg);
      } else {
        config["evaluator"] = "linear";
      }
      const auto result = scsr_search(evaluator, search);
      if (!common.out.empty()) {
        const auto dir = output_dir(common);
        json trace = json::array();
        for (const auto& e : result.trace) {
          trace.push_back({{"bound", e.bound}, {"accuracy", e.accuracy}, {"stage", e.stage}});
        }
        write_json(dir / "scsr.json",
                   {{"best_bound", result.best_bound}, {"best_accuracy", result.best_accuracy},
                    {"trace", trace}, {"utility", "unmeasured"}});
        std::vector<fs::path> inputs;
        if (!common.config.empty()) inputs.emplace_back(common.config);
        write_run_manifest(dir, "scsr-search", config, inputs, {dir / "scsr.json"}, elapsed(t0));
      }
      if (common.verbose) {
        for (const auto& e : result.trace) {
          std::fprintf(stderr, "stage %d  bound %.4f  accuracy %.6f\n", e.stage, e.bound, e.accuracy);
        }
      }
      std::printf("%g\n", result.best_bound);
    } else if (serve->parsed()) {
      EncoderBinding binding;
      std::optional<DatasetManifest> manifest;
      if (!common.config.empty()) {
        const auto cfg = load_experiment(common, "");
        binding = cfg.encoder;
        manifest = cfg.dataset.load();
      } else {
        binding.synthetic.seed = default_seed(common);
      }
      if (binding.kind != EncoderBinding::Kind::synthetic) throw InvalidInput("serve-synth needs a synthetic encoder");
      std::shared_ptr<const Encoder> encoder = make_encoder(binding, manifest ? &*manifest : nullptr);
      EncoderService service(encoder);
      service.start_background(host, port);
      std::printf("%s\n", service.url().c_str());
      std::fflush(stdout);
      if (duration > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(duration));
      } else {
        for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
      }
      service.stop();
    }
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}
