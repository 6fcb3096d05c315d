// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <string>

#include "oracles.hpp"
#include "partcrop/attacker.hpp"
#include "partcrop/core_math.hpp"
#include "partcrop/experiment.hpp"
#include "partcrop/features.hpp"
#include "partcrop/kernels.hpp"
#include "partcrop/scsr.hpp"

using namespace partcrop;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_seconds;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s  %-28s %8.2fs (budget %.0fs)  %s%s\n", pass ? "PASS" : "FAIL", name, secs, budget_seconds,
              o.detail.c_str(), in_time ? "" : " [over budget]");
  std::fflush(stdout);
}

std::vector<double> normals(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

Outcome math_suite() {
  Rng rng(1);
  double worst_shift = 0, worst_sum = 0, worst_self = 0, min_kl = 0, worst_cos = 0, worst_mm = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 40));
    const auto v = normals(rng, n, 10.0);
    auto shifted = v;
    const double c = rng.uniform(-50, 50);
    for (double& x : shifted) x += c;
    const auto p = softmax(v);
    const auto q = softmax(shifted);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += p[i];
      worst_shift = std::max(worst_shift, std::abs(p[i] - q[i]));
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));

    const auto b = softmax(normals(rng, n, 3.0));
    worst_self = std::max(worst_self, std::abs(kl_energy(b, b)));
    min_kl = std::min(min_kl, kl_energy(p, b));

    const auto x = normals(rng, n, 3.0);
    const auto y = normals(rng, n, 3.0);
    const double alpha = std::exp(rng.uniform(-5, 5)), beta = std::exp(rng.uniform(-5, 5));
    auto sx = x, sy = y;
    for (double& e : sx) e *= alpha;
    for (double& e : sy) e *= beta;
    worst_cos = std::max(worst_cos, std::abs(cosine_sim(sx, sy) - cosine_sim(x, y)));
  }
  for (int t = 0; t < 200; ++t) {
    const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 30));
    const auto cols = static_cast<std::size_t>(rng.uniform_int(1, 30));
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 20));
    const auto chi_data = normals(rng, rows * cols, 1.0);
    const auto q_data = normals(rng, m * cols, 1.0);
    const Matrix chi(rows, cols, chi_data);
    const Matrix queries(m, cols, q_data);
    const auto s = similarity_matrix(chi, queries);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < rows; ++j) {
        double acc = 0;
        for (std::size_t d = 0; d < cols; ++d) acc += q_data[i * cols + d] * chi_data[j * cols + d];
        worst_mm = std::max(worst_mm, std::abs(s(i, j) - acc));
      }
    }
  }
  const bool ok = worst_shift <= 1e-12 && worst_sum <= 1e-9 && worst_self <= 1e-12 && min_kl >= -1e-12 &&
                  worst_cos <= 1e-9 && worst_mm <= 1e-12;
  char buf[256];
  std::snprintf(buf, sizeof buf, "shift %.1e sum %.1e kl(b,b) %.1e min kl %.1e cos %.1e matmul %.1e", worst_shift,
                worst_sum, worst_self, min_kl, worst_cos, worst_mm);
  return {ok, buf};
}

Outcome partcrop_oracle() {
  Rng rng(2718);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const MapShape shape{static_cast<std::size_t>(rng.uniform_int(1, 2)),
                         static_cast<std::size_t>(rng.uniform_int(1, 2)),
                         static_cast<std::size_t>(rng.uniform_int(1, 4))};
    const oracle::BlockEncoder enc(shape, rng.next_u64());
    PartCropConfig cfg;
    cfg.m = static_cast<std::size_t>(rng.uniform_int(1, 4));
    cfg.patch_h = cfg.patch_w = static_cast<std::size_t>(rng.uniform_int(2, 6));
    cfg.seed = rng.next_u64();
    cfg.benchmark_seed = rng.next_u64();
    Image img(rng.uniform_int(4, 12), rng.uniform_int(4, 12), 3);
    for (double& x : img.pixels) x = rng.uniform();

    const auto feature = partcrop_features(enc, img, cfg);
    const auto map = enc.encode_map(img);
    oracle::Mat chi(map.positions(), oracle::Vec(map.dim));
    for (std::size_t j = 0; j < map.positions(); ++j) {
      for (std::size_t d = 0; d < map.dim; ++d) chi[j][d] = map.values[j * map.dim + d];
    }
    oracle::Mat queries;
    for (const auto& crop : sample_crops(img, cfg, fingerprint(img))) {
      const auto pm = enc.encode_map(crop.patch);
      oracle::Vec p(pm.dim, 0.0);
      for (std::size_t j = 0; j < pm.positions(); ++j) {
        for (std::size_t d = 0; d < pm.dim; ++d) p[d] += pm.values[j * pm.dim + d];
      }
      for (double& x : p) x /= static_cast<double>(pm.positions());
      queries.push_back(p);
    }
    const auto expected = oracle::partcrop_energies(chi, queries, cfg.benchmark_seed);
    if (expected.size() != feature.values.size()) return {false, "length mismatch"};
    for (std::size_t i = 0; i < expected.size(); ++i) worst = std::max(worst, std::abs(expected[i] - feature.values[i]));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "50 instances, max |diff| %.2e", worst);
  return {worst <= 1e-9, buf};
}

Outcome gradient_check() {
  Rng rng(424242);
  std::size_t checked = 0, bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const auto hidden = static_cast<std::size_t>(rng.uniform_int(1, 8));
    const auto count = static_cast<std::size_t>(rng.uniform_int(1, 4));
    auto model = init_attacker(in, hidden, rng.next_u64());
    for (auto block : parameter_blocks(model)) {
      for (double& x : block) x = 0.7 * rng.normal();
    }
    oracle::Mat xs(count, oracle::Vec(in));
    std::vector<int> ys(count);
    std::vector<Example> batch;
    for (std::size_t s = 0; s < count; ++s) {
      for (double& x : xs[s]) x = rng.normal();
      ys[s] = static_cast<int>(rng.uniform_int(0, 1));
    }
    for (std::size_t s = 0; s < count; ++s) batch.push_back({xs[s], ys[s] ? Membership::member : Membership::nonmember});
    Gradients grads;
    loss_and_gradients(model, batch, &grads);
    auto params = parameter_blocks(model);
    auto analytic = parameter_blocks(grads);
    const double h = 1e-5;
    for (std::size_t b = 0; b < params.size(); ++b) {
      for (std::size_t i = 0; i < params[b].size(); ++i) {
        const double saved = params[b][i];
        params[b][i] = saved + h;
        const double up = oracle::mlp_loss(model, xs, ys);
        params[b][i] = saved - h;
        const double down = oracle::mlp_loss(model, xs, ys);
        params[b][i] = saved;
        const double numeric = (up - down) / (2 * h);
        ++checked;
        if (std::abs(analytic[b][i] - numeric) > std::max(1e-6, 1e-3 * std::abs(numeric))) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(checked) + " parameters, " + std::to_string(bad) + " mismatches"};
}

Outcome separability() {
  Rng rng(1);
  std::vector<MembershipFeature> data;
  oracle::Mat xs;
  std::vector<int> ys;
  for (std::size_t i = 0; i < 2000; ++i) {
    const bool member = i < 1000;
    MembershipFeature f;
    f.label = member ? Membership::member : Membership::nonmember;
    f.source_id = i;
    for (int d = 0; d < 8; ++d) f.values.push_back((member ? 1.0 : -1.0) + 0.5 * rng.normal());
    xs.push_back(f.values);
    ys.push_back(member ? 1 : 0);
    data.push_back(std::move(f));
  }
  const double lr = oracle::logistic_regression_accuracy(xs, ys);
  TrainConfig cfg;
  cfg.epochs = 20;
  const double mlp = accuracy(train_attacker(data, cfg), data);
  char buf[96];
  std::snprintf(buf, sizeof buf, "attacker %.4f, logistic oracle %.4f", mlp, lr);
  return {mlp >= 0.99 && lr >= 0.99, buf};
}

struct World {
  DatasetManifest manifest;
  std::unique_ptr<Encoder> encoder;
  EncoderBinding binding;
};

World make_world(std::size_t per_class, double tm, double tn) {
  SyntheticDatasetSpec spec;
  spec.members = spec.nonmembers = per_class;
  spec.seed = 7;
  World w;
  w.manifest = generate_synthetic_dataset(spec).manifest;
  w.binding.synthetic.seed = 11;
  w.binding.synthetic.member_sharpness = tm;
  w.binding.synthetic.nonmember_sharpness = tn;
  w.encoder = make_encoder(w.binding, &w.manifest);
  return w;
}

AttackConfig attack_config(FeatureKind kind) {
  AttackConfig c;
  c.kind = kind;
  c.partcrop.seed = c.partcrop.benchmark_seed = 3;
  c.augment.seed = 3;
  c.train.seed = 3;
  c.split_seed = 3;
  return c;
}

Outcome end_to_end() {
  const auto w = make_world(1000, 8.0, 2.0);
  const double pc = run_attack_experiment(w.manifest, *w.encoder, attack_config(FeatureKind::partcrop)).metrics.accuracy;
  const double var = run_attack_experiment(w.manifest, *w.encoder, attack_config(FeatureKind::variance)).metrics.accuracy;
  char buf[96];
  std::snprintf(buf, sizeof buf, "PartCrop %.4f, Variance %.4f, margin %.4f", pc, var, pc - var);
  return {pc >= 0.70 && pc - var >= 0.05, buf};
}

Outcome null_control() {
  const auto w = make_world(2000, 2.0, 2.0);
  std::string detail;
  bool ok = true;
  for (auto kind : {FeatureKind::partcrop, FeatureKind::encodermi, FeatureKind::variance, FeatureKind::supervised}) {
    const auto r = run_attack_experiment(w.manifest, *w.encoder, attack_config(kind));
    const double acc = r.metrics.accuracy;
    ok = ok && acc >= 0.47 && acc <= 0.53 && r.metrics.counts.total() == 2000;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%s %.4f", detail.empty() ? "" : ", ", to_string(kind).c_str(), acc);
    detail += buf;
  }
  return {ok, detail};
}

Outcome scsr_direction() {
  const auto w = make_world(500, 8.0, 2.0);
  auto attack = attack_config(FeatureKind::partcrop);
  const auto raw = synthetic_defense_evaluator(w.manifest, w.binding, attack);
  std::map<double, double> cache;
  const DefenseEvaluator evaluate = [&](double b) {
    const auto it = cache.find(b);
    if (it != cache.end()) return it->second;
    return cache[b] = raw(b);
  };
  const double at02 = evaluate(0.2);
  const double at05 = evaluate(0.5);
  const bool drop_ok = at02 - at05 >= 0.05;

  const ScsrSearchConfig cfg;
  const auto r = scsr_search(evaluate, cfg);
  bool trace_ok = r.trace.size() >= cfg.candidates.size();
  std::vector<ScsrEvaluation> stage1;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& e = r.trace[i];
    if (i < cfg.candidates.size()) {
      trace_ok = trace_ok && e.stage == 1 && e.bound == cfg.candidates[i];
      stage1.push_back(e);
    } else {
      trace_ok = trace_ok && e.stage == 2;
    }
    trace_ok = trace_ok && e.accuracy == evaluate(e.bound);
    trace_ok = trace_ok && (r.best_accuracy < e.accuracy || (r.best_accuracy == e.accuracy && r.best_bound <= e.bound));
  }
  std::stable_sort(stage1.begin(), stage1.end(), [](const auto& a, const auto& b) {
    return a.accuracy < b.accuracy || (a.accuracy == b.accuracy && a.bound < b.bound);
  });
  if (stage1.size() >= 2) {
    const double lo = std::min(stage1[0].bound, stage1[1].bound);
    const double hi = std::max(stage1[0].bound, stage1[1].bound);
    std::size_t expected_stage2 = 0;
    for (int k = 1; lo + k * cfg.step < hi - 1e-9; ++k) ++expected_stage2;
    trace_ok = trace_ok && r.trace.size() == cfg.candidates.size() + expected_stage2;
    for (std::size_t i = cfg.candidates.size(); i < r.trace.size(); ++i) {
      trace_ok = trace_ok && r.trace[i].bound > lo && r.trace[i].bound < hi;
    }
  }
  trace_ok = trace_ok && std::any_of(r.trace.begin(), r.trace.end(), [&](const auto& e) {
               return e.bound == r.best_bound && e.accuracy == r.best_accuracy;
             });
  char buf[160];
  std::snprintf(buf, sizeof buf, "acc(0.2) %.4f, acc(0.5) %.4f, drop %.4f; search best %.2f at %.4f over %zu evals", at02,
                at05, at02 - at05, r.best_bound, r.best_accuracy, r.trace.size());
  return {drop_ok && trace_ok, std::string(buf) + (trace_ok ? "" : " [trace invalid]")};
}

std::string bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const auto w = make_world(200, 8.0, 2.0);
  const auto root = fs::temp_directory_path() / "partcrop_acceptance_determinism";
  fs::remove_all(root);
  auto cfg = attack_config(FeatureKind::partcrop);
  run_attack_experiment(w.manifest, *w.encoder, cfg, root / "a");
  cfg.workers = 1;
  run_attack_experiment(w.manifest, *w.encoder, cfg, root / "b");
  std::string differing;
  for (const char* f : {"features_known.pcf", "features_unknown.pcf", "attacker.pcat", "report.json"}) {
    const auto a = bytes_of(root / "a" / f);
    if (a.empty() || a != bytes_of(root / "b" / f)) differing += std::string(" ") + f;
  }
  return {differing.empty(), differing.empty() ? "features, model and report bit-identical" : "differ:" + differing};
}

Outcome split_counts() {
  DatasetManifest m;
  for (std::size_t i = 0; i < 60000; ++i) {
    ManifestEntry e;
    e.id = std::to_string(i);
    e.gen = GeneratorSpec{"textured_shapes", i};
    e.membership = i < 50000 ? Membership::member : Membership::nonmember;
    m.entries.push_back(std::move(e));
  }
  const auto p = split_dataset(m, 0.5, 0);
  const std::size_t got[] = {p.known_members.size(), p.known_nonmembers.size(), p.unknown_members.size(),
                             p.unknown_nonmembers.size()};
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu/%zu/%zu/%zu", got[0], got[1], got[2], got[3]);
  return {got[0] == 25000 && got[1] == 5000 && got[2] == 25000 && got[3] == 5000, buf};
}

}  // namespace

int main() {
  criterion("math kernel suite", 5, math_suite);
  criterion("partcrop oracle equivalence", 5, partcrop_oracle);
  criterion("attacker gradient check", 10, gradient_check);
  criterion("separability sanity", 30, separability);
  criterion("end-to-end signal", 180, end_to_end);
  criterion("null control", 180, null_control);
  criterion("scsr direction and search", 300, scsr_direction);
  criterion("determinism", 300, determinism);
  criterion("split arithmetic", 5, split_counts);
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
