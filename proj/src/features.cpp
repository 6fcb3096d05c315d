#include "partcrop/features.hpp"

#include <algorithm>

#include "partcrop/errors.hpp"
#include "partcrop/kernels.hpp"

namespace partcrop {

namespace {

std::vector<std::vector<double>> embed_views(const Encoder& encoder, const std::vector<Image>& views) {
  std::vector<std::vector<double>> out;
  out.reserve(views.size());
  for (const auto& v : views) out.push_back(avgpool_spatial(encoder.encode_map(v)));
  return out;
}

}  // namespace

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::partcrop: return "partcrop";
    case FeatureKind::encodermi: return "encodermi";
    case FeatureKind::variance: return "variance";
    case FeatureKind::supervised: return "supervised";
  }
  return "unknown";
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::nonmember: return "nonmember";
    case Membership::member: return "member";
    case Membership::unknown: return "unknown";
  }
  return "unknown";
}

FeatureKind feature_kind_from_string(const std::string& name) {
  if (name == "partcrop") return FeatureKind::partcrop;
  if (name == "encodermi") return FeatureKind::encodermi;
  if (name == "variance") return FeatureKind::variance;
  if (name == "supervised") return FeatureKind::supervised;
  throw InvalidInput("unknown attack kind '" + name + "'");
}

Membership membership_from_string(const std::string& name) {
  if (name == "member") return Membership::member;
  if (name == "nonmember") return Membership::nonmember;
  if (name == "unknown") return Membership::unknown;
  throw InvalidInput("unknown membership '" + name + "'");
}

std::vector<Image> augmented_views(const Image& image, const AugmentConfig& cfg) {
  cfg.geometry.validate();
  Rng rng(derive_seed(cfg.seed, fingerprint(image)));
  std::vector<Image> views;
  views.reserve(cfg.views);
  for (std::size_t i = 0; i < cfg.views; ++i) {
    const auto box = sample_crop_box(image.width, image.height, cfg.geometry, rng);
    auto view = bilinear_resize(crop_region(image, box.x, box.y, box.w, box.h), image.height,
                                image.width);
    if (rng.bernoulli(cfg.flip_p)) view = flip_horizontal(view);
    views.push_back(std::move(view));
  }
  return views;
}

ProbVector gaussian_benchmark(std::uint64_t seed, std::size_t query_index, std::size_t n) {
  if (n == 0) throw InvalidInput("gaussian benchmark needs n >= 1");
  Rng rng(derive_seed(seed, query_index));
  std::vector<double> draws(n);
  for (double& x : draws) x = rng.normal();
  return softmax(draws);
}

MembershipFeature partcrop_features(const Encoder& encoder, const Image& image,
                                    const PartCropConfig& cfg) {
  const auto map = encoder.encode_map(image);
  const Matrix chi = map.flatten();
  const std::size_t n = chi.rows();

  const auto crops = sample_crops(image, cfg, fingerprint(image));
  std::vector<Image> patches;
  patches.reserve(crops.size());
  for (const auto& c : crops) patches.push_back(c.patch);
  const auto query_vectors = encoder.encode_patch_batch(patches);

  Matrix queries(cfg.m, chi.cols());
  for (std::size_t i = 0; i < cfg.m; ++i) {
    if (query_vectors[i].size() != chi.cols()) throw ShapeMismatch("query dim differs from map dim");
    std::copy(query_vectors[i].begin(), query_vectors[i].end(), queries.row(i).begin());
  }

  std::vector<ProbVector> benchmarks;
  benchmarks.reserve(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) benchmarks.push_back(gaussian_benchmark(cfg.benchmark_seed, i, n));

  auto energies = response_energies(chi, queries, benchmarks);
  auto uniform = sort_desc(std::move(energies.uniform));
  auto gaussian = sort_desc(std::move(energies.gaussian));

  MembershipFeature out;
  out.kind = FeatureKind::partcrop;
  out.values = std::move(uniform);
  out.values.insert(out.values.end(), gaussian.begin(), gaussian.end());
  return out;
}

MembershipFeature encodermi_features(const Encoder& encoder, const Image& image,
                                     const AugmentConfig& cfg) {
  if (cfg.views < 2) throw InvalidInput("EncoderMI needs at least 2 views");
  const auto emb = embed_views(encoder, augmented_views(image, cfg));
  MembershipFeature out;
  out.kind = FeatureKind::encodermi;
  out.values.reserve(cfg.views * (cfg.views - 1) / 2);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    for (std::size_t j = i + 1; j < emb.size(); ++j) out.values.push_back(cosine_sim(emb[i], emb[j]));
  }
  out.values = sort_desc(std::move(out.values));
  return out;
}

MembershipFeature variance_features(const Encoder& encoder, const Image& image,
                                    const AugmentConfig& cfg) {
  if (cfg.views < 2) throw InvalidInput("Variance-only attack needs at least 2 views");
  const auto emb = embed_views(encoder, augmented_views(image, cfg));
  const std::size_t dim = emb.front().size();
  const auto count = static_cast<double>(emb.size());
  // Shifted by the first view.
  std::vector<double> shift_sum(dim, 0.0), shift_sq(dim, 0.0);
  for (const auto& e : emb) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double c = e[d] - emb.front()[d];
      shift_sum[d] += c;
      shift_sq[d] += c * c;
    }
  }
  std::vector<double> var(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double mean = shift_sum[d] / count;
    var[d] = std::max(0.0, shift_sq[d] / count - mean * mean);
  }
  return {FeatureKind::variance, std::move(var), 0, Membership::unknown};
}

MembershipFeature supervised_features(const Encoder& encoder, const Image& image) {
  return {FeatureKind::supervised, avgpool_spatial(encoder.encode_map(image)), 0, Membership::unknown};
}

std::size_t feature_length(FeatureKind kind, std::size_t m, std::size_t views, std::size_t dim) {
  switch (kind) {
    case FeatureKind::partcrop: return 2 * m;
    case FeatureKind::encodermi: return views * (views - 1) / 2;
    case FeatureKind::variance:
    case FeatureKind::supervised: return dim;
  }
  return 0;
}

}  // namespace partcrop
