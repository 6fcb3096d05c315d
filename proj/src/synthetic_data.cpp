#include "partcrop/synthetic_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "partcrop/errors.hpp"
#include "partcrop/png_io.hpp"
#include "partcrop/rng.hpp"

namespace partcrop {

namespace {

struct Texture {
  double freq;
  double angle;
  double phase;
  double amplitude;

  double at(double x, double y) const {
    const double t = x * std::cos(angle) + y * std::sin(angle);
    return amplitude * std::sin(2.0 * std::numbers::pi * freq * t + phase);
  }
};

Texture random_texture(Rng& rng) {
  return {rng.uniform(0.05, 0.35), rng.uniform(0.0, std::numbers::pi), rng.uniform(0.0, 6.283),
          rng.uniform(0.05, 0.2)};
}

enum class Shape { disc, box, ellipse };

}  // namespace

Image generate_synthetic_image(std::uint64_t seed, const ImageSize& size) {
  if (size.h == 0 || size.w == 0 || size.c == 0) throw InvalidInput("image size must be positive");
  Rng rng(seed);
  const auto h = static_cast<double>(size.h);
  const auto w = static_cast<double>(size.w);
  Image img(size.h, size.w, size.c);

  std::vector<double> base(size.c);
  for (double& b : base) b = rng.uniform(0.2, 0.8);
  const Texture bg = random_texture(rng);
  for (std::size_t y = 0; y < size.h; ++y) {
    for (std::size_t x = 0; x < size.w; ++x) {
      const double t = bg.at(static_cast<double>(x), static_cast<double>(y));
      for (std::size_t c = 0; c < size.c; ++c) img.at(y, x, c) = base[c] + t;
    }
  }

  const auto shapes = static_cast<int>(rng.uniform_int(3, 6));
  for (int s = 0; s < shapes; ++s) {
    const auto kind = static_cast<Shape>(rng.uniform_int(0, 2));
    const double cx = rng.uniform(0.0, w);
    const double cy = rng.uniform(0.0, h);
    const double rx = rng.uniform(0.1, 0.3) * w;
    const double ry = kind == Shape::disc ? rx : rng.uniform(0.1, 0.3) * h;
    std::vector<double> color(size.c);
    for (double& v : color) v = rng.uniform(0.0, 1.0);
    const Texture tex = random_texture(rng);
    for (std::size_t y = 0; y < size.h; ++y) {
      for (std::size_t x = 0; x < size.w; ++x) {
        const double dx = (static_cast<double>(x) + 0.5 - cx) / rx;
        const double dy = (static_cast<double>(y) + 0.5 - cy) / ry;
        const bool inside = kind == Shape::box ? (std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0)
                                               : (dx * dx + dy * dy <= 1.0);
        if (!inside) continue;
        const double t = tex.at(static_cast<double>(x), static_cast<double>(y));
        for (std::size_t c = 0; c < size.c; ++c) img.at(y, x, c) = color[c] + t;
      }
    }
  }

  for (double& p : img.pixels) {
    const double noisy = std::clamp(p + 0.02 * rng.normal(), 0.0, 1.0);
    p = static_cast<double>(std::lround(noisy * 255.0)) / 255.0;
  }
  return img;
}

SyntheticDataset generate_synthetic_dataset(const SyntheticDatasetSpec& spec) {
  if (spec.members == 0 || spec.nonmembers == 0) throw InvalidInput("synthetic dataset needs >= 1 image per class");
  SyntheticDataset out;
  out.manifest.name = spec.name;
  out.manifest.image_size = spec.image_size;
  const std::size_t total = spec.members + spec.nonmembers;
  out.manifest.entries.reserve(total);
  char id[32];
  for (std::size_t i = 0; i < total; ++i) {
    const bool member = i < spec.members;
    std::snprintf(id, sizeof id, "%s-%06zu", member ? "m" : "n", member ? i : i - spec.members);
    ManifestEntry e;
    e.id = id;
    e.gen = GeneratorSpec{"textured_shapes", derive_seed(spec.seed, i)};
    e.membership = member ? Membership::member : Membership::nonmember;
    if (member) out.registry.insert(fingerprint(generate_synthetic_image(e.gen->seed, spec.image_size)));
    out.manifest.entries.push_back(std::move(e));
  }
  return out;
}

DatasetManifest materialize_pngs(const DatasetManifest& manifest,
                                 const std::filesystem::path& manifest_dir,
                                 const std::string& image_subdir) {
  std::filesystem::create_directories(manifest_dir / image_subdir);
  DatasetManifest out = manifest;
  out.base_dir = manifest_dir;
  for (auto& e : out.entries) {
    const auto file = (std::filesystem::path(image_subdir) / (e.id + ".png")).generic_string();
    write_png(manifest_dir / file, load_image(manifest, e));
    e.path = file;
    e.gen.reset();
  }
  return out;
}

}  // namespace partcrop
