#include "partcrop/encoding.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "partcrop/core_math.hpp"
#include "partcrop/errors.hpp"
#include "partcrop/rng.hpp"

namespace partcrop {

namespace {

constexpr std::uint64_t kProjectionStream = 0x70726f6a;  // "proj"

Matrix make_projection(const SyntheticEncoderConfig& cfg) {
  const std::size_t in = cfg.window * cfg.window * cfg.channels + 1;
  Matrix proj(cfg.shape.dim, in);
  Rng rng(derive_seed(cfg.seed, kProjectionStream));
  for (double& x : proj.data()) x = rng.normal();
  return proj;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

// Unit-norm features per position, before membership scaling.
FeatureMap project_windows(const SyntheticEncoderConfig& cfg, const Matrix& projection,
                           const Image& image) {
  if (image.height == 0 || image.width == 0) throw InvalidInput("empty image");
  if (image.channels != cfg.channels) {
    throw InvalidInput("synthetic encoder expects " + std::to_string(cfg.channels) +
                       " channels, got " + std::to_string(image.channels));
  }
  const std::size_t k = cfg.window;
  const auto& shape = cfg.shape;
  const Image grid = bilinear_resize(image, shape.height * k, shape.width * k);

  FeatureMap map(shape.height, shape.width, shape.dim);
  std::vector<double> window(k * k * cfg.channels + 1);
  for (std::size_t gy = 0; gy < shape.height; ++gy) {
    for (std::size_t gx = 0; gx < shape.width; ++gx) {
      std::size_t idx = 0;
      double mean = 0.0;
      for (std::size_t y = 0; y < k; ++y) {
        for (std::size_t x = 0; x < k; ++x) {
          for (std::size_t c = 0; c < cfg.channels; ++c) {
            window[idx] = grid.at(gy * k + y, gx * k + x, c);
            mean += window[idx++];
          }
        }
      }
      mean /= static_cast<double>(idx);
      for (std::size_t i = 0; i < idx; ++i) window[i] = cfg.proj_scale * (window[i] - mean);
      window[idx] = 1.0;

      auto out = map.position(gy * shape.width + gx);
      for (std::size_t d = 0; d < shape.dim; ++d) {
        const auto row = projection.row(d);
        double acc = 0.0;
        for (std::size_t i = 0; i < window.size(); ++i) acc += row[i] * window[i];
        out[d] = acc;
      }
      const double n = norm2(out);
      if (n > 0.0) {
        for (double& x : out) x /= n;
      } else {
        out[0] = 1.0;
      }
    }
  }
  return map;
}

void apply_membership(const SyntheticEncoderConfig& cfg, bool member, FeatureMap& map) {
  if (member) {
    for (double& x : map.values) x *= cfg.member_sharpness;
    return;
  }
  const double blend = cfg.context_blend * (1.0 - cfg.nonmember_sharpness / cfg.member_sharpness);
  if (blend > 0.0) {
    const auto mean = avgpool_spatial(map);
    for (std::size_t j = 0; j < map.positions(); ++j) {
      auto pos = map.position(j);
      std::vector<double> mixed(pos.size());
      for (std::size_t d = 0; d < pos.size(); ++d) mixed[d] = (1.0 - blend) * pos[d] + blend * mean[d];
      const double n = norm2(mixed);
      if (n > 0.0) {
        for (std::size_t d = 0; d < pos.size(); ++d) pos[d] = mixed[d] / n;
      }
    }
  }
  for (double& x : map.values) x *= cfg.nonmember_sharpness;
}

}  // namespace

std::vector<std::vector<double>> Encoder::encode_patch_batch(std::span<const Image> patches) const {
  check_uniform_patches(patches);
  std::vector<std::vector<double>> out;
  out.reserve(patches.size());
  for (const auto& p : patches) out.push_back(avgpool_spatial(encode_map(p)));
  return out;
}

void check_uniform_patches(std::span<const Image> patches) {
  for (const auto& p : patches) {
    if (p.height != patches[0].height || p.width != patches[0].width ||
        p.channels != patches[0].channels) {
      throw InvalidInput("patch batch mixes image sizes");
    }
  }
}

void SyntheticEncoderConfig::validate() const {
  if (!(nonmember_sharpness > 0.0) || !(member_sharpness >= nonmember_sharpness) ||
      !std::isfinite(member_sharpness)) {
    throw InvalidInput("synthetic encoder needs member_sharpness >= nonmember_sharpness > 0");
  }
  if (!std::isfinite(proj_scale)) throw InvalidInput("proj_scale must be finite");
  if (!(context_blend >= 0.0 && context_blend < 1.0)) {
    throw InvalidInput("context_blend must lie in [0, 1)");
  }
  if (shape.height == 0 || shape.width == 0 || shape.dim == 0) {
    throw InvalidInput("map shape must be at least 1x1x1");
  }
  if (window == 0 || channels == 0) throw InvalidInput("window and channels must be >= 1");
}

FeatureMap synthetic_encode(const SyntheticEncoderConfig& cfg, const Image& image,
                            std::uint64_t image_id) {
  cfg.validate();
  auto map = project_windows(cfg, make_projection(cfg), image);
  apply_membership(cfg, cfg.member_registry.contains(image_id), map);
  return map;
}

SyntheticEncoder::SyntheticEncoder(SyntheticEncoderConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  projection_ = make_projection(cfg_);
}

FeatureMap SyntheticEncoder::encode_map(const Image& image) const {
  return encode_with_id(image, fingerprint(image));
}

FeatureMap SyntheticEncoder::encode_with_id(const Image& image, std::uint64_t image_id) const {
  auto map = project_windows(cfg_, projection_, image);
  apply_membership(cfg_, cfg_.member_registry.contains(image_id), map);
  return map;
}

std::vector<std::vector<double>> SyntheticEncoder::encode_patch_batch(
    std::span<const Image> patches) const {
  check_uniform_patches(patches);
  std::vector<std::vector<double>> out(patches.size());
  const auto count = static_cast<std::ptrdiff_t>(patches.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[i] = avgpool_spatial(encode_map(patches[i]));
    } catch (...) {
#pragma omp critical(partcrop_encode_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ConstantEncoder::ConstantEncoder(MapShape shape, std::vector<double> vector)
    : shape_(shape), vector_(std::move(vector)) {
  if (vector_.size() != shape_.dim) throw InvalidInput("constant vector length != dim");
}

FeatureMap ConstantEncoder::encode_map(const Image&) const {
  FeatureMap map(shape_.height, shape_.width, shape_.dim);
  for (std::size_t j = 0; j < map.positions(); ++j) {
    std::copy(vector_.begin(), vector_.end(), map.position(j).begin());
  }
  return map;
}

FixedMapEncoder::FixedMapEncoder(FeatureMap map) : map_(std::move(map)) {
  if (map_.values.size() != map_.positions() * map_.dim) throw InvalidInput("malformed feature map");
}

}  // namespace partcrop
