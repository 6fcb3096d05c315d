#include "partcrop/core_math.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <functional>
#include <string>

#include "partcrop/errors.hpp"
#include "partcrop/rng.hpp"

namespace partcrop {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidInput("matrix data length " + std::to_string(data_.size()) + " != " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (!all_finite(data_)) throw InvalidInput("matrix contains non-finite values");
}

Matrix FeatureMap::flatten() const {
  return Matrix(positions(), dim, values);
}

Image crop_region(const Image& img, std::size_t x, std::size_t y, std::size_t w, std::size_t h) {
  if (w == 0 || h == 0 || x + w > img.width || y + h > img.height) {
    throw InvalidInput("crop region outside image");
  }
  Image out(h, w, img.channels);
  const std::size_t row_len = w * img.channels;
  for (std::size_t r = 0; r < h; ++r) {
    const auto* src = img.pixels.data() + ((y + r) * img.width + x) * img.channels;
    std::copy(src, src + row_len, out.pixels.data() + r * row_len);
  }
  return out;
}

Image flip_horizontal(const Image& img) {
  Image out(img.height, img.width, img.channels);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < img.channels; ++c) {
        out.at(y, img.width - 1 - x, c) = img.at(y, x, c);
      }
    }
  }
  return out;
}

std::uint64_t fingerprint(const Image& img) {
  std::vector<unsigned char> bytes;
  bytes.reserve(24 + img.pixels.size() * 4);
  auto put_u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
  };
  put_u64(img.height);
  put_u64(img.width);
  put_u64(img.channels);
  for (double p : img.pixels) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(p));
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<unsigned char>(bits >> (8 * i)));
  }
  return fnv1a64(bytes);
}

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("probability vector is empty");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidInput("probability entries must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw InvalidInput("probabilities sum to " + std::to_string(total));
  }
}

ProbVector softmax(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("softmax of empty vector");
  if (!all_finite(v)) throw InvalidInput("softmax input contains non-finite values");
  const double peak = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = std::exp(v[j] - peak);
    total += out[j];
  }
  for (double& x : out) x /= total;
  return ProbVector(std::move(out), ProbVector::Unchecked{});
}

ProbVector uniform_distribution(std::size_t n) {
  if (n == 0) throw InvalidInput("uniform distribution over zero bins");
  return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)), ProbVector::Unchecked{});
}

double kl_energy(const ProbVector& v, const ProbVector& benchmark) {
  if (v.size() != benchmark.size()) {
    throw InvalidInput("kl_energy length mismatch: " + std::to_string(v.size()) + " vs " +
                       std::to_string(benchmark.size()));
  }
  double energy = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double b = benchmark[j];
    if (b == 0.0) continue;
    energy += b * std::log(b / std::max(v[j], kProbabilityFloor));
  }
  return energy;
}

std::vector<double> query_similarities(const Matrix& chi, std::span<const double> p) {
  if (chi.cols() != p.size()) {
    throw InvalidInput("query dimension " + std::to_string(p.size()) + " != feature dim " +
                       std::to_string(chi.cols()));
  }
  std::vector<double> out(chi.rows());
  for (std::size_t j = 0; j < chi.rows(); ++j) out[j] = dot(chi.row(j), p);
  return out;
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("cosine_sim length mismatch");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) throw DegenerateInput("cosine similarity of a zero-norm vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

std::vector<double> avgpool_spatial(const FeatureMap& map) {
  std::vector<double> out(map.dim, 0.0);
  const std::size_t n = map.positions();
  for (std::size_t j = 0; j < n; ++j) {
    const auto pos = map.position(j);
    for (std::size_t d = 0; d < map.dim; ++d) out[d] += pos[d];
  }
  for (double& x : out) x /= static_cast<double>(n);
  return out;
}

std::vector<double> sort_desc(std::vector<double> v) {
  std::stable_sort(v.begin(), v.end(), std::greater<>{});
  return v;
}

Image bilinear_resize(const Image& img, std::size_t out_h, std::size_t out_w) {
  if (img.height == 0 || img.width == 0 || out_h == 0 || out_w == 0) {
    throw InvalidInput("bilinear_resize requires non-empty source and target");
  }
  const std::size_t c = img.channels;
  Image out(out_h, out_w, c);
  const double sy = static_cast<double>(img.height) / static_cast<double>(out_h);
  const double sx = static_cast<double>(img.width) / static_cast<double>(out_w);
  const double max_y = static_cast<double>(img.height - 1);
  const double max_x = static_cast<double>(img.width - 1);

  for (std::size_t oy = 0; oy < out_h; ++oy) {
    const double fy = std::clamp((static_cast<double>(oy) + 0.5) * sy - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      const double fx = std::clamp((static_cast<double>(ox) + 0.5) * sx - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - static_cast<double>(x0);
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double top = img.at(y0, x0, ch) * (1.0 - wx) + img.at(y0, x1, ch) * wx;
        const double bottom = img.at(y1, x0, ch) * (1.0 - wx) + img.at(y1, x1, ch) * wx;
        out.at(oy, ox, ch) = top * (1.0 - wy) + bottom * wy;
      }
    }
  }
  return out;
}

}  // namespace partcrop
