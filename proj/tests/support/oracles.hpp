#pragma once

// Reference implementations written independently of the library's kernels:
// plain loops over std::vector, no shared helpers beyond the seeded RNG.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "partcrop/attacker.hpp"
#include "partcrop/encoding.hpp"
#include "partcrop/rng.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline Vec softmax(const Vec& s) {
  double mx = s[0];
  for (double x : s) mx = std::max(mx, x);
  Vec out(s.size());
  double z = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    out[j] = std::exp(s[j] - mx);
    z += out[j];
  }
  for (double& x : out) x /= z;
  return out;
}

inline double kl(const Vec& b, const Vec& v) {
  double acc = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j] > 0.0) acc += b[j] * std::log(b[j] / std::max(v[j], 1e-12));
  }
  return acc;
}

inline Vec gaussian(std::uint64_t seed, std::size_t i, std::size_t n) {
  partcrop::Rng rng(partcrop::derive_seed(seed, i));
  Vec draws(n);
  for (double& x : draws) x = rng.normal();
  return softmax(draws);
}

inline Vec descending(Vec v) {
  std::sort(v.begin(), v.end(), [](double a, double b) { return a > b; });
  return v;
}

/// chi: N rows of D; queries: m rows of D. Returns sorted e^u then sorted e^g.
inline Vec partcrop_energies(const Mat& chi, const Mat& queries, std::uint64_t benchmark_seed) {
  const std::size_t n = chi.size();
  Vec eu, eg;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Vec s(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t d = 0; d < queries[i].size(); ++d) s[j] += chi[j][d] * queries[i][d];
    }
    const Vec v = softmax(s);
    eu.push_back(kl(Vec(n, 1.0 / static_cast<double>(n)), v));
    eg.push_back(kl(gaussian(benchmark_seed, i, n), v));
  }
  Vec out = descending(eu);
  const Vec g = descending(eg);
  out.insert(out.end(), g.begin(), g.end());
  return out;
}

/// Mean two-class cross-entropy of the MLP written out with scalar loops.
inline double mlp_loss(const partcrop::AttackerModel& m, const Mat& xs, const std::vector<int>& ys) {
  double total = 0.0;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    Vec h(m.hidden);
    for (std::size_t k = 0; k < m.hidden; ++k) {
      double a = m.b1[k];
      for (std::size_t d = 0; d < m.in_dim; ++d) a += m.w1(k, d) * xs[s][d];
      h[k] = a > 0.0 ? a : 0.0;
    }
    double z[2];
    for (int c = 0; c < 2; ++c) {
      z[c] = m.b2[c];
      for (std::size_t k = 0; k < m.hidden; ++k) z[c] += m.w2(c, k) * h[k];
    }
    const double mx = std::max(z[0], z[1]);
    const double lse = mx + std::log(std::exp(z[0] - mx) + std::exp(z[1] - mx));
    total += lse - z[ys[s]];
  }
  return total / static_cast<double>(xs.size());
}

/// Full-batch gradient descent on logistic regression; returns train accuracy.
inline double logistic_regression_accuracy(const Mat& xs, const std::vector<int>& ys, int iterations = 500,
                                           double lr = 0.5) {
  const std::size_t dim = xs.front().size();
  Vec w(dim, 0.0);
  double b = 0.0;
  const auto n = static_cast<double>(xs.size());
  for (int it = 0; it < iterations; ++it) {
    Vec gw(dim, 0.0);
    double gb = 0.0;
    for (std::size_t s = 0; s < xs.size(); ++s) {
      double z = b;
      for (std::size_t d = 0; d < dim; ++d) z += w[d] * xs[s][d];
      const double err = 1.0 / (1.0 + std::exp(-z)) - ys[s];
      for (std::size_t d = 0; d < dim; ++d) gw[d] += err * xs[s][d];
      gb += err;
    }
    for (std::size_t d = 0; d < dim; ++d) w[d] -= lr * gw[d] / n;
    b -= lr * gb / n;
  }
  std::size_t correct = 0;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    double z = b;
    for (std::size_t d = 0; d < dim; ++d) z += w[d] * xs[s][d];
    correct += static_cast<std::size_t>((z > 0.0) == (ys[s] == 1));
  }
  return static_cast<double>(correct) / n;
}

/// Deterministic encoder for tiny oracle instances: position (r, c) of an
/// H x W x D map takes channel-d statistics of the matching image block,
/// passed through a fixed nonlinearity. Any image size works.
class BlockEncoder final : public partcrop::Encoder {
 public:
  BlockEncoder(partcrop::MapShape shape, std::uint64_t seed) : shape_(shape), mix_(shape.dim) {
    partcrop::Rng rng(seed);
    for (double& x : mix_) x = rng.uniform(0.5, 3.0);
  }
  partcrop::MapShape shape() const override { return shape_; }
  std::string name() const override { return "block"; }
  partcrop::FeatureMap encode_map(const partcrop::Image& img) const override {
    partcrop::FeatureMap map(shape_.height, shape_.width, shape_.dim);
    for (std::size_t r = 0; r < shape_.height; ++r) {
      for (std::size_t c = 0; c < shape_.width; ++c) {
        const std::size_t y0 = r * img.height / shape_.height;
        const std::size_t y1 = std::max(y0 + 1, (r + 1) * img.height / shape_.height);
        const std::size_t x0 = c * img.width / shape_.width;
        const std::size_t x1 = std::max(x0 + 1, (c + 1) * img.width / shape_.width);
        for (std::size_t d = 0; d < shape_.dim; ++d) {
          double acc = 0.0;
          for (std::size_t y = y0; y < y1; ++y) {
            for (std::size_t x = x0; x < x1; ++x) acc += img.at(y, x, d % img.channels);
          }
          acc /= static_cast<double>((y1 - y0) * (x1 - x0));
          map.position(r * shape_.width + c)[d] = std::sin(mix_[d] * (acc + 0.1 * static_cast<double>(d)));
        }
      }
    }
    return map;
  }

 private:
  partcrop::MapShape shape_;
  Vec mix_;
};

}  // namespace oracle
