#include "partcrop/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "partcrop/core_math.hpp"
#include "partcrop/errors.hpp"

namespace partcrop {

std::vector<double> part_response_curve(const Encoder& encoder, const Image& image, const CropBox& box,
                                        std::size_t patch_h, std::size_t patch_w) {
  if (box.w == 0 || box.h == 0 || box.x + box.w > image.width || box.y + box.h > image.height) {
    throw InvalidInput("part box lies outside the image");
  }
  const Image patch = bilinear_resize(crop_region(image, box.x, box.y, box.w, box.h), patch_h, patch_w);
  const auto part = encoder.encode_patch_batch(std::span<const Image>(&patch, 1)).at(0);
  const FeatureMap map = encoder.encode_map(image);
  std::vector<double> sims(map.positions());
  for (std::size_t j = 0; j < sims.size(); ++j) sims[j] = cosine_sim(map.position(j), part);
  return sort_desc(std::move(sims));
}

double curve_steepness(const std::vector<double>& sorted_curve) {
  if (sorted_curve.empty()) throw InvalidInput("empty curve");
  const auto top = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * sorted_curve.size())));
  const double top_mean = std::accumulate(sorted_curve.begin(), sorted_curve.begin() + top, 0.0) / top;
  const double all_mean = std::accumulate(sorted_curve.begin(), sorted_curve.end(), 0.0) / sorted_curve.size();
  return top_mean - all_mean;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<double>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "rank,similarity\n";
  out.precision(17);
  for (std::size_t i = 0; i < curve.size(); ++i) out << i + 1 << ',' << curve[i] << '\n';
}

}  // namespace partcrop
