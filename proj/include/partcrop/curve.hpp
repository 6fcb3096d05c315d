#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "partcrop/cropper.hpp"
#include "partcrop/encoding.hpp"

namespace partcrop {

/// Cosine similarity between the encoded part and every position of the
/// full-image map, sorted descending. The part is cropped from `box` and
/// resized to patch_h x patch_w before encoding. Throws InvalidInput when the
/// box leaves the image and DegenerateInput on zero-norm features.
std::vector<double> part_response_curve(const Encoder& encoder, const Image& image, const CropBox& box,
                                        std::size_t patch_h = 16, std::size_t patch_w = 16);

/// Mean of the top 10% (at least one) minus the mean of all values.
double curve_steepness(const std::vector<double>& sorted_curve);

/// Header: rank,similarity (ranks start at 1).
void write_curve_csv(const std::filesystem::path& path, const std::vector<double>& curve);

}  // namespace partcrop
