#pragma once

#include <filesystem>

#include "partcrop/image.hpp"

namespace partcrop {

/// 8-bit PNG (gray, RGB or RGBA as stored; palette and 16-bit are expanded or
/// stripped to 8-bit). Pixels become value / 255.
Image read_png(const std::filesystem::path& path);

/// Writes 8-bit PNG with 1, 3 or 4 channels; values are clamped to [0, 1] and
/// rounded to the nearest multiple of 1/255.
void write_png(const std::filesystem::path& path, const Image& img);

}  // namespace partcrop
