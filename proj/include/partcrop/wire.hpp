#pragma once

// Encoder wire protocol: JSON over HTTP POST.
//
//   /v1/info                 -> {feature_dim, map_h, map_w, name}
//   /v1/encode_map           {h, w, c, pixels}          -> {map_h, map_w, dim, values}
//   /v1/encode_patch_batch   {count, h, w, c, pixels}   -> {count, dim, values}
//
// `pixels` and `values` are base64 of little-endian f32, row-major
// (position-major for maps). Malformed bodies answer 400 {"error": ...};
// shape violations answer 422.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "partcrop/image.hpp"

namespace partcrop::wire {

std::string base64_encode(std::span<const unsigned char> bytes);
/// Throws FormatError on malformed input.
std::vector<unsigned char> base64_decode(std::string_view text);

/// Little-endian f32 bytes of `values` (narrowed from double).
std::vector<unsigned char> pack_f32(std::span<const double> values);
/// Throws FormatError if the byte count is not a multiple of 4.
std::vector<double> unpack_f32(std::span<const unsigned char> bytes);

inline std::string encode_f32(std::span<const double> values) {
  return base64_encode(pack_f32(values));
}
inline std::vector<double> decode_f32(std::string_view text) {
  return unpack_f32(base64_decode(text));
}

inline constexpr std::string_view kInfoPath = "/v1/info";
inline constexpr std::string_view kEncodeMapPath = "/v1/encode_map";
inline constexpr std::string_view kEncodePatchBatchPath = "/v1/encode_patch_batch";

}  // namespace partcrop::wire
