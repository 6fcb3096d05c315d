#include "partcrop/remote_encoder.hpp"

#include <httplib.h>

#include <json.hpp>

#include "partcrop/errors.hpp"
#include "partcrop/wire.hpp"

namespace partcrop {

using nlohmann::json;

namespace {

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("unparseable response: ") + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(std::string("response missing or mistyped field '") + key + "'");
  }
}

std::vector<double> decode_values(const json& j) {
  try {
    return wire::decode_f32(field<std::string>(j, "values"));
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("bad values payload: ") + e.what());
  }
}

}  // namespace

RemoteEncoder::RemoteEncoder(RemoteEncoderConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.declared.height == 0 || cfg_.declared.width == 0 || cfg_.declared.dim == 0) {
    throw InvalidInput("remote binding needs a declared map shape");
  }
  if (cfg_.verify_info) {
    const auto remote = info();
    if (remote.feature_dim != cfg_.declared.dim || remote.map_h != cfg_.declared.height ||
        remote.map_w != cfg_.declared.width) {
      throw ShapeMismatch("remote encoder reports " + std::to_string(remote.map_h) + "x" +
                          std::to_string(remote.map_w) + "x" + std::to_string(remote.feature_dim));
    }
  }
}

std::string RemoteEncoder::post(std::string_view path, const std::string& body) const {
  httplib::Client client(cfg_.url);
  const auto seconds = static_cast<time_t>(cfg_.timeout_seconds);
  const auto micros = static_cast<time_t>((cfg_.timeout_seconds - seconds) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  auto res = client.Post(std::string(path), body, "application/json");
  if (!res) {
    throw TransportError("POST " + std::string(path) + " to " + cfg_.url + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    std::string detail;
    try {
      detail = json::parse(res->body).value("error", std::string{});
    } catch (const json::exception&) {
    }
    throw ProtocolError("POST " + std::string(path) + " returned " + std::to_string(res->status) +
                            (detail.empty() ? "" : ": " + detail),
                        res->status);
  }
  return res->body;
}

RemoteInfo RemoteEncoder::info() const {
  const auto j = parse_body(post(wire::kInfoPath, "{}"));
  return {field<std::size_t>(j, "feature_dim"), field<std::size_t>(j, "map_h"),
          field<std::size_t>(j, "map_w"), field<std::string>(j, "name")};
}

FeatureMap RemoteEncoder::encode_map(const Image& image) const {
  const json request = {{"h", image.height},
                        {"w", image.width},
                        {"c", image.channels},
                        {"pixels", wire::encode_f32(image.pixels)}};
  const auto j = parse_body(post(wire::kEncodeMapPath, request.dump()));
  const auto h = field<std::size_t>(j, "map_h");
  const auto w = field<std::size_t>(j, "map_w");
  const auto d = field<std::size_t>(j, "dim");
  if (h != cfg_.declared.height || w != cfg_.declared.width || d != cfg_.declared.dim) {
    throw ShapeMismatch("encode_map returned " + std::to_string(h) + "x" + std::to_string(w) +
                        "x" + std::to_string(d));
  }
  FeatureMap map(h, w, d);
  map.values = decode_values(j);
  if (map.values.size() != h * w * d) {
    throw ShapeMismatch("encode_map returned " + std::to_string(map.values.size()) +
                        " values for a " + std::to_string(h) + "x" + std::to_string(w) + "x" +
                        std::to_string(d) + " map");
  }
  return map;
}

std::vector<std::vector<double>> RemoteEncoder::encode_patch_batch(
    std::span<const Image> patches) const {
  check_uniform_patches(patches);
  if (patches.empty()) return {};
  std::vector<double> pixels;
  pixels.reserve(patches.size() * patches[0].pixels.size());
  for (const auto& p : patches) pixels.insert(pixels.end(), p.pixels.begin(), p.pixels.end());

  const json request = {{"count", patches.size()},
                        {"h", patches[0].height},
                        {"w", patches[0].width},
                        {"c", patches[0].channels},
                        {"pixels", wire::encode_f32(pixels)}};
  const auto j = parse_body(post(wire::kEncodePatchBatchPath, request.dump()));
  const auto count = field<std::size_t>(j, "count");
  const auto dim = field<std::size_t>(j, "dim");
  if (count != patches.size() || dim != cfg_.declared.dim) {
    throw ShapeMismatch("encode_patch_batch returned count " + std::to_string(count) + ", dim " +
                        std::to_string(dim));
  }
  const auto values = decode_values(j);
  if (values.size() != count * dim) throw ShapeMismatch("encode_patch_batch value count mismatch");
  std::vector<std::vector<double>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].assign(values.begin() + static_cast<std::ptrdiff_t>(i * dim),
                  values.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
  }
  return out;
}

}  // namespace partcrop
