#pragma once

#include <string>

#include "partcrop/encoding.hpp"

namespace partcrop {

struct RemoteEncoderConfig {
  std::string url = "http://127.0.0.1:8080";  ///< scheme://host:port
  MapShape declared{};
  double timeout_seconds = 30.0;
  /// Query /v1/info at construction and require it to match `declared`.
  bool verify_info = true;
};

struct RemoteInfo {
  std::size_t feature_dim = 0;
  std::size_t map_h = 0;
  std::size_t map_w = 0;
  std::string name;
};

/// Client for the encoder wire protocol. Each call opens its own connection,
/// so one instance can serve concurrent callers.
///
/// Failures are reported as TransportError (unreachable, dropped), ProtocolError
/// (non-200 status or unparseable body; status() carries the HTTP code) and
/// ShapeMismatch (response disagrees with the declared shape).
class RemoteEncoder final : public Encoder {
 public:
  explicit RemoteEncoder(RemoteEncoderConfig cfg);

  MapShape shape() const override { return cfg_.declared; }
  std::string name() const override { return "remote:" + cfg_.url; }

  RemoteInfo info() const;
  FeatureMap encode_map(const Image& image) const override;
  std::vector<std::vector<double>> encode_patch_batch(std::span<const Image> patches) const override;

 private:
  std::string post(std::string_view path, const std::string& body) const;

  RemoteEncoderConfig cfg_;
};

}  // namespace partcrop
