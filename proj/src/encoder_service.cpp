#include "partcrop/encoder_service.hpp"

#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "partcrop/errors.hpp"
#include "partcrop/wire.hpp"

namespace partcrop {

using nlohmann::json;

struct EncoderService::State {
  std::shared_ptr<const Encoder> encoder;
  httplib::Server server;
  std::thread worker;
  std::string host;
  int port = 0;
};

namespace {

struct HttpFailure {
  int status;
  std::string message;
};

void reply_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), "application/json");
}

json parse_request(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw HttpFailure{400, "request body must be a JSON object"};
    return j;
  } catch (const json::exception& e) {
    throw HttpFailure{400, std::string("malformed JSON: ") + e.what()};
  }
}

std::size_t positive_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw HttpFailure{400, std::string("missing integer field '") + key + "'"};
  }
  const auto v = j.at(key).get<long long>();
  if (v <= 0) throw HttpFailure{422, std::string("field '") + key + "' must be positive"};
  return static_cast<std::size_t>(v);
}

std::vector<double> pixel_field(const json& j) {
  if (!j.contains("pixels") || !j.at("pixels").is_string()) {
    throw HttpFailure{400, "missing base64 field 'pixels'"};
  }
  try {
    return wire::decode_f32(j.at("pixels").get<std::string>());
  } catch (const FormatError& e) {
    throw HttpFailure{400, e.what()};
  }
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(handler(req).dump(), "application/json");
    } catch (const HttpFailure& f) {
      reply_error(res, f.status, f.message);
    } catch (const InvalidInput& e) {
      reply_error(res, 422, e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  };
}

}  // namespace

EncoderService::EncoderService(std::shared_ptr<const Encoder> encoder)
    : state_(std::make_unique<State>()) {
  state_->encoder = std::move(encoder);
  auto& srv = state_->server;
  const Encoder* enc = state_->encoder.get();

  srv.Post(std::string(wire::kInfoPath), guarded([enc](const httplib::Request&) {
             const auto s = enc->shape();
             return json{{"feature_dim", s.dim},
                         {"map_h", s.height},
                         {"map_w", s.width},
                         {"name", enc->name()}};
           }));

  srv.Post(std::string(wire::kEncodeMapPath), guarded([enc](const httplib::Request& req) {
             const auto j = parse_request(req);
             const auto h = positive_field(j, "h");
             const auto w = positive_field(j, "w");
             const auto c = positive_field(j, "c");
             Image img(h, w, c);
             img.pixels = pixel_field(j);
             if (img.pixels.size() != h * w * c) {
               throw HttpFailure{422, "pixel count does not match h*w*c"};
             }
             const auto map = enc->encode_map(img);
             return json{{"map_h", map.height},
                         {"map_w", map.width},
                         {"dim", map.dim},
                         {"values", wire::encode_f32(map.values)}};
           }));

  srv.Post(std::string(wire::kEncodePatchBatchPath), guarded([enc](const httplib::Request& req) {
             const auto j = parse_request(req);
             const auto count = positive_field(j, "count");
             const auto h = positive_field(j, "h");
             const auto w = positive_field(j, "w");
             const auto c = positive_field(j, "c");
             const auto pixels = pixel_field(j);
             const std::size_t per = h * w * c;
             if (pixels.size() != count * per) {
               throw HttpFailure{422, "pixel count does not match count*h*w*c"};
             }
             std::vector<Image> patches(count, Image(h, w, c));
             for (std::size_t i = 0; i < count; ++i) {
               std::copy_n(pixels.begin() + static_cast<std::ptrdiff_t>(i * per), per,
                           patches[i].pixels.begin());
             }
             const auto vectors = enc->encode_patch_batch(patches);
             std::vector<double> flat;
             flat.reserve(count * enc->shape().dim);
             for (const auto& v : vectors) flat.insert(flat.end(), v.begin(), v.end());
             return json{{"count", count},
                         {"dim", enc->shape().dim},
                         {"values", wire::encode_f32(flat)}};
           }));
}

EncoderService::~EncoderService() { stop(); }

int EncoderService::bind(const std::string& host, int port) {
  state_->host = host;
  if (port == 0) {
    state_->port = state_->server.bind_to_any_port(host);
  } else {
    state_->port = state_->server.bind_to_port(host, port) ? port : -1;
  }
  if (state_->port < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return state_->port;
}

void EncoderService::serve() { state_->server.listen_after_bind(); }

int EncoderService::start_background(const std::string& host, int port) {
  const int bound = bind(host, port);
  state_->worker = std::thread([this] { serve(); });
  state_->server.wait_until_ready();
  return bound;
}

void EncoderService::stop() {
  if (!state_) return;
  state_->server.stop();
  if (state_->worker.joinable()) state_->worker.join();
}

std::string EncoderService::url() const {
  return "http://" + state_->host + ":" + std::to_string(state_->port);
}

}  // namespace partcrop
