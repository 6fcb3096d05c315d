#pragma once

#include <memory>
#include <string>

#include "partcrop/encoding.hpp"

namespace httplib {
class Server;
}

namespace partcrop {

/// Serves any Encoder over the wire protocol (see wire.hpp). Used by the
/// `serve-synth` subcommand and as a loopback stub in tests.
class EncoderService {
 public:
  explicit EncoderService(std::shared_ptr<const Encoder> encoder);
  ~EncoderService();
  EncoderService(const EncoderService&) = delete;
  EncoderService& operator=(const EncoderService&) = delete;

  /// Binds to `host:port`; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks until stop() is called.
  void serve();
  /// bind() + serve() on a background thread; returns once the server accepts.
  int start_background(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  std::string url() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace partcrop
