#pragma once

#include <stdexcept>
#include <string>

namespace partcrop {

/// Argument violates a documented precondition (shape, range, finiteness).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but mathematically degenerate (e.g. zero-norm vector).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a protocol-level contract, such as an unbalanced training batch.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or truncated on-disk artifact.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EncoderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Remote encoder could not be reached or the connection dropped.
class TransportError : public EncoderError {
 public:
  using EncoderError::EncoderError;
};

/// Remote encoder answered with an error status or an unparseable body.
class ProtocolError : public EncoderError {
 public:
  ProtocolError(const std::string& what, int status = 0)
      : EncoderError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Encoder output disagrees with the shape declared by its binding.
class ShapeMismatch : public EncoderError {
 public:
  using EncoderError::EncoderError;
};

/// Failure inside an experiment pipeline, tagged with the stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace partcrop
