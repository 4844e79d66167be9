#pragma once

#include <stdexcept>
#include <string>

namespace hsicwb {

enum class ErrorKind {
  InvalidGrid,
  Dimension,
  Configuration,
  DegenerateSample,
  Numerical,
  Data,
  InsufficientSample,
  EmptyEmbedding,
  Io,
};

// Every library failure is reported through this type; the kind drives the
// status code seen by C API callers and the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

}  // namespace hsicwb
