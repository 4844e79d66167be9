#include "hsicwb/error.hpp"

namespace hsicwb {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidGrid:
      return "invalid grid";
    case ErrorKind::Dimension:
      return "dimension mismatch";
    case ErrorKind::Configuration:
      return "configuration error";
    case ErrorKind::DegenerateSample:
      return "degenerate sample";
    case ErrorKind::Numerical:
      return "numerical failure";
    case ErrorKind::Data:
      return "data error";
    case ErrorKind::InsufficientSample:
      return "insufficient sample";
    case ErrorKind::EmptyEmbedding:
      return "empty embedding";
    case ErrorKind::Io:
      return "i/o error";
  }
  return "error";
}

}  // namespace hsicwb
