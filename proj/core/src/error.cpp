#include "moikit/error.hpp"

namespace moikit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::capability: return "capability";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + message);
}

}  // namespace moikit
