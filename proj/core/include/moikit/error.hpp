#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace moikit {

/// Broad failure classes. The CLI maps these onto exit codes.
enum class ErrorKind {
  validation,  // malformed input, violated structural invariant, shape mismatch
  parameter,   // numeric parameter out of its admissible range
  capability,  // function lacks the derivative/representation an operation needs
  domain,      // function undefined (NaN/inf) at a required point
  numerical,   // solver failed to converge or lost accuracy
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) raise(kind, message);
}

}  // namespace moikit
