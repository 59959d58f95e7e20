#pragma once

#include <stdexcept>
#include <string>

namespace critnls {

enum class ErrorKind {
  domain,
  invalid_field,
  resolution,
  degenerate,
  bracket,
  integrator,
  convergence,
  usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace critnls
