#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace laat {

// Error taxonomy shared by the library; the CLI maps kinds to exit codes.
enum class ErrorKind {
  argument,         // bad parameters, config values out of range
  data,             // malformed files, schema mismatches, empty-after-filter
  degenerate,       // zero jump vectors / rank-0 neighborhoods (strict mode)
  multi_component,  // kernel spans several connected components
  convergence,      // power iteration exhausted its budget
};

class LaatError : public std::runtime_error {
 public:
  LaatError(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  LaatError(ErrorKind kind, const std::string& msg, double residual)
      : std::runtime_error(msg), kind_(kind), residual_(residual) {}

  ErrorKind kind() const noexcept { return kind_; }
  double residual() const noexcept { return residual_; }

 private:
  ErrorKind kind_;
  double residual_ = std::nan("");
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& msg) {
  throw LaatError(kind, msg);
}

}  // namespace laat
