#pragma once

#include <stdexcept>
#include <string>

namespace syz {

enum class ErrorKind {
  InvalidModel,
  Parse,
  Domain,
  SingularCoordinate,
  ChartBoundary,
  DegenerateForm,
  NonGenericPoint,
  Quadrature,
  Integrator,
  JCompatibility,
  InvalidIvy,
  Gluing,
  Range,
};

const char* to_string(ErrorKind kind);

// Every library failure carries the module and operation that raised it, so
// that callers (the CLI in particular) can report where a check failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string op, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& op() const noexcept { return op_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string op_;
};

}  // namespace syz
