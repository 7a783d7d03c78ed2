#include "syz/errors.hpp"

namespace syz {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidModel: return "invalid-model";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::SingularCoordinate: return "singular-coordinate";
    case ErrorKind::ChartBoundary: return "chart-boundary";
    case ErrorKind::DegenerateForm: return "degenerate-form";
    case ErrorKind::NonGenericPoint: return "non-generic-point";
    case ErrorKind::Quadrature: return "quadrature";
    case ErrorKind::Integrator: return "integrator";
    case ErrorKind::JCompatibility: return "j-compatibility";
    case ErrorKind::InvalidIvy: return "invalid-ivy";
    case ErrorKind::Gluing: return "gluing";
    case ErrorKind::Range: return "range";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, std::string op, const std::string& detail)
    : std::runtime_error(module + "::" + op + ": [" + to_string(kind) + "] " + detail),
      kind_(kind),
      module_(std::move(module)),
      op_(std::move(op)) {}

}  // namespace syz
