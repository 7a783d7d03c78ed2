#pragma once

// Invariant suite behind `syz verify`: every check reports the module and
// operation it exercises, the worst value seen, and the tolerance.

#include <cstdint>
#include <string>
#include <vector>

#include "syz/hybrid_coords.hpp"

namespace syz {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  double eps = 0.1;
  int random_points = 100;
};

std::vector<CheckResult> verify_model(const ModelFile& file, const VerifyOptions& opt = {});

}  // namespace syz
