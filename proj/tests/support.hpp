#pragma once

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "syz/hybrid_coords.hpp"
#include "syz/model.hpp"

namespace syz::test {

inline std::string model_path(const std::string& name) { return std::string(SYZ_TEST_MODEL_DIR) + "/" + name; }

inline ModelFile model_file(const std::string& name) { return load_model_file(model_path(name)); }

inline Model model(const std::string& name) { return Model::from_file(model_file(name)); }

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed5eedULL + salt); }

// Random interior point of the open simplex with every coordinate >= floor.
inline Eigen::VectorXd interior_w(std::mt19937_64& g, int N, double floor) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Eigen::VectorXd w(N);
  for (;;) {
    for (auto& x : w) x = -std::log(U(g) + 1e-300);
    w /= w.sum();
    if (w.minCoeff() >= floor) return w;
  }
}

inline Eigen::VectorXd angles(std::mt19937_64& g, int count) {
  std::uniform_real_distribution<double> U(0.0, 2.0 * M_PI);
  Eigen::VectorXd a(count);
  for (auto& x : a) x = U(g);
  return a;
}

}  // namespace syz::test
