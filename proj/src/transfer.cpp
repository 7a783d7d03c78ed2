#include "syz/transfer.hpp"

#include <cmath>

#include "syz/errors.hpp"

namespace syz {

double eta(double x) {
  if (x < 0.0) throw Error(ErrorKind::Domain, "hybrid_coords", "transfer_functions", "eta needs x >= 0");
  if (x == 0.0) return 0.0;
  return 1.0 / (1.0 - std::log(x));
}

double eta_prime(double x) {
  if (x <= 0.0) return 0.0;
  const double e = eta(x);
  return e * e / x;
}

double eta_inv(double y) {
  if (y < 0.0) throw Error(ErrorKind::Domain, "hybrid_coords", "transfer_functions", "eta_inv needs y >= 0");
  if (y == 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / y);
}

double zeta(double y) {
  if (y < 0.0) throw Error(ErrorKind::Domain, "hybrid_coords", "transfer_functions", "zeta needs y >= 0");
  if (y == 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / y) / (y * y);
}

TransferValues transfer_functions(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw Error(ErrorKind::Domain, "hybrid_coords", "transfer_functions", "argument must lie in [0,1]");
  return {eta(x), eta_inv(x), zeta(x)};
}

}  // namespace syz
