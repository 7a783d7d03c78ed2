#pragma once

// Transfer functions used by the hybrid coordinates:
//   eta(x) = 1/(1 - log x), eta(0) = 0, flat at the origin
//   eta_inv(y) = exp(1 - 1/y), eta_inv(0) = 0
//   zeta = (eta_inv)', i.e. zeta(y) = exp(1 - 1/y)/y^2, zeta(0) = 0

namespace syz {

struct TransferValues {
  double eta = 0.0;
  double eta_inv = 0.0;
  double zeta = 0.0;
};

double eta(double x);
double eta_prime(double x);
double eta_inv(double y);
double zeta(double y);

TransferValues transfer_functions(double x);

}  // namespace syz
