#pragma once

#include "harmap/linalg.hpp"

namespace harmap {

// Parameters of the Riemann theta function
//   theta(z | tau) = sum_{m in Z^g} exp(pi*i m^T tau m + 2 pi*i m^T z).
// tau must be symmetric with positive definite imaginary part.
struct ThetaParams {
  MatrixXcd tau;
  double eps = 1e-14;  // requested absolute error on the reduced argument

  ThetaParams() = default;
  ThetaParams(MatrixXcd t, double e = 1e-14);

  int g() const { return static_cast<int>(tau.rows()); }
};

// Value of theta(z | tau).  Argument reduction z -> z - tau*m - m' keeps the
// truncated sum well conditioned; the quasi-periodicity factor is restored
// exactly.  Deterministic lexicographic summation order.
cplx riemann_theta(const VectorXcd& z, const ThetaParams& params);

// Gradient d theta / dz_i, same truncation scheme.
VectorXcd riemann_theta_grad(const VectorXcd& z, const ThetaParams& params);

// Multiplier e with theta(z + tau*m + m') = e * theta(z):
//   e = exp(-pi*i m^T tau m - 2 pi*i m^T z).
cplx quasi_period_factor(const VectorXcd& z, const VectorXi& m,
                         const VectorXi& mprime, const ThetaParams& params);

// Internal: integer box radius that guarantees the truncation error bound for
// arguments with centered fractional part; exposed for the honesty test.
int truncation_radius(const ThetaParams& params);

// Sum over the integer box of the given radius without argument reduction.
// Used by the truncation-honesty property test (radius R vs R+2) and as the
// brute-force reference in the unit tests.
cplx theta_boxsum(const VectorXcd& z, const MatrixXcd& tau, int radius);

}  // namespace harmap
